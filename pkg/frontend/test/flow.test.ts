/**
 * End-to-end UI flow against the fake server: load a 2-query session,
 * rate and reorder all candidates through the DOM, submit, and check the
 * exact rating log the server received.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import type { Relevance } from "../src/types.js";
import { makeFakeServer, type FakeServer } from "./fakes.js";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function mount(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

async function loadController(
  server: FakeServer,
  evaluator: string,
  root = mount()
): Promise<{ controller: SessionController; root: HTMLElement }> {
  const api = new ApiClient("http://testserver", server.fetch);
  const controller = new SessionController(api, root, null);
  await controller.load("fix1", evaluator);
  return { controller, root };
}

function chooseRelevance(
  root: HTMLElement,
  queryId: string,
  candidateId: string,
  level: Relevance
): void {
  const selector =
    `input[name="rel-${queryId}-${candidateId}"][value="${level}"]`;
  const input = root.querySelector<HTMLInputElement>(selector);
  expect(input, selector).toBeTruthy();
  input!.checked = true;
  input!.dispatchEvent(new Event("change"));
}

function submitButton(root: HTMLElement, queryId: string): HTMLButtonElement {
  const panel = root.querySelector(`[data-query-id="${queryId}"]`);
  expect(panel, queryId).toBeTruthy();
  return panel!.querySelector("button.submit-button") as HTMLButtonElement;
}

function rateWholePanel(root: HTMLElement, queryId: string): void {
  // deterministic script shared by both evaluators: relevance = index % 3
  for (const [i, cid] of [1, 2, 3, 4].entries()) {
    chooseRelevance(root, queryId, `${queryId}c${cid}`, (i % 3) as Relevance);
  }
}

describe("session flow", () => {
  let server: FakeServer;

  beforeEach(() => {
    server = makeFakeServer();
  });

  it("renders two panels of four cards with disabled submits", async () => {
    const { root } = await loadController(server, "e1");
    const panels = root.querySelectorAll(".query-panel");
    expect(panels).toHaveLength(2);
    for (const panel of panels) {
      expect(panel.querySelectorAll(".candidate-card")).toHaveLength(4);
      const button = panel.querySelector(
        "button.submit-button"
      ) as HTMLButtonElement;
      expect(button.disabled).toBe(true);
      expect(button.textContent).toContain("4 unrated");
    }
  });

  it("counts down unrated candidates as ratings come in", async () => {
    const { root } = await loadController(server, "e1");
    chooseRelevance(root, "q1", "q1c1", 2);
    expect(submitButton(root, "q1").textContent).toContain("3 unrated");
    chooseRelevance(root, "q1", "q1c2", 1);
    chooseRelevance(root, "q1", "q1c3", 0);
    expect(submitButton(root, "q1").textContent).toContain("1 unrated");
    expect(submitButton(root, "q1").disabled).toBe(true);
    chooseRelevance(root, "q1", "q1c4", 2);
    const ready = submitButton(root, "q1");
    expect(ready.disabled).toBe(false);
    expect(ready.textContent).toBe("submit ratings");
  });

  it("submits one rating per candidate with positional ranks", async () => {
    const { root } = await loadController(server, "e1");
    rateWholePanel(root, "q1");
    submitButton(root, "q1").click();
    await flush();

    expect(server.ratings).toHaveLength(4);
    expect(server.ratings.map((r) => r.candidate_id)).toEqual([
      "q1c1", "q1c2", "q1c3", "q1c4",
    ]);
    expect(server.ratings.map((r) => r.rank)).toEqual([1, 2, 3, 4]);
    expect(server.ratings.map((r) => r.relevance)).toEqual([0, 1, 2, 0]);
    expect(server.ratings.every((r) => r.evaluator_id === "e1")).toBe(true);

    const panel = root.querySelector('[data-query-id="q1"]')!;
    expect(panel.querySelector(".panel-badge")?.textContent).toBe("complete");
    const radios = panel.querySelectorAll<HTMLInputElement>("input[type=radio]");
    expect([...radios].every((r) => r.disabled)).toBe(true);
  });

  it("reorders via drop events and submits the new ranks", async () => {
    const { root } = await loadController(server, "e1");
    rateWholePanel(root, "q1");
    // drag card 0 onto position 2
    const cards = root
      .querySelector('[data-query-id="q1"]')!
      .querySelectorAll(".candidate-card");
    const drop = new Event("drop", { bubbles: true, cancelable: true });
    Object.defineProperty(drop, "dataTransfer", {
      value: { getData: () => "0" },
    });
    cards[2]!.dispatchEvent(drop);

    const reordered = root
      .querySelector('[data-query-id="q1"]')!
      .querySelectorAll(".candidate-card");
    expect(
      [...reordered].map((c) => (c as HTMLElement).dataset.candidateId)
    ).toEqual(["q1c2", "q1c3", "q1c1", "q1c4"]);

    submitButton(root, "q1").click();
    await flush();
    const byCandidate = new Map(
      server.ratings.map((r) => [r.candidate_id, r.rank])
    );
    expect(byCandidate.get("q1c2")).toBe(1);
    expect(byCandidate.get("q1c1")).toBe(3);
  });

  it("shows the server detail on rejection and keeps local state", async () => {
    const { root, controller } = await loadController(server, "e1");
    rateWholePanel(root, "q1");
    server.failNext = { status: 422, detail: "rank 9 out of range" };
    submitButton(root, "q1").click();
    await flush();

    const panel = root.querySelector('[data-query-id="q1"]')!;
    expect(panel.querySelector(".panel-error")?.textContent).toContain(
      "rank 9 out of range"
    );
    expect(controller.state.panels[0]?.submitted).toBe(false);
    // selections survived the failed submit
    const checked = panel.querySelectorAll("input[type=radio]:checked");
    expect(checked).toHaveLength(4);

    submitButton(root, "q1").click();
    await flush();
    expect(controller.state.panels[0]?.submitted).toBe(true);
    expect(server.ratings).toHaveLength(4);
  });

  it("refuses to submit while candidates are unrated", async () => {
    const { root, controller } = await loadController(server, "e1");
    chooseRelevance(root, "q1", "q1c1", 2);
    await controller.submit("q1");
    expect(server.ratings).toHaveLength(0);
    expect(controller.state.panels[0]?.error).toContain("3 candidates");
  });

  it("announces completion once both panels are submitted", async () => {
    const { root } = await loadController(server, "e1");
    for (const q of ["q1", "q2"]) {
      rateWholePanel(root, q);
      submitButton(root, q).click();
      await flush();
    }
    expect(root.querySelector(".session-done")?.textContent).toContain(
      "All queries submitted."
    );
    expect(server.ratings).toHaveLength(8);
  });

  it("reports a load failure for an unknown session", async () => {
    const root = mount();
    const api = new ApiClient("http://testserver", server.fetch);
    const controller = new SessionController(api, root, null);
    await controller.load("missing", "e1");
    expect(root.querySelector(".load-error")?.textContent).toContain(
      "unknown session"
    );
    expect(() => controller.state).toThrow("session not loaded");
  });

  it("two evaluators running the same script produce identical logs", async () => {
    for (const evaluator of ["e1", "e2"]) {
      const { root } = await loadController(server, evaluator);
      for (const q of ["q1", "q2"]) {
        rateWholePanel(root, q);
        submitButton(root, q).click();
        await flush();
      }
    }
    expect(server.ratings).toHaveLength(16);
    const strip = (r: (typeof server.ratings)[number]) => ({
      query_id: r.query_id,
      candidate_id: r.candidate_id,
      relevance: r.relevance,
      rank: r.rank,
    });
    const first = server.ratings.slice(0, 8).map(strip);
    const second = server.ratings.slice(8).map(strip);
    // identical judgments -> perfect agreement when scored server-side
    expect(second).toEqual(first);
  });
});
