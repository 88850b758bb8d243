/**
 * DOM rendering for rating panels. No framework: the session is small
 * (tens of cards) so full re-render on every state change is fine and
 * keeps the state -> DOM mapping trivial to audit.
 */

import { missingRatings, panelReady } from "./model.js";
import { RELEVANCE_LABELS } from "./types.js";
import type {
  CardState,
  PanelState,
  Relevance,
  SessionView,
} from "./types.js";

export interface Handlers {
  onRate(queryId: string, candidateId: string, relevance: Relevance): void;
  onMove(queryId: string, from: number, to: number): void;
  onSubmit(queryId: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderRelevanceControls(
  panel: PanelState,
  card: CardState,
  handlers: Handlers
): HTMLElement {
  const group = el("div", "relevance-group");
  const levels: Relevance[] = [0, 1, 2];
  for (const level of levels) {
    const label = el("label", "relevance-option");
    const input = el("input");
    input.type = "radio";
    input.name = `rel-${panel.queryId}-${card.candidateId}`;
    input.value = String(level);
    input.checked = card.relevance === level;
    input.disabled = panel.submitted;
    input.addEventListener("change", () => {
      handlers.onRate(panel.queryId, card.candidateId, level);
    });
    label.appendChild(input);
    label.appendChild(document.createTextNode(` ${RELEVANCE_LABELS[level]}`));
    group.appendChild(label);
  }
  return group;
}

function renderCard(
  panel: PanelState,
  card: CardState,
  index: number,
  handlers: Handlers
): HTMLElement {
  const item = el("li", "candidate-card");
  item.draggable = !panel.submitted;
  item.dataset.candidateId = card.candidateId;
  item.dataset.index = String(index);

  item.addEventListener("dragstart", (event) => {
    event.dataTransfer?.setData("text/plain", String(index));
  });
  item.addEventListener("dragover", (event) => event.preventDefault());
  item.addEventListener("drop", (event) => {
    event.preventDefault();
    const raw = event.dataTransfer?.getData("text/plain");
    const from = raw === undefined || raw === "" ? NaN : Number(raw);
    if (Number.isInteger(from) && from !== index) {
      handlers.onMove(panel.queryId, from, index);
    }
  });

  const head = el("div", "card-head");
  head.appendChild(el("span", "card-rank", `#${card.rank}`));
  head.appendChild(el("span", "card-title", card.title));
  item.appendChild(head);
  item.appendChild(el("p", "card-abstract", card.abstract));
  item.appendChild(renderRelevanceControls(panel, card, handlers));
  return item;
}

function renderPanel(panel: PanelState, handlers: Handlers): HTMLElement {
  const section = el("section", "query-panel");
  section.dataset.queryId = panel.queryId;

  section.appendChild(el("h2", "query-title", panel.title));
  section.appendChild(el("p", "query-abstract", panel.abstract));

  const list = el("ol", "candidate-list");
  panel.cards.forEach((card, i) => {
    list.appendChild(renderCard(panel, card, i, handlers));
  });
  section.appendChild(list);

  const footer = el("div", "panel-footer");
  const missing = missingRatings(panel);
  const submit = el("button", "submit-button");
  submit.type = "button";
  if (panel.submitted) {
    submit.textContent = "submitted";
    submit.disabled = true;
    section.classList.add("panel-complete");
    footer.appendChild(el("span", "panel-badge", "complete"));
  } else if (missing > 0) {
    submit.textContent = `submit (${missing} unrated)`;
    submit.disabled = true;
  } else {
    submit.textContent = "submit ratings";
    submit.disabled = !panelReady(panel);
  }
  submit.addEventListener("click", () => handlers.onSubmit(panel.queryId));
  footer.appendChild(submit);

  if (panel.error) {
    footer.appendChild(el("span", "panel-error", panel.error));
  }
  section.appendChild(footer);
  return section;
}

export function renderSession(
  root: HTMLElement,
  view: SessionView,
  handlers: Handlers
): void {
  root.textContent = "";

  const header = el("header", "session-header");
  header.appendChild(el("h1", undefined, `Rating session ${view.sessionId}`));
  header.appendChild(
    el("p", "session-meta", `evaluator: ${view.evaluatorId}`)
  );
  if (view.panels.every((panel) => panel.submitted)) {
    header.appendChild(el("p", "session-done", "All queries submitted."));
  }
  root.appendChild(header);

  for (const panel of view.panels) {
    root.appendChild(renderPanel(panel, handlers));
  }
}

export function renderError(root: HTMLElement, message: string): void {
  root.textContent = "";
  root.appendChild(el("p", "load-error", message));
}
