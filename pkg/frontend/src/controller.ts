/**
 * Glue between state, API, and DOM. Owns the single mutable SessionView
 * and re-renders after every mutation.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  buildSessionView,
  missingRatings,
  saveDraft,
  type DraftStore,
} from "./model.js";
import { moveCard } from "./rank.js";
import { renderError, renderSession, type Handlers } from "./render.js";
import type { PanelState, Relevance, SessionView } from "./types.js";

export class SessionController {
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private readonly store: DraftStore | null;
  private view: SessionView | null = null;

  constructor(api: ApiClient, root: HTMLElement, store: DraftStore | null) {
    this.api = api;
    this.root = root;
    this.store = store;
  }

  async load(sessionId: string, evaluatorId: string): Promise<void> {
    try {
      this.view = await buildSessionView(
        this.api,
        sessionId,
        evaluatorId,
        this.store
      );
    } catch (err) {
      const message =
        err instanceof ApiError
          ? `could not load session: ${err.detail}`
          : `could not load session: ${String(err)}`;
      renderError(this.root, message);
      return;
    }
    this.render();
  }

  /** Exposed for tests; never null after a successful load. */
  get state(): SessionView {
    if (!this.view) throw new Error("session not loaded");
    return this.view;
  }

  private panel(queryId: string): PanelState {
    const panel = this.state.panels.find((p) => p.queryId === queryId);
    if (!panel) throw new Error(`unknown query ${queryId}`);
    return panel;
  }

  private render(): void {
    if (!this.view) return;
    const handlers: Handlers = {
      onRate: (q, c, r) => this.rate(q, c, r),
      onMove: (q, from, to) => this.move(q, from, to),
      onSubmit: (q) => {
        void this.submit(q);
      },
    };
    renderSession(this.root, this.view, handlers);
  }

  rate(queryId: string, candidateId: string, relevance: Relevance): void {
    const panel = this.panel(queryId);
    if (panel.submitted) return;
    const card = panel.cards.find((c) => c.candidateId === candidateId);
    if (!card) throw new Error(`unknown candidate ${candidateId}`);
    card.relevance = relevance;
    saveDraft(this.store, this.state);
    this.render();
  }

  move(queryId: string, from: number, to: number): void {
    const panel = this.panel(queryId);
    if (panel.submitted) return;
    moveCard(panel.cards, from, to);
    saveDraft(this.store, this.state);
    this.render();
  }

  /**
   * Push one rating per candidate. The panel is only marked complete once
   * every POST has been acknowledged; a rejection leaves local state
   * untouched so the evaluator can adjust and resubmit.
   */
  async submit(queryId: string): Promise<void> {
    const panel = this.panel(queryId);
    if (panel.submitted) return;
    if (missingRatings(panel) > 0) {
      panel.error = `${missingRatings(panel)} candidates still unrated`;
      this.render();
      return;
    }

    panel.error = null;
    try {
      for (const card of panel.cards) {
        await this.api.submitRating(this.state.sessionId, {
          evaluator_id: this.state.evaluatorId,
          query_id: queryId,
          candidate_id: card.candidateId,
          relevance: card.relevance as Relevance,
          rank: card.rank,
        });
      }
      panel.submitted = true;
    } catch (err) {
      panel.error =
        err instanceof ApiError
          ? `server rejected rating: ${err.detail}`
          : `submission failed: ${String(err)}`;
    }
    this.render();
  }
}
