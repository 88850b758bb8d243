/**
 * View-model construction and draft persistence.
 *
 * Ratings are autosaved locally on every change so an evaluator can close
 * the tab and resume; server submission stays an explicit per-panel act.
 */

import type { ApiClient } from "./api.js";
import { repairRanks } from "./rank.js";
import type {
  CardState,
  PanelState,
  Relevance,
  SessionView,
} from "./types.js";

/** Minimal slice of the Storage interface, injectable for tests. */
export interface DraftStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

interface DraftCard {
  relevance: Relevance | null;
  rank: number;
}

type Draft = Record<string, Record<string, DraftCard>>;

function draftKey(sessionId: string, evaluatorId: string): string {
  return `rating-ui:${sessionId}:${evaluatorId}`;
}

function loadDraft(
  store: DraftStore | null,
  sessionId: string,
  evaluatorId: string
): Draft {
  if (!store) return {};
  const raw = store.getItem(draftKey(sessionId, evaluatorId));
  if (!raw) return {};
  try {
    const parsed = JSON.parse(raw) as Draft;
    return typeof parsed === "object" && parsed !== null ? parsed : {};
  } catch {
    return {};
  }
}

export function saveDraft(
  store: DraftStore | null,
  view: SessionView
): void {
  if (!store) return;
  const draft: Draft = {};
  for (const panel of view.panels) {
    const cards: Record<string, DraftCard> = {};
    for (const card of panel.cards) {
      cards[card.candidateId] = { relevance: card.relevance, rank: card.rank };
    }
    draft[panel.queryId] = cards;
  }
  store.setItem(
    draftKey(view.sessionId, view.evaluatorId),
    JSON.stringify(draft)
  );
}

function isRelevance(value: unknown): value is Relevance {
  return value === 0 || value === 1 || value === 2;
}

function applyDraft(panel: PanelState, draft: Draft): void {
  const saved = draft[panel.queryId];
  if (!saved) return;
  for (const card of panel.cards) {
    const entry = saved[card.candidateId];
    if (!entry) continue;
    if (isRelevance(entry.relevance)) card.relevance = entry.relevance;
    if (Number.isInteger(entry.rank) && entry.rank >= 1) {
      card.rank = entry.rank;
    }
  }
  repairRanks(panel.cards);
}

/** Fetch the session and all candidate lists, then merge any local draft. */
export async function buildSessionView(
  api: ApiClient,
  sessionId: string,
  evaluatorId: string,
  store: DraftStore | null = null
): Promise<SessionView> {
  const overview = await api.getSession(sessionId);
  const draft = loadDraft(store, sessionId, evaluatorId);

  const panels: PanelState[] = [];
  for (const query of overview.queries) {
    const detail = await api.getCandidates(sessionId, query.query_id);
    const cards: CardState[] = detail.candidates.map((cand, i) => ({
      candidateId: cand.candidate_id,
      title: cand.title,
      abstract: cand.abstract,
      relevance: null,
      rank: i + 1,
    }));
    const panel: PanelState = {
      queryId: query.query_id,
      title: detail.title,
      abstract: detail.abstract,
      cards,
      submitted: false,
      error: null,
    };
    applyDraft(panel, draft);
    panels.push(panel);
  }

  return {
    sessionId: overview.session_id,
    evaluatorId,
    status: overview.status,
    panels,
  };
}

/** Candidates in a panel still lacking a relevance judgment. */
export function missingRatings(panel: PanelState): number {
  return panel.cards.filter((card) => card.relevance === null).length;
}

export function panelReady(panel: PanelState): boolean {
  return missingRatings(panel) === 0 && !panel.submitted;
}

export function sessionComplete(view: SessionView): boolean {
  return view.panels.every((panel) => panel.submitted);
}
