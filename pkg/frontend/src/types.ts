/** Server payload shapes and the client-side view state built from them. */

export interface QuerySummary {
  query_id: string;
  title: string;
  n_candidates: number;
}

export interface SessionOverview {
  session_id: string;
  status: string;
  queries: QuerySummary[];
}

export interface CandidateCard {
  candidate_id: string;
  title: string;
  abstract: string;
}

export interface QueryCandidates {
  query_id: string;
  title: string;
  abstract: string;
  candidates: CandidateCard[];
}

export interface RatingAck {
  status: string;
  evaluator_id: string;
  query_id: string;
  candidate_id: string;
  relevance: number;
  rank: number;
}

export type Relevance = 0 | 1 | 2;

export const RELEVANCE_LABELS: Record<Relevance, string> = {
  0: "not relevant",
  1: "partially relevant",
  2: "relevant",
};

/** Local, mutable state for one candidate card. */
export interface CardState {
  candidateId: string;
  title: string;
  abstract: string;
  relevance: Relevance | null;
  /** 1-based; implied by list position, kept in sync on reorder. */
  rank: number;
}

export interface PanelState {
  queryId: string;
  title: string;
  abstract: string;
  cards: CardState[];
  submitted: boolean;
  /** Last server rejection, cleared on the next successful submit. */
  error: string | null;
}

export interface SessionView {
  sessionId: string;
  evaluatorId: string;
  status: string;
  panels: PanelState[];
}
