/** Typed client for the rating endpoints. fetch is injectable for tests. */

import { enforceBlindness } from "./blind.js";
import type {
  QueryCandidates,
  RatingAck,
  Relevance,
  SessionOverview,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit
) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; fall through
  }
  return response.statusText || "request failed";
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    const impl = fetchImpl ?? globalThis.fetch;
    if (!impl) throw new Error("no fetch implementation available");
    this.fetchImpl = impl.bind(globalThis);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    const payload = (await response.json()) as T;
    return enforceBlindness(payload, `${method} ${path}`).clean;
  }

  getSession(sessionId: string): Promise<SessionOverview> {
    return this.request<SessionOverview>(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}`
    );
  }

  getCandidates(
    sessionId: string,
    queryId: string
  ): Promise<QueryCandidates> {
    const sid = encodeURIComponent(sessionId);
    const qid = encodeURIComponent(queryId);
    return this.request<QueryCandidates>(
      "GET",
      `/sessions/${sid}/queries/${qid}/candidates`
    );
  }

  submitRating(
    sessionId: string,
    rating: {
      evaluator_id: string;
      query_id: string;
      candidate_id: string;
      relevance: Relevance;
      rank: number;
    }
  ): Promise<RatingAck> {
    const sid = encodeURIComponent(sessionId);
    return this.request<RatingAck>("POST", `/sessions/${sid}/ratings`, rating);
  }
}
