/**
 * Entry point. Expects ?session=<id>&evaluator=<id> in the URL and an
 * element with id "app"; the API base defaults to the serving origin and
 * can be overridden with ?api=<url> for local development.
 */

import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import { renderError } from "./render.js";

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) {
    console.error("missing #app element");
    return;
  }

  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const evaluatorId = params.get("evaluator");
  if (!sessionId || !evaluatorId) {
    renderError(root, "missing ?session= and ?evaluator= parameters");
    return;
  }

  const base = params.get("api") ?? window.location.origin;
  const api = new ApiClient(base);
  const store = window.localStorage ?? null;
  const controller = new SessionController(api, root, store);
  void controller.load(sessionId, evaluatorId);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
