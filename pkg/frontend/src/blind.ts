/**
 * Defensive blindness check. The server must never send model-source
 * information; if a payload carries such a field anyway (server defect,
 * misconfigured proxy), strip it before anything can render and report
 * the leak loudly.
 */

const FORBIDDEN = new Set(["source", "sources", "doc_id", "pmid"]);

export interface BlindResult<T> {
  clean: T;
  /** JSON paths of removed fields, empty when the payload was clean. */
  leaks: string[];
}

function scrub(value: unknown, path: string, leaks: string[]): unknown {
  if (Array.isArray(value)) {
    return value.map((item, i) => scrub(item, `${path}[${i}]`, leaks));
  }
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const [key, inner] of Object.entries(value)) {
      if (FORBIDDEN.has(key)) {
        leaks.push(`${path}.${key}`);
        continue;
      }
      out[key] = scrub(inner, `${path}.${key}`, leaks);
    }
    return out;
  }
  return value;
}

export function enforceBlindness<T>(payload: T, where: string): BlindResult<T> {
  const leaks: string[] = [];
  const clean = scrub(payload, "$", leaks) as T;
  if (leaks.length > 0) {
    console.warn(
      `blindness violation in ${where}: stripped ${leaks.join(", ")}`
    );
  }
  return { clean, leaks };
}
