"""Inter-rater statistics over blind rating logs: Cohen's kappa, pairwise
agreement matrices, rank concordance with Student confidence intervals,
and per-model rating summaries."""

from __future__ import annotations

import json
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as sstats

__all__ = [
    "RELEVANCE_LEVELS",
    "RatingRecord",
    "cohen_kappa",
    "pairwise_kappa_matrix",
    "concordance_rate",
    "concordance_ci",
    "summarize_ratings",
    "compile_agreement_report",
    "write_agreement_report",
    "load_rating_log",
    "append_rating",
]

RELEVANCE_LEVELS = (0, 1, 2)  # bad, partial, full


@dataclass(frozen=True)
class RatingRecord:
    """One evaluator's judgment of one pooled candidate.

    sources carries every model that proposed the candidate; deduplicated
    candidates are rated once and count toward each proposing model."""

    evaluator_id: str
    session_id: str
    query_id: str
    candidate_id: str
    sources: tuple[str, ...]
    relevance: int
    rank: int

    def __post_init__(self):
        if self.relevance not in RELEVANCE_LEVELS:
            raise ValueError(f"relevance must be one of {RELEVANCE_LEVELS}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if not self.sources:
            raise ValueError("at least one source model required")

    def as_dict(self) -> dict:
        return {
            "evaluator_id": self.evaluator_id,
            "session_id": self.session_id,
            "query_id": self.query_id,
            "candidate_id": self.candidate_id,
            "sources": list(self.sources),
            "relevance": self.relevance,
            "rank": self.rank,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RatingRecord":
        return cls(
            evaluator_id=d["evaluator_id"],
            session_id=d["session_id"],
            query_id=d["query_id"],
            candidate_id=d["candidate_id"],
            sources=tuple(d["sources"]),
            relevance=int(d["relevance"]),
            rank=int(d["rank"]),
        )


def cohen_kappa(
    ratings_a: Sequence[int],
    ratings_b: Sequence[int],
    weighted: bool = False,
) -> float:
    """Chance-corrected agreement over the three relevance levels.

    Unweighted by default. The weighted variant (linear weights) exists for
    sensitivity checks only. Two constant, equal sequences give p_e = 1 and
    are defined as perfect agreement.
    """
    if len(ratings_a) != len(ratings_b):
        raise ValueError("rating sequences differ in length")
    n = len(ratings_a)
    if n == 0:
        raise ValueError("rating sequences are empty")
    for r in (*ratings_a, *ratings_b):
        if r not in RELEVANCE_LEVELS:
            raise ValueError(f"relevance {r} outside {RELEVANCE_LEVELS}")
    levels = list(RELEVANCE_LEVELS)
    pa = np.array([sum(1 for r in ratings_a if r == c) for c in levels]) / n
    pb = np.array([sum(1 for r in ratings_b if r == c) for c in levels]) / n
    if weighted:
        k = len(levels)
        w = 1.0 - np.abs(np.subtract.outer(levels, levels)) / (k - 1)
        joint = np.zeros((k, k))
        for a, b in zip(ratings_a, ratings_b):
            joint[a, b] += 1.0 / n
        p_o = float(np.sum(w * joint))
        p_e = float(np.sum(w * np.outer(pa, pb)))
    else:
        p_o = sum(1 for a, b in zip(ratings_a, ratings_b) if a == b) / n
        p_e = float(np.dot(pa, pb))
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def _by_evaluator(records: Iterable[RatingRecord]):
    out: dict[str, dict[tuple[str, str], RatingRecord]] = defaultdict(dict)
    for rec in records:
        out[rec.evaluator_id][(rec.query_id, rec.candidate_id)] = rec
    return out


def pairwise_kappa_matrix(
    records: Iterable[RatingRecord],
) -> tuple[list[str], np.ndarray, float]:
    """Symmetric evaluator-by-evaluator kappa matrix (diagonal 1.0) and the
    mean over distinct pairs. Every evaluator must cover the same items."""
    grouped = _by_evaluator(records)
    if not grouped:
        raise ValueError("no rating records")
    evaluators = sorted(grouped)
    all_items = sorted(set().union(*(set(g) for g in grouped.values())))
    missing = [
        (ev, item)
        for ev in evaluators
        for item in all_items
        if item not in grouped[ev]
    ]
    if missing:
        shown = ", ".join(f"{ev}:{q}/{c}" for ev, (q, c) in missing[:5])
        raise ValueError(
            f"{len(missing)} missing ratings (first: {shown})"
        )
    n = len(evaluators)
    matrix = np.eye(n)
    pair_values = []
    for i in range(n):
        for j in range(i + 1, n):
            a = [grouped[evaluators[i]][item].relevance for item in all_items]
            b = [grouped[evaluators[j]][item].relevance for item in all_items]
            k = cohen_kappa(a, b)
            matrix[i, j] = matrix[j, i] = k
            pair_values.append(k)
    mean = float(np.mean(pair_values)) if pair_values else 1.0
    return evaluators, matrix, mean


def concordance_rate(
    records_a: Iterable[RatingRecord],
    records_b: Iterable[RatingRecord],
    n_pairs: int = 10,
    rng_seed: int = 0,
) -> float:
    """Fraction of sampled candidate pairs both evaluators order the same
    way. Pairs are drawn within a query's pool (ranks are only comparable
    there), pooled across queries, without replacement."""
    rank_a = {(r.query_id, r.candidate_id): r.rank for r in records_a}
    rank_b = {(r.query_id, r.candidate_id): r.rank for r in records_b}
    if set(rank_a) != set(rank_b):
        raise ValueError("evaluators ranked different item sets")
    pools: dict[str, list[str]] = defaultdict(list)
    for q, c in sorted(rank_a):
        pools[q].append(c)
    pairs = [
        (q, cands[i], cands[j])
        for q, cands in sorted(pools.items())
        for i in range(len(cands))
        for j in range(i + 1, len(cands))
    ]
    if not pairs:
        raise ValueError("no candidate pair can be formed")
    if len(pairs) > n_pairs:
        pairs = random.Random(rng_seed).sample(pairs, n_pairs)
    agree = sum(
        1
        for q, c1, c2 in pairs
        if _sign(rank_a[(q, c1)] - rank_a[(q, c2)])
        == _sign(rank_b[(q, c1)] - rank_b[(q, c2)])
    )
    return agree / len(pairs)


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


_EPS = 1e-6


def concordance_ci(
    rates: Sequence[float], confidence: float = 0.95
) -> tuple[float, float, float, float]:
    """(mean, sd, lo, hi): Student-t interval computed on the arctanh scale.

    Rates in [0,1] are mapped through 2r-1 into (-1,1) (with an epsilon
    clamp at the ends), the t interval is built on the transformed values,
    and the bounds map back. Mean and sd are reported on the raw scale.
    """
    rates = [float(r) for r in rates]
    if len(rates) < 2:
        raise ValueError("need at least 2 rates")
    if not 0 < confidence < 1:
        raise ValueError("confidence must be in (0,1)")
    for r in rates:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"rate {r} outside [0,1]")
    clamped = np.clip(rates, _EPS, 1.0 - _EPS)
    z = np.arctanh(2.0 * clamped - 1.0)
    n = len(z)
    mean_z = float(z.mean())
    sd_z = float(z.std(ddof=1))
    t = float(sstats.t.ppf((1.0 + confidence) / 2.0, n - 1))
    half = t * sd_z / math.sqrt(n)
    lo = (math.tanh(mean_z - half) + 1.0) / 2.0
    hi = (math.tanh(mean_z + half) + 1.0) / 2.0
    raw = np.asarray(rates)
    return float(raw.mean()), float(raw.std(ddof=1)), lo, hi


def summarize_ratings(records: Iterable[RatingRecord]) -> dict[str, dict]:
    """Per source model: relevance modality counts and the mean rank of its
    candidates across all (evaluator, query) lists. A record with several
    sources contributes fully to each."""
    records = list(records)
    if not records:
        raise ValueError("no rating records")
    out: dict[str, dict] = {}
    for rec in records:
        for source in rec.sources:
            entry = out.setdefault(
                source,
                {"bad": 0, "partial": 0, "full": 0, "n": 0, "_rank_sum": 0},
            )
            entry[("bad", "partial", "full")[rec.relevance]] += 1
            entry["n"] += 1
            entry["_rank_sum"] += rec.rank
    for entry in out.values():
        entry["mean_rank"] = entry.pop("_rank_sum") / entry["n"]
    return out


def compile_agreement_report(
    records: Iterable[RatingRecord],
    n_pairs: int = 10,
    rng_seed: int = 0,
    confidence: float = 0.95,
) -> dict:
    """Everything the manual evaluation reports, from one rating log:
    pairwise kappas, per-pair concordance rates with a Student interval
    (when three or more evaluators yield multiple rates), and per-model
    modality counts. Shared candidates count toward every proposing model."""
    records = list(records)
    evaluators, matrix, kappa_mean = pairwise_kappa_matrix(records)
    by_ev = _by_evaluator(records)
    conc_pairs = []
    rates = []
    for i in range(len(evaluators)):
        for j in range(i + 1, len(evaluators)):
            a = list(by_ev[evaluators[i]].values())
            b = list(by_ev[evaluators[j]].values())
            rate = concordance_rate(a, b, n_pairs=n_pairs, rng_seed=rng_seed)
            conc_pairs.append(
                {"a": evaluators[i], "b": evaluators[j], "rate": rate}
            )
            rates.append(rate)
    concordance: dict = {"pairs": conc_pairs, "n_pairs_sampled": n_pairs}
    if len(rates) >= 2:
        mean, sd, lo, hi = concordance_ci(rates, confidence)
        concordance.update(mean=mean, sd=sd, lo=lo, hi=hi)
    elif rates:
        concordance.update(mean=rates[0], sd=None, lo=None, hi=None)
    return {
        "evaluators": evaluators,
        "kappa_matrix": matrix.tolist(),
        "kappa_mean": kappa_mean,
        "concordance": concordance,
        "models": summarize_ratings(records),
        "n_records": len(records),
        "shared_candidate_rule": "rated once, counted toward every source",
    }


def write_agreement_report(report: dict, text_path, matrix_path) -> None:
    """Emit the report: human-readable text plus the kappa matrix as TSV."""
    evaluators = report["evaluators"]
    lines = [
        f"evaluators: {', '.join(evaluators)}",
        f"records: {report['n_records']}",
        f"kappa mean over pairs: {report['kappa_mean']:.4f}",
        "",
        "concordance:",
    ]
    for pair in report["concordance"]["pairs"]:
        lines.append(f"  {pair['a']} vs {pair['b']}: {pair['rate']:.4f}")
    if report["concordance"].get("mean") is not None:
        lines.append(f"  mean: {report['concordance']['mean']:.4f}")
    if report["concordance"].get("lo") is not None:
        lines.append(
            f"  interval: [{report['concordance']['lo']:.4f},"
            f" {report['concordance']['hi']:.4f}]"
        )
    lines.append("")
    lines.append("per-model ratings (shared candidates count toward each):")
    for model, entry in sorted(report["models"].items()):
        lines.append(
            f"  {model}: bad={entry['bad']} partial={entry['partial']}"
            f" full={entry['full']} mean_rank={entry['mean_rank']:.2f}"
        )
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    matrix = report["kappa_matrix"]
    rows = ["evaluator\t" + "\t".join(evaluators)]
    for name, row in zip(evaluators, matrix):
        rows.append(name + "\t" + "\t".join(format(v, ".10g") for v in row))
    with open(matrix_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def append_rating(path, record: RatingRecord) -> None:
    """Append one record to a line-delimited log."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")


def load_rating_log(path, effective: bool = True) -> list[RatingRecord]:
    """Read a rating log. With effective=True (the default), a later line
    for the same (evaluator, query, candidate) replaces the earlier one."""
    raw: list[RatingRecord] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                raw.append(RatingRecord.from_dict(json.loads(line)))
    if not effective:
        return raw
    last: dict[tuple[str, str, str], RatingRecord] = {}
    for rec in raw:
        last[(rec.evaluator_id, rec.query_id, rec.candidate_id)] = rec
    return list(last.values())
