"""Command line front end.

Corpus and model commands (ingest, train, grid-search, pmra) work on the
data directory directly. Query and session commands (related, eval,
session, agreement) are a thin HTTP client: with --url they talk to a
running server, without it they mount the app in-process, so both paths
exercise the same handlers.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import httpx

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

from .corpus import (
    DocumentStore,
    ingest_files,
    load_split,
    normalize_document,
    save_split,
    split_corpus,
)
from .embedding import HyperParams, save_model, train
from .gridsearch import (
    default_grid_spec,
    load_grid_spec,
    run_grid_search,
    write_grid_tsv,
)
from .pmra import PmraClient, PmraTransportError, normalize_scores
from .service.config import ServiceConfig, load_config

ARCH_DM = {"pv-dbow": 0, "pv-dm": 1}


def _config(args: argparse.Namespace) -> ServiceConfig:
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "data_dir", None):
        cfg.data_dir = Path(args.data_dir)
    if getattr(args, "store", None):
        cfg.store = Path(args.store)
    if getattr(args, "dbow_model", None):
        cfg.dbow_model = Path(args.dbow_model)
    if getattr(args, "dm_model", None):
        cfg.dm_model = Path(args.dm_model)
    return cfg


def _client(args: argparse.Namespace) -> httpx.Client:
    if getattr(args, "url", None):
        return httpx.Client(base_url=args.url, timeout=120.0)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(
        create_app(_config(args)), raise_server_exceptions=False
    )


def _check(resp: httpx.Response) -> dict:
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise SystemExit(f"error {resp.status_code}: {detail}")
    return resp.json()


def cmd_ingest(args) -> None:
    cfg = _config(args)
    files = list(args.files) + list(getattr(args, "in_files", None) or [])
    if not files:
        raise SystemExit("ingest: no input files given")
    reports = ingest_files(files, cfg.store_dir)
    for rep in reports:
        pairs = "\t".join(f"{k}={v}" for k, v in rep.items() if k != "file")
        print(f"{rep['file']}\t{pairs}")
    print(f"store: {cfg.store_dir}")


def _train_corpus(cfg: ServiceConfig, split_seed: int, test_fraction: float):
    store = DocumentStore(cfg.store_dir)
    if cfg.split_path.exists():
        split = load_split(cfg.split_path)
    else:
        split = split_corpus(store, test_fraction, split_seed)
        save_split(split, cfg.split_path)
    train_docs = [
        (str(d.pmid), normalize_document(d))
        for d in store
        if d.pmid in split.train_ids
    ]
    return train_docs, split


TRAIN_DEFAULTS = {
    "vector_size": 128,
    "sample": 1e-4,
    "alpha": 0.025,
    "window": 5,
    "hs": 1,
    "epochs": 10,
    "negative": 5,
    "min_count": 5,
    "seed": 1,
}


def _train_params(args) -> HyperParams:
    """Defaults <- --params file <- explicit flags."""
    values: dict = dict(TRAIN_DEFAULTS)
    if args.params:
        with open(args.params, "rb") as fh:
            loaded = tomli.load(fh)
        unknown = set(loaded) - set(TRAIN_DEFAULTS) - {"dm"}
        if unknown:
            raise SystemExit(f"unknown params keys: {sorted(unknown)}")
        values.update(loaded)
    if args.arch is not None:
        values["dm"] = ARCH_DM[args.arch]
    values.setdefault("dm", 0)
    for key in TRAIN_DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    return HyperParams(**values)


def cmd_train(args) -> None:
    cfg = _config(args)
    corpus, split = _train_corpus(cfg, args.split_seed, args.test_fraction)
    params = _train_params(args)
    arch = "pv-dm" if params.dm else "pv-dbow"
    model = train(corpus, params, workers=args.workers)
    out = Path(args.out) if args.out else (
        cfg.data_dir / "models" / f"{arch}.bin"
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)
    print(
        f"trained {arch} on {len(corpus)} docs"
        f" (test split holds {len(split.test_ids)}),"
        f" vocab {len(model.vocab)}, saved {out}"
    )


def cmd_grid_search(args) -> None:
    cfg = _config(args)
    store = DocumentStore(cfg.store_dir)
    spec = load_grid_spec(args.grid) if args.grid else default_grid_spec()
    base = HyperParams()
    overrides = {
        key: getattr(args, key)
        for key in ("epochs", "min_count", "negative")
        if getattr(args, key) is not None
    }
    if overrides:
        base = replace(base, **overrides)
    outcome = run_grid_search(
        store,
        args.sample_size,
        args.train_fraction,
        spec,
        workers=args.workers,
        seed=args.seed,
        k=args.k,
        base_params=base,
    )
    out = Path(args.out) if args.out else cfg.eval_dir / "grid.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_grid_tsv(outcome, out)
    for label, best in (("pv-dbow", outcome.best_dbow), ("pv-dm", outcome.best_dm)):
        if best is None:
            print(f"{label}: no scored combination")
        else:
            print(f"{label}: accuracy {best.accuracy:.2f} with {best.params}")
    print(f"grid written to {out}")


def cmd_related(args) -> None:
    params = {"provider": args.provider, "k": args.k}
    if args.id is not None:
        params["id"] = args.id
    if args.text is not None:
        params["text"] = args.text
    with _client(args) as client:
        body = _check(client.get("/related", params=params))
    note = " (scores normalized)" if body["normalized"] else ""
    print(f"query={body['query_id']} provider={body['provider']}{note}")
    for pos, entry in enumerate(body["neighbors"], start=1):
        title = entry["title"] or ""
        print(f"{pos}\t{entry['id']}\t{entry['score']:.6f}\t{title}")
    if body["truncated"]:
        print(f"(fewer than k={body['k']} neighbors available)")


def cmd_eval(args) -> None:
    task = args.task or args.task_opt
    if not task:
        raise SystemExit("eval: a task is required (positional or --task)")
    if args.task and args.task_opt and args.task != args.task_opt:
        raise SystemExit("eval: conflicting task arguments")
    if getattr(args, "model", None):
        if args.provider == "pv-dm":
            args.dm_model = args.model
        elif args.provider == "pv-dbow":
            args.dbow_model = args.model
        else:
            raise SystemExit("--model only applies to embedding providers")
    payload = {
        "provider": args.provider,
        "n_samples": args.n_samples,
    }
    if args.n_docs is not None:
        payload["n_docs"] = args.n_docs
    if args.k is not None:
        payload["k"] = args.k
    if args.seed is not None:
        payload["seed"] = args.seed
    with _client(args) as client:
        body = _check(client.post(f"/eval/{task}", json=payload))
    slope = body["slope"]
    slope_txt = "nan" if slope is None else f"{slope:.6g}"
    print(
        f"task={body['task']} provider={body['provider']}"
        f" points={body['n_points']} skipped={body['skipped']}"
        f" slope={slope_txt}"
    )
    print(f"series: {body['series_path']}")
    print(f"summary: {body['summary_path']}")


def cmd_pmra(args) -> None:
    pmid = args.pmid if args.pmid is not None else args.pmid_opt
    if pmid is None:
        raise SystemExit("pmra: a PMID is required (positional or --pmid)")
    cfg = _config(args)
    client = PmraClient(
        rate=cfg.elink_rate,
        api_key=cfg.elink_api_key,
        cache_dir=cfg.pmra_cache_dir,
        fixture_dir=cfg.pmra_fixtures,
        offline=args.offline,
    )
    try:
        nl = client.fetch_pmra_neighbors(pmid, args.k)
    except PmraTransportError as exc:
        raise SystemExit(f"error: {exc}")
    scores = [s for _, s in nl.neighbors]
    if not args.raw and len(set(scores)) >= 2:
        scores = normalize_scores(scores)
    for (doc_id, _), score in zip(nl.neighbors, scores):
        print(f"{doc_id}\t{score:.10g}")
    if nl.truncated:
        print(f"(fewer than k={args.k} neighbors available)", file=sys.stderr)


def cmd_session_create(args) -> None:
    payload = {
        "n_queries": args.n_queries,
        "k": args.k,
        "seed": args.seed,
        "providers": args.providers,
    }
    if args.session_id:
        payload["session_id"] = args.session_id
    with _client(args) as client:
        body = _check(client.post("/sessions", json=payload))
    print(f"session {body['session_id']} ({body['status']})")
    for query in body["queries"]:
        print(
            f"  {query['query_id']}\t{query['n_candidates']} candidates"
            f"\t{query['title']}"
        )


def cmd_session_show(args) -> None:
    with _client(args) as client:
        if args.query:
            body = _check(
                client.get(
                    f"/sessions/{args.session_id}/queries/{args.query}/candidates"
                )
            )
            print(f"{body['query_id']}\t{body['title']}")
            for card in body["candidates"]:
                print(f"  {card['candidate_id']}\t{card['title']}")
        else:
            body = _check(client.get(f"/sessions/{args.session_id}"))
            print(f"session {body['session_id']} ({body['status']})")
            for query in body["queries"]:
                print(
                    f"  {query['query_id']}\t{query['n_candidates']}"
                    f" candidates\t{query['title']}"
                )


def cmd_agreement(args) -> None:
    with _client(args) as client:
        body = _check(client.get(f"/sessions/{args.session_id}/agreement"))
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
        return
    print(f"evaluators: {', '.join(body['evaluators'])}")
    print(f"records: {body['n_records']}")
    kappa = body["kappa_mean"]
    print("kappa mean: " + ("n/a" if kappa is None else f"{kappa:.4f}"))
    conc = body["concordance"]
    if conc["mean"] is not None:
        line = f"concordance mean: {conc['mean']:.4f}"
        if conc["lo"] is not None:
            line += f" (95% CI {conc['lo']:.4f}..{conc['hi']:.4f})"
        print(line)
    for name, summary in sorted(body["models"].items()):
        print(
            f"model {name}: n={summary['n']}"
            f" full={summary['full']} partial={summary['partial']}"
            f" bad={summary['bad']} mean_rank={summary['mean_rank']:.2f}"
        )


def cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(_config(args)), host=args.host, port=args.port)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--data-dir", help="override the data directory")
    parser.add_argument(
        "--store", help="document store directory (default: <data-dir>/store)"
    )
    parser.add_argument("--dbow-model", help="PV-DBOW model file")
    parser.add_argument("--dm-model", help="PV-DM model file")


def _add_url(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--url", help="base URL of a running server (default: in-process)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relart", description="related-article retrieval toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse citation XML into the store")
    _add_common(p)
    p.add_argument("files", nargs="*", help="citation XML files")
    p.add_argument(
        "--in", dest="in_files", nargs="+", metavar="FILE",
        help="citation XML files (same as positional)",
    )
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a paragraph-vector model")
    _add_common(p)
    p.add_argument("--arch", choices=sorted(ARCH_DM))
    p.add_argument(
        "--params", help="TOML file of hyperparameters; flags override it"
    )
    p.add_argument("--vector-size", type=int, help="default 128")
    p.add_argument("--sample", type=float, help="default 1e-4")
    p.add_argument("--alpha", type=float, help="default 0.025")
    p.add_argument("--window", type=int, help="default 5")
    p.add_argument("--hs", type=int, choices=(0, 1), help="default 1")
    p.add_argument("--epochs", type=int, help="default 10")
    p.add_argument("--negative", type=int, help="default 5")
    p.add_argument("--min-count", type=int, help="default 5")
    p.add_argument("--seed", type=int, help="default 1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--test-fraction", type=float, default=0.5)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--out", help="model output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("grid-search", help="hyperparameter sweep")
    _add_common(p)
    p.add_argument("--sample-size", "--sample", type=int, required=True)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--grid", help="grid TOML (default: built-in full grid)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--epochs", type=int, help="override base epochs")
    p.add_argument("--min-count", type=int, help="override base min_count")
    p.add_argument("--negative", type=int, help="override base negative")
    p.add_argument("--out", help="result TSV path")
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("related", help="query neighbors for a doc or text")
    _add_common(p)
    _add_url(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--id", type=int, help="stored document id")
    group.add_argument("--text", help="free-text query")
    p.add_argument("--provider", default="pv-dbow")
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(func=cmd_related)

    p = sub.add_parser("eval", help="run an automatic evaluation task")
    _add_common(p)
    _add_url(p)
    TASKS = ("length", "words", "stems", "mesh")
    p.add_argument("task", nargs="?", choices=TASKS)
    p.add_argument("--task", dest="task_opt", choices=TASKS)
    p.add_argument("--provider", default="pv-dbow")
    p.add_argument("--model", help="embedding model file override")
    p.add_argument("--n-docs", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-samples", type=int, default=500)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pmra", help="fetch neighbors from the eLink service")
    _add_common(p)
    p.add_argument("pmid", nargs="?", type=int)
    p.add_argument("--pmid", dest="pmid_opt", type=int)
    p.add_argument("-k", "--k", type=int, default=10)
    p.add_argument(
        "--raw", action="store_true", help="print raw scores, not normalized"
    )
    p.add_argument(
        "--offline", action="store_true",
        help="never contact the live service (fixtures/cache only)",
    )
    p.set_defaults(func=cmd_pmra)

    p = sub.add_parser("session", help="blind rating sessions")
    session_sub = p.add_subparsers(dest="session_command", required=True)

    q = session_sub.add_parser("create", help="create a rating session")
    _add_common(q)
    _add_url(q)
    q.add_argument("--n-queries", type=int, default=10)
    q.add_argument("--k", type=int, default=10)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument(
        "--providers", nargs="+", default=["pv-dbow", "pmra"],
    )
    q.add_argument("--session-id")
    q.set_defaults(func=cmd_session_create)

    q = session_sub.add_parser("show", help="show a session or one query")
    _add_common(q)
    _add_url(q)
    q.add_argument("session_id")
    q.add_argument("--query", help="query id to expand")
    q.set_defaults(func=cmd_session_show)

    p = sub.add_parser("agreement", help="inter-evaluator agreement report")
    _add_common(p)
    _add_url(p)
    p.add_argument("session_id")
    p.add_argument("--json", action="store_true", help="print the raw report")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
