"""Command-line gateway covering the full lifecycle.

State (knowledge base, profiles, trained model) lives in a state
directory that every mutating subcommand loads, updates, and saves.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classification import LabeledExample, evaluate
from .config import load_config, with_state_dir
from .engine import Engine
from .errors import SemvidError
from .ingestion import (
    crawl,
    extract,
    load_descriptor,
    record_to_dict,
    save_links,
    summarize,
)
from .pipeline import STRATEGIES, result_payload


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="semvid",
        description="Semantic video indexing and retrieval engine.")
    p.add_argument("--config", default=None, help="path to a JSON config file")
    p.add_argument("--state", default=None,
                   help="state directory (default from config)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("crawl", help="discover descriptor links from seed pages")
    c.add_argument("--seeds", nargs="+", required=True)
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--pattern", default="*.json")
    c.add_argument("--out", default=None, help="links file (JSON lines)")

    c = sub.add_parser("ingest", help="extract descriptors into the store")
    c.add_argument("--descriptors", nargs="+", required=True,
                   help="descriptor files or directories")

    c = sub.add_parser("train", help="train concept detectors from labels")
    c.add_argument("--corpus", required=True,
                   help="directory holding <doc_id>.json descriptors")
    c.add_argument("--labels", required=True,
                   help="JSON-lines file of {doc_id, concept_id}")

    c = sub.add_parser("adduser", help="create a user avatar")
    c.add_argument("--user", required=True)
    c.add_argument("--country", default="??")
    c.add_argument("--language", default="en")

    c = sub.add_parser("query", help="run a retrieval query")
    c.add_argument("--user", required=True)
    c.add_argument("--domain", required=True)
    c.add_argument("--text", required=True)
    c.add_argument("--k", type=int, default=10)
    c.add_argument("--strategy", default=None, choices=sorted(STRATEGIES))

    c = sub.add_parser("feedback", help="rate a returned document")
    c.add_argument("--user", required=True)
    c.add_argument("--doc", required=True)
    c.add_argument("--rating", type=float, required=True)

    c = sub.add_parser("suggest", help="suggestions for a user and domain")
    c.add_argument("--user", required=True)
    c.add_argument("--domain", required=True)
    c.add_argument("--k", type=int, default=5)

    sub.add_parser("reorganize", help="evaporate trails and migrate tiers")
    sub.add_parser("stats", help="tier counts and mean trail levels")

    c = sub.add_parser("doc", help="show a stored record with its storyboard")
    c.add_argument("--id", required=True)

    c = sub.add_parser("serve", help="run the HTTP API")
    c.add_argument("--host", default=None)
    c.add_argument("--port", type=int, default=None)

    return p


def _descriptor_files(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            out.extend(sorted(path.glob("*.json")))
        else:
            out.append(path)
    return out


def _load_examples(corpus: Path, labels_path: Path,
                   shot_theta: float) -> list[LabeledExample]:
    examples = []
    for line in Path(labels_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        record = extract(load_descriptor(corpus / f"{row['doc_id']}.json"),
                         shot_theta)
        examples.append(LabeledExample(record=record,
                                       concept_id=row["concept_id"]))
    return examples


def _dispatch(args: argparse.Namespace) -> dict | list | None:
    if args.command == "crawl":
        records = crawl(args.seeds, args.depth, args.pattern)
        if args.out:
            save_links(records, args.out)
        return [{"uri": r.uri, "discovered_at": r.discovered_at,
                 "status": r.status} for r in records]

    config = load_config(args.config)
    if args.state:
        config = with_state_dir(config, args.state)
    engine = Engine(config)
    engine.load_state(config.state_dir)

    if args.command == "ingest":
        result = engine.ingest(_descriptor_files(args.descriptors))
        engine.save_state(config.state_dir)
        return {**result, "failures": engine.failures}
    if args.command == "train":
        examples = _load_examples(Path(args.corpus), Path(args.labels),
                                  config.shot_theta)
        model = engine.train(examples)
        engine.save_state(config.state_dir)
        return {"concepts": model.concept_ids,
                "train_accuracy": evaluate(model, examples)}
    if args.command == "adduser":
        profile = engine.add_user(args.user, args.country, args.language)
        engine.save_state(config.state_dir)
        return {"user": profile.user_id,
                "memberships": profile.memberships}
    if args.command == "query":
        results, report = engine.query(args.user, args.domain, args.text,
                                       args.k, strategy=args.strategy)
        engine.save_state(config.state_dir)
        return result_payload(results, report)
    if args.command == "feedback":
        tau = engine.feedback(args.user, args.doc, args.rating)
        engine.save_state(config.state_dir)
        return {"tau": tau}
    if args.command == "suggest":
        return [{"text": s.text, "source": s.source}
                for s in engine.suggest(args.user, args.domain, args.k)]
    if args.command == "reorganize":
        moves = engine.reorganize()
        engine.save_state(config.state_dir)
        return [{"doc_id": d, "from": a.value, "to": b.value}
                for d, a, b in moves]
    if args.command == "stats":
        stats = engine.stats()
        return {"counts": stats.counts, "total": stats.total,
                "mean_tau": stats.mean_tau}
    if args.command == "doc":
        doc = engine.kb.get(args.id)
        board = summarize(doc.record, max(1, len(doc.record.shots)))
        return {"record": record_to_dict(doc.record),
                "tier": doc.tier.value, "tau": doc.tau,
                "storyboard": [{"shot": s, "frame": f, "hist": list(h)}
                               for s, f, h in board.keyframes]}
    if args.command == "serve":
        import uvicorn

        from .api import create_app
        uvicorn.run(create_app(engine),
                    host=args.host or config.host,
                    port=args.port or config.port)
        return None
    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = _dispatch(args)
    except SemvidError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if out is not None:
        print(json.dumps(out, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
