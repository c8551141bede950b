"""Command-line entry points: serve, ingest, fixture, export-hierarchy.

Every option can be overridden by an environment variable with the same
name uppercased and prefixed SCRIPTORIUM_ (e.g. SCRIPTORIUM_DATA_DIR).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import load_corpus, parse_stopwords
from .engine import Workspace
from .fixture import DEFAULT_SHARED_FRACTION, generate_fixture
from .hierarchy import save_hierarchy

ENV_PREFIX = "SCRIPTORIUM_"


def _env_default(name: str, fallback):
    value = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    return value if value is not None else fallback


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scriptorium")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service over a data directory")
    serve.add_argument("--data-dir", default=_env_default("data_dir", None), required=_env_default("data_dir", None) is None)
    serve.add_argument("--port", type=int, default=int(_env_default("port", 8000)))
    serve.add_argument("--host", default=_env_default("host", "127.0.0.1"))
    serve.add_argument("--stopwords", default=_env_default("stopwords", None))
    serve.add_argument("--debounce-ms", type=int, default=int(_env_default("debounce_ms", 2000)))
    serve.add_argument("--frontend", default=_env_default("frontend", None),
                       help="directory of built UI assets to serve under /ui")

    ingest = sub.add_parser("ingest", help="load and validate a corpus manifest")
    ingest.add_argument("--manifest", default=_env_default("manifest", None), required=_env_default("manifest", None) is None)

    fixture = sub.add_parser("fixture", help="generate a synthetic corpus fixture")
    fixture.add_argument("--seed", type=int, default=int(_env_default("seed", 7)))
    fixture.add_argument("--out", default=_env_default("out", None), required=_env_default("out", None) is None)
    fixture.add_argument("--manuscripts", type=int, default=12)
    fixture.add_argument("--images", type=int, default=200)
    fixture.add_argument("--labels", type=int, default=80)
    fixture.add_argument("--dim", type=int, default=16)
    fixture.add_argument("--shared-fraction", type=float, default=DEFAULT_SHARED_FRACTION)
    fixture.add_argument("--hierarchy-terms", type=int, default=0)

    export = sub.add_parser("export-hierarchy", help="export the hierarchy (with history applied) as JSON")
    export.add_argument("--data-dir", default=_env_default("data_dir", None), required=_env_default("data_dir", None) is None)
    export.add_argument("--out", default=_env_default("out", None), required=_env_default("out", None) is None)

    return parser


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data_dir)
    manifest = data_dir / "manifest.json"
    if not manifest.exists():
        print(f"no manifest.json under {data_dir}", file=sys.stderr)
        return 2
    corpus = load_corpus(manifest)
    if args.stopwords:
        with open(args.stopwords, encoding="utf-8") as fh:
            corpus.stopwords = parse_stopwords(fh)
    workspace = Workspace(corpus, data_dir=data_dir)
    app = create_app(workspace, debounce_ms=args.debounce_ms, static_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.manifest)
    print(json.dumps(corpus.summary(), indent=2, ensure_ascii=False))
    return 0


def cmd_fixture(args) -> int:
    manifest = generate_fixture(
        seed=args.seed,
        n_manuscripts=args.manuscripts,
        n_images=args.images,
        n_labels=args.labels,
        dim=args.dim,
        out_dir=args.out,
        shared_fraction=args.shared_fraction,
        hierarchy_terms=args.hierarchy_terms,
    )
    print(manifest)
    return 0


def cmd_export_hierarchy(args) -> int:
    data_dir = Path(args.data_dir)
    corpus = load_corpus(data_dir / "manifest.json")
    workspace = Workspace(corpus, data_dir=data_dir)
    save_hierarchy(workspace.hierarchy, args.out)
    workspace.close()
    print(args.out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    commands = {
        "serve": cmd_serve,
        "ingest": cmd_ingest,
        "fixture": cmd_fixture,
        "export-hierarchy": cmd_export_hierarchy,
    }
    return commands[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
