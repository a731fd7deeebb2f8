"""Command line: init-checkpoint, serve, batch.

Exit codes: 0 on success, 1 on any service or input error.
"""

from __future__ import annotations

import argparse
import sys

from .batch import embed_file
from .checkpoint import (LoadedCheckpoint, init_checkpoint, load_checkpoint,
                         pinned_hash)
from .engine import DEFAULT_CHUNK_SIZE, DEFAULT_MAX_TOKENS, EmbedEngine
from .errors import EmbedsvcError
from .service import DEFAULT_MODEL_ID, ServiceSettings, create_app


def _load_engine(args) -> EmbedEngine:
    expected = pinned_hash(args.checkpoint, args.sha256)
    checkpoint: LoadedCheckpoint = load_checkpoint(args.checkpoint,
                                                   expected)
    return EmbedEngine(checkpoint, args.model_id)


def _cmd_init(args) -> int:
    digest = init_checkpoint(args.out, seed=args.seed)
    print(f"wrote checkpoint to {args.out}; sha256 {digest}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    settings = ServiceSettings(
        checkpoint_dir=args.checkpoint,
        pinned_sha256=pinned_hash(args.checkpoint, args.sha256),
        model_id=args.model_id)
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_batch(args) -> int:
    engine = _load_engine(args)
    summary = embed_file(engine, args.input, args.out,
                         resume=args.resume,
                         max_tokens=args.max_tokens,
                         chunk_size=args.chunk_size)
    print(f"wrote {args.out}: {summary.written} rows embedded, "
          f"{summary.skipped} skipped, resumed from row "
          f"{summary.resumed_from}")
    return 0


def _add_checkpoint_flags(parser) -> None:
    parser.add_argument("--checkpoint", required=True,
                        help="checkpoint directory")
    parser.add_argument("--sha256",
                        help="pinned weight hash; defaults to the "
                             "checkpoint.sha256 sidecar")
    parser.add_argument("--model-id", dest="model_id",
                        default=DEFAULT_MODEL_ID)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedsvc",
        description="chunked discharge-summary embedding service")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    init = sub.add_parser("init-checkpoint")
    init.add_argument("--out", required=True)
    init.add_argument("--seed", type=int, default=0)
    init.set_defaults(_handler=_cmd_init)

    serve = sub.add_parser("serve")
    _add_checkpoint_flags(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(_handler=_cmd_serve)

    batch = sub.add_parser("batch")
    batch.add_argument("--in", dest="input", required=True)
    batch.add_argument("--out", required=True)
    batch.add_argument("--resume", action="store_true")
    batch.add_argument("--max-tokens", dest="max_tokens", type=int,
                       default=DEFAULT_MAX_TOKENS)
    batch.add_argument("--chunk-size", dest="chunk_size", type=int,
                       default=DEFAULT_CHUNK_SIZE)
    _add_checkpoint_flags(batch)
    batch.set_defaults(_handler=_cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args._handler(args)
    except (EmbedsvcError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
