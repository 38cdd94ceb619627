"""Command-line entry: pyadapter --model <spec> --classes C [--length N] [--tcp addr | --stdio]."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .loader import AdapterError, resolve_model
from .server import AdapterConfig, serve_stdio, serve_tcp

EXIT_OK = 0
EXIT_CONFIG = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyadapter",
        description="Serve a Python batch-probability callable over the external-predictor wire protocol.",
    )
    parser.add_argument(
        "--model",
        required=True,
        help="callable spec, 'package.module:fn' or 'path/to/file.py:fn'",
    )
    parser.add_argument("--classes", type=int, required=True, help="number of classes declared in the handshake")
    parser.add_argument(
        "--length",
        type=int,
        default=0,
        help="series length declared in the handshake, 0 means any length (default 0)",
    )
    parser.add_argument("--batch-limit", type=int, default=1024, help="largest batch accepted (default 1024)")
    transport = parser.add_mutually_exclusive_group()
    transport.add_argument("--stdio", action="store_true", help="serve on stdin/stdout (default)")
    transport.add_argument("--tcp", metavar="HOST:PORT", help="serve on a TCP socket, port 0 picks a free port")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        model = resolve_model(args.model)
        config = AdapterConfig(
            model=model,
            n_classes=args.classes,
            series_length=args.length if args.length != 0 else None,
            batch_limit=args.batch_limit,
        )
        if args.tcp:
            return serve_tcp(config, args.tcp)
        return serve_stdio(config)
    except AdapterError as exc:
        print(f"pyadapter: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
