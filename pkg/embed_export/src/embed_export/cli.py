"""Command line mirror of :class:`embed_export.exporter.ExportSpec`.

Exit codes: 0 success, 1 usage errors, 2 data errors.
"""

from __future__ import annotations

import argparse
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embed-export", description=__doc__)
    parser.add_argument("--model", required=True, help="model directory or identifier")
    parser.add_argument("--treebank", required=True, help="input treebank path")
    parser.add_argument("--format", dest="fmt", choices=("conllu", "brackets"), default="conllu")
    parser.add_argument("--setup", choices=("frozen", "random"), default="frozen")
    parser.add_argument("--layer", type=int, default=-1,
                        help="hidden-state index, -1 = last layer (default)")
    parser.add_argument("--seed", type=int, default=None,
                        help="initializer seed; required for --setup random")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--out", required=True, help="output EMB1 path")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    from embed_export.exporter import ExportSpec, export

    try:
        spec = ExportSpec(
            model=args.model,
            treebank=args.treebank,
            out=args.out,
            fmt=args.fmt,
            setup=args.setup,
            layer=args.layer,
            seed=args.seed,
            batch_size=args.batch_size,
        )
    except ValueError as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return 1

    try:
        result = export(spec)
    except (OSError, ValueError) as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return 2

    print(f"wrote {result.written} sentences (dim {result.dim}) to {args.out}")
    if result.skipped:
        print(f"skipped {len(result.skipped)} sentences:", file=sys.stderr)
        for sent_id, reason in result.skipped:
            print(f"  {sent_id}: {reason}", file=sys.stderr)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
