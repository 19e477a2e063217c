"""Command line entry: one subcommand, ``export``.

    embexport export --input names.txt --model hash:256 \
        --out emb.bin --index emb.idx --batch-size 64

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .encoders import EncoderError
from .export import ExportJob, export_embeddings


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="embexport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="encode a text file into an EMB1 matrix")
    p.add_argument("--input", required=True, help="one string per line, order = row order")
    p.add_argument("--model", required=True,
                   help="sentence-transformers model id, or hash:<dim> for the builtin")
    p.add_argument("--out", required=True, help="EMB1 output path")
    p.add_argument("--index", required=True, help="row-order identifier file to write")
    p.add_argument("--ids", help="identifiers file, one per input line (default: the input)")
    p.add_argument("--batch-size", type=int, default=64)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.batch_size < 1:
        print("embexport: error: --batch-size must be >= 1", file=sys.stderr)
        return 1
    job = ExportJob(args.input, args.model, args.out, args.index,
                    batch_size=args.batch_size, ids_path=args.ids)
    try:
        rows, dim = export_embeddings(job)
    except (OSError, ValueError, EncoderError) as exc:
        print(f"embexport: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {rows} x {dim} floats to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
