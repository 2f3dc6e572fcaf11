"""Command line front end: ``acs compress|decompress|info|bench``.

Exit status: 0 success, 1 usage error, 2 bad container, 3 I/O error.
Use ``-`` for stdin or stdout.
"""

from __future__ import annotations

import argparse
import sys

from . import bench
from .coder import CoderConfig
from .container import FormatError, compress, decompress, info
from .model import PrecisionError
from .search import DEFAULT_KT, STRATEGIES

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def _write(path: str, data: bytes):
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as f:
            f.write(data)


def _cmd_compress(args) -> int:
    mode = args.mode
    if args.period is not None:
        if mode not in ("adaptive", "periodic"):
            raise UsageError("--period applies to -m adaptive")
        if args.period < 1:
            raise UsageError("--period must be positive")
        mode = "periodic"
    try:
        blob = compress(_read(args.input), mode=mode, D=args.D, P=args.P, period=args.period)
    except (PrecisionError, ValueError) as e:
        if isinstance(e, OSError):
            raise
        raise UsageError(str(e)) from None
    _write(args.output, blob)
    return EXIT_OK


def _cmd_decompress(args) -> int:
    search = "lookup" if args.lookup is not None else args.search
    _write(args.output, decompress(_read(args.input), search=search, K_t=args.lookup or DEFAULT_KT))
    return EXIT_OK


def _cmd_info(args) -> int:
    rep = info(_read(args.input))
    for key, value in rep.items():
        if value is None:
            continue
        print(f"{key}\t{value:.4f}" if isinstance(value, float) else f"{key}\t{value}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    p = [float(x) for x in args.probs.split(",")]
    sources = [bench.Source.from_probs(args.source_name, p, args.N, args.seed)]
    strategies = args.strategy or list(bench.DEFAULT_STRATEGIES)
    configs = [CoderConfig(D, args.P) if args.P else CoderConfig.default_for(D) for D in args.D]
    reports = bench.run_matrix(sources, strategies, configs, repeats=args.repeats)
    sys.stdout.write(bench.format_table(reports) if args.table else bench.format_tsv(reports))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="acs", description="Arithmetic-coding compressor.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compress", help="compress a file")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("-m", "--mode", choices=["static", "adaptive", "tree", "binary", "periodic"], default="tree")
    c.add_argument("-D", type=int, choices=[2, 4, 16, 256], default=256, help="output radix")
    c.add_argument("-P", type=int, default=None, help="register digits (default: 32-bit registers)")
    c.add_argument("--period", type=int, default=None, help="rebuild the model every R symbols (adaptive mode)")
    c.set_defaults(func=_cmd_compress)

    d = sub.add_parser("decompress", help="restore a compressed file")
    d.add_argument("input")
    d.add_argument("output")
    d.add_argument("--search", choices=sorted(STRATEGIES), default="bisection", help="decoder symbol search")
    d.add_argument("--lookup", type=int, default=None, metavar="K_t", help="lookup-table search with K_t entries")
    d.set_defaults(func=_cmd_decompress)

    i = sub.add_parser("info", help="describe a compressed file")
    i.add_argument("input")
    i.set_defaults(func=_cmd_info)

    b = sub.add_parser("bench", help="run the strategy matrix on a synthetic source")
    b.add_argument("--probs", default="0.2,0.5,0.2,0.1", help="comma-separated source probabilities")
    b.add_argument("--source-name", default="four")
    b.add_argument("-N", type=int, default=20000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-D", type=int, nargs="+", choices=[2, 4, 16, 256], default=[256])
    b.add_argument("-P", type=int, default=None)
    b.add_argument("--strategy", action="append", help="strategy id (repeatable)")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--table", action="store_true", help="human-readable table instead of TSV")
    b.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"acs: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"acs: invalid container: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as e:
        print(f"acs: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
