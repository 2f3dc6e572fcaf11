"""Throughput, operation counts and compression efficiency.

A cell is (source, strategy, config). Each cell encodes the source once
with operation counting, decodes it with counting (and checks the result),
then times undisturbed decodes: one warmup and the median of five runs.

Strategy ids are ``mode`` or ``mode/search``: ``static/bisection``,
``static/lookup``, ``adaptive/sequential``, ``tree``, ``binary``,
``periodic/quantile`` and so on. Static cells use a two-pass model built
from the source's own histogram.

TSV records have the columns of :data:`COLUMNS`, in that order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .coder import CoderConfig, OpCounter
from .container import decode_symbols, encode_symbols
from .model import StaticDistribution, entropy, scale_counts

__all__ = [
    "COLUMNS",
    "Source",
    "BenchReport",
    "SweepPoint",
    "run_cell",
    "run_matrix",
    "efficiency_sweep",
    "min_precision_for_ratio",
    "format_tsv",
    "format_table",
    "DEFAULT_STRATEGIES",
]

COLUMNS = (
    "source",
    "strategy",
    "D",
    "P",
    "N",
    "symbols_per_sec",
    "info_bits_per_sec",
    "probes_per_symbol",
    "divisions_per_symbol",
    "multiplications_per_symbol",
    "additions_per_symbol",
    "bits_per_symbol",
    "entropy",
    "overhead_bits",
    "payload_digits",
)

DEFAULT_STRATEGIES = (
    "static/sequential",
    "static/bisection",
    "static/optimal",
    "static/quantile",
    "static/lookup",
    "adaptive/bisection",
    "tree",
    "binary",
    "periodic/bisection",
)

FIXED_HEADER_BYTES = 19


@dataclass(frozen=True)
class Source:
    """I.i.d. symbols drawn from ``p`` with a fixed seed."""

    name: str
    p: tuple
    N: int
    seed: int = 0

    @classmethod
    def from_probs(cls, name: str, p: Sequence, N: int, seed: int = 0) -> "Source":
        return cls(name, tuple(float(x) for x in StaticDistribution(p).p), N, seed)

    @property
    def M(self) -> int:
        return len(self.p)

    def symbols(self) -> list[int]:
        rng = np.random.default_rng(self.seed)
        p = np.asarray(self.p, dtype=float)
        return rng.choice(len(p), size=self.N, p=p / p.sum()).tolist()

    def entropy(self) -> float:
        return entropy(self.p)


@dataclass
class BenchReport:
    source: str
    strategy: str
    D: int
    P: int
    N: int
    symbols_per_sec: float
    info_bits_per_sec: float
    probes_per_symbol: float
    divisions_per_symbol: float
    multiplications_per_symbol: float
    additions_per_symbol: float
    bits_per_symbol: float
    entropy: float
    overhead_bits: int
    payload_digits: int
    checks: dict = field(default_factory=dict)

    def row(self) -> list:
        d = asdict(self)
        return [d[c] for c in COLUMNS]


def _split(strategy: str):
    mode, _, search = strategy.partition("/")
    return mode, search or "bisection"


def run_cell(source: Source, strategy: str, config: CoderConfig, repeats: int = 5, warmup: int = 1) -> BenchReport:
    """Measure one cell; raises AssertionError if decoding fails."""
    mode, search = _split(strategy)
    symbols = source.symbols()
    M = source.M
    dist = None
    overhead = FIXED_HEADER_BYTES
    if mode == "static":
        dist = scale_counts(np.bincount(symbols, minlength=M).tolist(), config.P, config.D)
        overhead += 4 + 4 * M
    elif mode == "periodic":
        overhead += 4
    enc_ops = OpCounter()
    digits = encode_symbols(symbols, M, mode, config, dist, ops=enc_ops)
    dec_ops = OpCounter()
    out, needed = decode_symbols(digits, len(symbols), M, mode, config, dist, search=search, ops=dec_ops)
    if out != symbols or needed != len(digits):
        raise AssertionError(f"{strategy} failed to round-trip on {source.name}")

    times = []
    for i in range(warmup + repeats):
        t0 = time.perf_counter()
        decode_symbols(digits, len(symbols), M, mode, config, dist, search=search)
        if i >= warmup:
            times.append(time.perf_counter() - t0)
    t = float(np.median(times)) if times else float("nan")
    N = max(len(symbols), 1)
    H = source.entropy()
    per = dec_ops.per_symbol()
    report = BenchReport(
        source=source.name,
        strategy=strategy,
        D=config.D,
        P=config.P,
        N=len(symbols),
        symbols_per_sec=N / t,
        info_bits_per_sec=H * N / t,
        probes_per_symbol=per["probes"],
        divisions_per_symbol=per["divisions"],
        multiplications_per_symbol=per["multiplications"],
        additions_per_symbol=per["additions"],
        bits_per_symbol=len(digits) * config.r / N,
        entropy=H,
        overhead_bits=8 * overhead,
        payload_digits=len(digits),
    )
    report.checks = _checks(report, mode, search, M)
    return report


def _checks(r: BenchReport, mode: str, search: str, M: int) -> dict:
    """Complexity claims that must hold exactly for the counted operations."""
    log2M = math.ceil(math.log2(M))
    checks = {}
    if mode in ("static", "periodic") and search == "bisection":
        checks["bisection probes <= ceil(log2 M)"] = r.probes_per_symbol <= log2M
    if mode == "static" and search == "sequential":
        checks["sequential probes <= M"] = r.probes_per_symbol <= M
    if mode in ("static", "periodic") and search == "lookup":
        checks["lookup probes <= ceil(log2 M)"] = r.probes_per_symbol <= log2M
    if mode in ("static", "periodic") and search == "optimal":
        checks["optimal probes <= M - 1"] = r.probes_per_symbol <= M - 1
    if mode in ("static", "periodic") and search == "quantile":
        checks["quantile probes <= ceil(log2 M) + 2"] = r.probes_per_symbol <= log2M + 2
    if mode == "tree":
        checks["tree additions <= log2 M + 2"] = r.additions_per_symbol <= log2M + 2
        checks["tree divisions == 1"] = r.divisions_per_symbol == 1
    if mode == "binary":
        checks["binary divisions <= ceil(log2 M)"] = r.divisions_per_symbol <= log2M
    if mode == "adaptive":
        checks["adaptive additions <= M"] = r.additions_per_symbol <= M
    if mode == "periodic":
        checks["periodic divisions <= 1"] = r.divisions_per_symbol <= 1
    return checks


def _run(args):
    return run_cell(*args)


def _threads() -> int:
    value = os.environ.get("ACS_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_matrix(
    sources: Sequence[Source],
    strategies: Sequence[str] = DEFAULT_STRATEGIES,
    configs: Sequence[CoderConfig] = (CoderConfig(),),
    repeats: int = 5,
    threads: int | None = None,
    strict: bool = True,
) -> list[BenchReport]:
    """One report per (source, strategy, config) cell, in that nesting order.

    Cells run in up to ``threads`` processes (default: ``ACS_THREADS`` or
    the CPU count). With ``strict`` a failed complexity check raises.
    """
    cells = [(src, strat, cfg, repeats) for src in sources for strat in strategies for cfg in configs]
    cap = _threads()
    workers = min(threads or cap, cap, len(cells)) if cells else 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run, cells))
    else:
        reports = [_run(c) for c in cells]
    if strict:
        for r in reports:
            failed = [k for k, ok in r.checks.items() if not ok]
            if failed:
                raise AssertionError(f"{r.strategy} on {r.source}: {', '.join(failed)}")
    return reports


@dataclass
class SweepPoint:
    D: int
    P: int
    bits_per_symbol: float  # all payload digits
    coded_bits: float  # without the two terminating digits
    model_bits: float  # ideal code length under the scaled model
    entropy: float

    @property
    def leakage(self) -> float:
        """Bits per symbol lost to truncated products."""
        return self.coded_bits - self.model_bits


def efficiency_sweep(dist, N: int, configs: Sequence[CoderConfig], seed: int = 0) -> list[SweepPoint]:
    """Bits per symbol of a static coder using ``dist`` itself, per config."""
    if N < 1000:
        raise ValueError("use N >= 1000")
    dist = dist if isinstance(dist, StaticDistribution) else StaticDistribution(dist)
    src = Source("sweep", tuple(float(x) for x in dist.p), N, seed)
    symbols = src.symbols()
    hist = np.bincount(symbols, minlength=dist.M)
    H = entropy(dist)
    out = []
    for cfg in configs:
        scaled = dist.scaled(cfg.P, cfg.D)
        digits = encode_symbols(symbols, dist.M, "static", cfg, scaled)
        f = np.asarray(scaled.frequencies(), dtype=float)
        model_bits = float(np.sum(hist * (cfg.width - np.log2(f)))) / N
        coded = (len(digits) - 2) * cfg.r / N
        out.append(SweepPoint(cfg.D, cfg.P, len(digits) * cfg.r / N, coded, model_bits, H))
    return out


def min_precision_for_ratio(dist, D: int, ratio: float = 1.001) -> int:
    """Smallest P for which truncation keeps every p/p' at or below ``ratio``.

    With L >= D**(P-1) a symbol of scaled frequency f keeps at least
    f - D of its f units, so the condition is f >= D * ratio / (ratio - 1).
    """
    dist = dist if isinstance(dist, StaticDistribution) else StaticDistribution(dist)
    need = D * ratio / (ratio - 1)
    P = 2
    while True:
        try:
            f = dist.scaled(P, D).frequencies()
        except ValueError:
            f = [0]
        if min(f) >= need:
            return P
        P += 1


def format_tsv(reports: Sequence[BenchReport], header: bool = True) -> str:
    lines = ["\t".join(COLUMNS)] if header else []
    for r in reports:
        lines.append("\t".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in r.row()))
    return "\n".join(lines) + "\n"


def format_table(reports: Sequence[BenchReport]) -> str:
    """Human-readable summary."""
    head = f"{'source':<12} {'strategy':<20} {'D':>3} {'P':>3} {'sym/s':>10} {'probes':>7} {'div':>5} {'bits/sym':>9} {'H':>7}"
    lines = [head, "-" * len(head)]
    for r in reports:
        lines.append(
            f"{r.source:<12} {r.strategy:<20} {r.D:>3} {r.P:>3} {r.symbols_per_sec:>10.0f} "
            f"{r.probes_per_symbol:>7.3f} {r.divisions_per_symbol:>5.2f} {r.bits_per_symbol:>9.4f} {r.entropy:>7.4f}"
        )
    return "\n".join(lines) + "\n"
