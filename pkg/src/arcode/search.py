"""Decoder symbol search.

Every strategy answers the same question: given the decoder registers V and
L, which symbol s satisfies X(s) <= V < X(s+1), where
``X(s) = (L * C(s)) >> width`` are the encoder's truncated products. They
differ only in how many products ("probes") they compare against V. Each
strategy is built once per distribution and called as ``search(V, L)``,
returning ``(s, X, Y, probes)``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from .coder import (
    CoderConfig,
    Decoder,
    Encoder,
    OpCounter,
    interval_selection_bisection,
    interval_selection_sequential,
)
from .model import ScaledDistribution
from .trees import build_alphabetic_tree

__all__ = [
    "LookupTable",
    "QuantileIndex",
    "build_lookup",
    "build_quantile_index",
    "BisectionSearch",
    "SequentialSearch",
    "OptimalTreeSearch",
    "QuantileSearch",
    "LookupSearch",
    "STRATEGIES",
    "make_search",
    "probe_counter",
]

DEFAULT_KT = 16


@dataclass(frozen=True)
class LookupTable:
    """Symbol range for each of K_t equal slices of the normalised code value.

    ``entries[E] = (s_min, s_max)``: the symbols whose intervals meet
    [E/K_t, (E+1)/K_t).
    """

    K_t: int
    entries: tuple[tuple[int, int], ...]


def build_lookup(dist: ScaledDistribution, K_t: int = DEFAULT_KT) -> LookupTable:
    """Table of (s_min, s_max) per slice.

    s_min(E) is the s with c(s) <= E/K_t < c(s+1) and s_max(E) the s with
    c(s) < (E+1)/K_t <= c(s+1), evaluated exactly on the integer counts.

    >>> from arcode.model import StaticDistribution
    >>> d = StaticDistribution(['0.2', '0.5', '0.2', '0.1']).scaled(8, 2)
    >>> build_lookup(d, 8).entries[5]
    (1, 2)
    """
    if K_t < 2 or K_t & (K_t - 1):
        raise ValueError("K_t must be a power of two, at least 2")
    C = dist.C
    one = C[-1]
    scaled = [x * K_t for x in C]  # compare C(s) K_t against E * one
    entries = []
    for E in range(K_t):
        lo = bisect.bisect_right(scaled, E * one) - 1
        hi = bisect.bisect_left(scaled, (E + 1) * one) - 1
        entries.append((lo, hi))
    return LookupTable(K_t, tuple(entries))


@dataclass(frozen=True)
class QuantileIndex:
    """Symbols containing the dyadic points j / 2**levels, j = 1..2**levels - 1."""

    levels: int
    symbols: tuple[int, ...]

    def symbol(self, level: int, j: int) -> int:
        """Symbol containing j / 2**level."""
        return self.symbols[(j << (self.levels - level)) - 1]


def build_quantile_index(dist: ScaledDistribution, levels: int = 2) -> QuantileIndex:
    """Index of the symbols at the dyadic quantiles of ``dist``.

    Intended for distributions whose symbols are sorted by increasing
    probability, where the upper quantiles isolate the likely symbols.
    """
    if levels < 1:
        raise ValueError("levels must be positive")
    C = dist.C
    one = C[-1]
    den = 1 << levels
    scaled = [x * den for x in C]
    syms = tuple(bisect.bisect_right(scaled, j * one) - 1 for j in range(1, den))
    return QuantileIndex(levels, syms)


class BisectionSearch:
    name = "bisection"

    def __init__(self, dist: ScaledDistribution):
        self.C = dist.C
        self.width = (dist.D.bit_length() - 1) * dist.P

    def __call__(self, V: int, L: int):
        return interval_selection_bisection(V, L, self.C, self.width)


class SequentialSearch(BisectionSearch):
    name = "sequential"

    def __call__(self, V: int, L: int):
        return interval_selection_sequential(V, L, self.C, self.width)


class OptimalTreeSearch(BisectionSearch):
    """Walk the ordered tree of least expected depth for this distribution."""

    name = "optimal"

    def __init__(self, dist: ScaledDistribution):
        super().__init__(dist)
        self.tree = build_alphabetic_tree(dist.frequencies())

    def __call__(self, V: int, L: int):
        C, w = self.C, self.width
        left, right = self.tree.left, self.tree.right
        node = self.tree.root
        X, Y = 0, L
        probes = 0
        while node > 0:
            Z = (L * C[node]) >> w
            probes += 1
            if Z > V:
                Y = Z
                node = left[node]
            else:
                X = Z
                node = right[node]
        return ~node, X, Y, probes


def _finish(lo, X, Xkey, Y, Ykey, L, C, w):
    # recompute the boundary products that were skipped
    if Xkey != lo:
        X = (L * C[lo]) >> w
    if Ykey != lo + 1:
        Y = (L * C[lo + 1]) >> w
    return lo, X, Y


class QuantileSearch(BisectionSearch):
    """Split first at the symbols holding the dyadic quantiles, then bisect.

    A quantile key outside the remaining candidate range costs nothing; the
    range just moves on to the next quantile level.
    """

    name = "quantile"

    def __init__(self, dist: ScaledDistribution, levels: int = 2):
        super().__init__(dist)
        self.index = build_quantile_index(dist, levels)

    def __call__(self, V: int, L: int):
        C, w = self.C, self.width
        syms = self.index.symbols
        M = len(C) - 1
        lo, hi = 0, M
        X, Xkey, Y, Ykey = 0, 0, L, M
        probes = 0
        qlo, qhi = 0, 1 << self.index.levels
        while hi - lo > 1 and qhi - qlo > 1:
            qm = (qlo + qhi) >> 1
            m = syms[qm - 1]
            if m <= lo:
                qlo = qm
                continue
            if m >= hi:
                qhi = qm
                continue
            Z = (L * C[m]) >> w
            probes += 1
            if Z > V:
                hi, Y, Ykey, qhi = m, Z, m, qm
            else:
                lo, X, Xkey, qlo = m, Z, m, qm
        while hi - lo > 1:
            m = (lo + hi) >> 1
            Z = (L * C[m]) >> w
            probes += 1
            if Z > V:
                hi, Y, Ykey = m, Z, m
            else:
                lo, X, Xkey = m, Z, m
        return _finish(lo, X, Xkey, Y, Ykey, L, C, w) + (probes,)


class LookupSearch(BisectionSearch):
    """Bisection that skips every probe the lookup table already answers.

    The slice index is E = ceil(K_t (V+1) / L) - 1. Decoding s requires
    c(s) < (V+1)/L <= c(s+1) (that is X(s) <= V < X(s+1) with truncated
    products), so s always lies in the table's range for E. The walk is the
    plain bisection path with known comparisons left out, so it never
    probes more than plain bisection.
    """

    name = "lookup"

    def __init__(self, dist: ScaledDistribution, K_t: int = DEFAULT_KT):
        super().__init__(dist)
        self.table = build_lookup(dist, K_t)
        self.K_t = K_t

    def slice_index(self, V: int, L: int) -> int:
        return (self.K_t * (V + 1) - 1) // L

    def __call__(self, V: int, L: int):
        C, w = self.C, self.width
        smin, smax = self.table.entries[(self.K_t * (V + 1) - 1) // L]
        M = len(C) - 1
        lo, hi = 0, M
        X, Xkey, Y, Ykey = 0, 0, L, M
        probes = 0
        while hi - lo > 1:
            m = (lo + hi) >> 1
            if m <= smin:
                lo = m
            elif m > smax:
                hi = m
            else:
                Z = (L * C[m]) >> w
                probes += 1
                if Z > V:
                    hi, Y, Ykey = m, Z, m
                else:
                    lo, X, Xkey = m, Z, m
        return _finish(lo, X, Xkey, Y, Ykey, L, C, w) + (probes,)


STRATEGIES = {
    "sequential": SequentialSearch,
    "bisection": BisectionSearch,
    "optimal": OptimalTreeSearch,
    "quantile": QuantileSearch,
    "lookup": LookupSearch,
}


def make_search(name: str, dist: ScaledDistribution, **kw):
    """Build the named strategy for ``dist`` (keyword options: K_t, levels)."""
    try:
        cls = STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown search strategy {name!r}; choose from {sorted(STRATEGIES)}") from None
    return cls(dist, **kw)


def probe_counter(strategy: str, dist: ScaledDistribution, symbols: Sequence[int], **kw) -> float:
    """Mean probes per symbol when decoding ``symbols`` with a strategy."""
    config = CoderConfig(dist.D, dist.P)
    enc = Encoder(config)
    for s in symbols:
        enc.encode(s, dist)
    digits = enc.finish()
    ops = OpCounter()
    dec = Decoder(digits, config, ops=ops)
    search = make_search(strategy, dist, **kw)
    for s in symbols:
        if dec.decode(dist, search) != s:
            raise AssertionError("decoding mismatch while counting probes")
    return ops.probes / max(ops.symbols, 1)
