"""Probability models: static and scaled distributions, adaptive counters.

Static distributions hold exact rationals so reference traces reproduce
digit for digit. The integer coder works from ``ScaledDistribution``, whose
cumulative counts sum to D**P. Adaptive models keep occurrence counters,
either as a direct cumulative vector (``FrequencyModel``) or as left-branch
counters on a decision tree (``TreeModel``).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .trees import DecisionTree, build_bisection_tree

__all__ = [
    "COUNTER_LIMIT",
    "PrecisionError",
    "StaticDistribution",
    "ScaledDistribution",
    "FrequencyModel",
    "TreeModel",
    "BinaryFrequency",
    "PeriodicModel",
    "entropy",
    "optimal_bits",
    "compression_loss",
    "update_direct",
    "update_binary",
    "cumulative_from_tree",
    "scale_counts",
    "rebuild_periodic",
    "rescale_counters",
]

# counters are halved once their total would exceed this
COUNTER_LIMIT = 1 << 30


class PrecisionError(ValueError):
    """The register precision cannot represent the requested model."""


def _exact(x) -> Fraction:
    if isinstance(x, float):
        # decimal literal, so 0.2 means 1/5 and not the nearest double
        return Fraction(repr(x))
    return Fraction(x)


class StaticDistribution:
    """Exact probabilities ``p`` and cumulative values ``c`` for M symbols.

    Entries may be ints, Fractions, decimal strings or floats (floats are
    read through their shortest decimal repr). If the entries do not sum to
    exactly one they are normalised.

    >>> d = StaticDistribution(["0.2", "0.5", "0.2", "0.1"])
    >>> [str(x) for x in d.c]
    ['0', '1/5', '7/10', '9/10', '1']
    """

    def __init__(self, p: Sequence):
        probs = [_exact(x) for x in p]
        if len(probs) < 1:
            raise ValueError("empty distribution")
        if any(x <= 0 for x in probs):
            raise ValueError("probabilities must be positive")
        total = sum(probs)
        if total != 1:
            probs = [x / total for x in probs]
        self.p = tuple(probs)
        c = [Fraction(0)]
        for x in probs:
            c.append(c[-1] + x)
        self.c = tuple(c)

    @property
    def M(self) -> int:
        return len(self.p)

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "StaticDistribution":
        total = sum(counts)
        return cls([Fraction(n, total) for n in counts])

    def symbol_at(self, u) -> int:
        """Symbol s with c(s) <= u < c(s+1)."""
        lo, hi = 0, self.M
        while hi - lo > 1:
            m = (lo + hi) // 2
            if self.c[m] <= u:
                lo = m
            else:
                hi = m
        return lo

    def scaled(self, P: int, D: int) -> "ScaledDistribution":
        """Integer cumulative counts ``C(s) = floor(c(s) * D**P)``.

        Raises PrecisionError if some interval ends up narrower than D.
        """
        one = D**P
        C = [math.floor(x * one) for x in self.c]
        return ScaledDistribution(C, P, D)

    def __repr__(self) -> str:
        return f"StaticDistribution({[str(x) for x in self.p]})"


class ScaledDistribution:
    """Integer cumulative distribution for a coder with D**P register range.

    Parameters
    ----------
    C : sequence of int
        M+1 cumulative counts with C[0] = 0, C[M] = D**P and every gap >= D.
    P, D : int
        Register precision in base-D digits, and the output radix.
    """

    def __init__(self, C: Sequence[int], P: int, D: int):
        C = [int(x) for x in C]
        if len(C) < 3:
            raise ValueError("need at least two symbols")
        one = D**P
        if C[0] != 0 or C[-1] != one:
            raise ValueError(f"cumulative counts must run from 0 to {one}")
        for a, b in zip(C, C[1:]):
            if b - a < D:
                raise PrecisionError(
                    f"interval width {b - a} below minimum {D} (P={P}, D={D})"
                )
        self.C = C
        self.P = P
        self.D = D

    @property
    def M(self) -> int:
        return len(self.C) - 1

    def frequencies(self) -> list[int]:
        C = self.C
        return [C[s + 1] - C[s] for s in range(len(C) - 1)]

    def probabilities(self) -> list[Fraction]:
        one = self.D**self.P
        return [Fraction(f, one) for f in self.frequencies()]

    def permuted(self, order: Sequence[int]) -> "ScaledDistribution":
        """Distribution over ranks: rank r carries symbol ``order[r]``."""
        f = self.frequencies()
        C = [0]
        for s in order:
            C.append(C[-1] + f[s])
        return ScaledDistribution(C, self.P, self.D)

    def to_bytes(self) -> bytes:
        """M as u32 LE followed by the M frequencies as u32 LE."""
        f = self.frequencies()
        return struct.pack(f"<I{len(f)}I", len(f), *f)

    @classmethod
    def from_bytes(
        cls, data: bytes, P: int, D: int, offset: int = 0
    ) -> tuple["ScaledDistribution", int]:
        if len(data) < offset + 4:
            raise ValueError("truncated model")
        (M,) = struct.unpack_from("<I", data, offset)
        end = offset + 4 + 4 * M
        if M < 2 or len(data) < end:
            raise ValueError("truncated or invalid model")
        f = struct.unpack_from(f"<{M}I", data, offset + 4)
        C = [0]
        for x in f:
            C.append(C[-1] + x)
        return cls(C, P, D), end

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ScaledDistribution)
            and (self.C, self.P, self.D) == (other.C, other.P, other.D)
        )

    def __repr__(self) -> str:
        return f"ScaledDistribution(M={self.M}, P={self.P}, D={self.D})"


class FrequencyModel:
    """Occurrence counters with a directly maintained cumulative vector.

    ``counts[m]`` starts at one; ``cumulative`` has M+1 entries. Updating
    symbol s costs M - s additions. The counters are halved when the total
    passes ``limit``.
    """

    def __init__(self, M: int, counts: Sequence[int] | None = None, limit: int = COUNTER_LIMIT):
        if counts is None:
            counts = [1] * M
        if len(counts) != M or any(n < 1 for n in counts):
            raise ValueError("need M counters, each at least 1")
        if M > limit:
            raise PrecisionError(f"alphabet of {M} symbols exceeds counter limit {limit}")
        self.M = M
        self.limit = limit
        self.counts = list(counts)
        self._rebuild()

    def _rebuild(self):
        c = [0]
        for n in self.counts:
            c.append(c[-1] + n)
        self.cumulative = c

    @property
    def total(self) -> int:
        return self.cumulative[-1]

    def update(self, s: int) -> int:
        """Count one occurrence of s; returns the number of additions done."""
        if not 0 <= s < self.M:
            raise ValueError(f"symbol {s} out of range")
        self.counts[s] += 1
        c = self.cumulative
        for m in range(s + 1, self.M + 1):
            c[m] += 1
        if c[-1] > self.limit:
            self.rescale()
        return self.M - s

    def rescale(self):
        self.counts = [max(1, (n + 1) // 2) for n in self.counts]
        self._rebuild()

    def copy(self) -> "FrequencyModel":
        return FrequencyModel(self.M, self.counts, self.limit)


class TreeModel:
    """Left-branch occurrence counters on a decision tree.

    ``counts[0]`` is the total and ``counts[n]`` the number of occurrences
    that went left at internal node n. Starts with every leaf counted once.
    """

    def __init__(
        self,
        M: int | None = None,
        tree: DecisionTree | None = None,
        counts: Sequence[int] | None = None,
        limit: int = COUNTER_LIMIT,
    ):
        if tree is None:
            tree = build_bisection_tree(M)
        if M is not None and M != tree.M:
            raise ValueError("tree size does not match M")
        self.tree = tree
        self.M = tree.M
        self.limit = limit
        if self.M > limit:
            raise PrecisionError(f"alphabet of {self.M} symbols exceeds counter limit {limit}")
        self.counts = list(counts) if counts is not None else tree.node_counts([1] * self.M)
        if len(self.counts) != self.M:
            raise ValueError("need M node counters")

    @property
    def total(self) -> int:
        return self.counts[0]

    def leaf_counts(self) -> list[int]:
        return self.tree.leaf_counts(self.counts)

    def cumulative(self) -> list[int]:
        return cumulative_from_tree(self)

    def update(self, s: int):
        """Count one occurrence of s along its path (no interval coding)."""
        cnt = self.counts
        cnt[0] += 1
        for node, bit in self.tree.paths[s]:
            if not bit:
                cnt[node] += 1
        if cnt[0] > self.limit:
            self.rescale()

    def rescale(self):
        halved = [max(1, (n + 1) // 2) for n in self.leaf_counts()]
        self.counts = self.tree.node_counts(halved)


@dataclass
class BinaryFrequency:
    """Counts for a binary source: ``c1`` zeros plus one, ``c2`` total plus two."""

    c1: int = 1
    c2: int = 2
    limit: int = COUNTER_LIMIT

    def __post_init__(self):
        if not 0 < self.c1 < self.c2:
            raise ValueError("need 0 < c1 < c2")

    def update(self, bit: int):
        self.c2 += 1
        if bit == 0:
            self.c1 += 1
        if self.c2 > self.limit:
            self.rescale()

    def rescale(self):
        zeros = (self.c1 + 1) // 2
        ones = (self.c2 - self.c1 + 1) // 2
        self.c1, self.c2 = zeros, zeros + ones


def _probs(dist) -> list:
    return list(getattr(dist, "p", dist))


def entropy(dist) -> float:
    """Entropy in bits per symbol, ``-sum p log2 p``.

    Accepts a StaticDistribution or any sequence of probabilities, including
    the degenerate single-symbol case.

    >>> entropy([0.25, 0.25, 0.25, 0.25])
    2.0
    """
    return -sum(float(x) * math.log2(x) for x in _probs(dist) if x > 0) + 0.0


def optimal_bits(dist, s: int) -> float:
    """Ideal code length ``-log2 p(s)`` of one symbol."""
    return -math.log2(_probs(dist)[s])


def compression_loss(p, p_approx: Sequence) -> float:
    """Average extra bits per symbol when coding source p with model p_approx.

    ``sum p log2(p / p')``; p_approx need not sum to one.
    """
    probs = _probs(p)
    if len(probs) != len(p_approx):
        raise ValueError("size mismatch")
    if any(q <= 0 for q in p_approx):
        raise ValueError("approximate probabilities must be positive")
    return sum(float(x) * math.log2(float(Fraction(x) / Fraction(q))) for x, q in zip(probs, p_approx))


def update_direct(model: FrequencyModel, s: int) -> FrequencyModel:
    model.update(s)
    return model


def update_binary(model: BinaryFrequency, bit: int) -> BinaryFrequency:
    model.update(bit)
    return model


def cumulative_from_tree(model: TreeModel) -> list[int]:
    """Cumulative counts C~ implied by tree counters (ordered trees only).

    Walks the tree carrying each subtree's base and total, so
    ``C~(m) = base + counts[m]`` at node m.

    >>> from arcode.trees import build_bisection_tree
    >>> cumulative_from_tree(TreeModel(tree=build_bisection_tree(6), counts=[121, 4, 8, 22, 15, 19]))
    [0, 4, 12, 22, 37, 56, 121]
    """
    tree = model.tree
    if not tree.ordered:
        raise ValueError("cumulative counts need a key-ordered tree")
    cnt = model.counts
    C = [0] * (model.M + 1)
    C[model.M] = cnt[0]
    stack = [(tree.root, 0, cnt[0])]
    while stack:
        ref, base, total = stack.pop()
        if ref < 0:
            continue
        C[ref] = base + cnt[ref]
        stack.append((tree.left[ref], base, cnt[ref]))
        stack.append((tree.right[ref], base + cnt[ref], total - cnt[ref]))
    return C


def scale_counts(counts: Sequence[int], P: int, D: int) -> ScaledDistribution:
    """Scale occurrence counts to a cumulative distribution summing to D**P.

    Cumulative counts are rounded to nearest (half up), which keeps every
    C(m) within one unit of the exact value. Intervals narrower than D are
    widened to D, the deficit being taken from the widest intervals. Zero
    counts are allowed and get the minimum width.
    """
    M = len(counts)
    one = D**P
    if M < 2:
        raise ValueError("need at least two symbols")
    if M * D > one:
        raise PrecisionError(f"precision insufficient: {M} symbols need {M * D} > D**P = {one}")
    total = sum(counts)
    if total <= 0:
        raise ValueError("counts must not all be zero")
    C = []
    acc = 0
    for n in counts:
        C.append((2 * acc * one + total) // (2 * total))
        acc += n
    C.append(one)
    f = [C[s + 1] - C[s] for s in range(M)]
    deficit = 0
    for s in range(M):
        if f[s] < D:
            deficit += D - f[s]
            f[s] = D
    while deficit:
        # widest first, lowest symbol on ties
        s = max(range(M), key=lambda m: (f[m], -m))
        take = min(deficit, f[s] - D)
        if take <= 0:
            raise PrecisionError("precision insufficient")
        f[s] -= take
        deficit -= take
    C = [0]
    for x in f:
        C.append(C[-1] + x)
    return ScaledDistribution(C, P, D)


def sort_permutation(freqs: Sequence[int]) -> list[int]:
    """Symbols ordered by increasing frequency, ties by symbol index."""
    return sorted(range(len(freqs)), key=lambda s: (freqs[s], s))


def rebuild_periodic(model: FrequencyModel, P: int, D: int) -> tuple[ScaledDistribution, list[int]]:
    """Freeze the adaptive counters into a scaled distribution.

    Returns the distribution (in symbol order) and the permutation that sorts
    symbols by increasing probability.
    """
    dist = scale_counts(model.counts, P, D)
    return dist, sort_permutation(dist.frequencies())


def rescale_counters(model: FrequencyModel) -> FrequencyModel:
    model.rescale()
    return model


class PeriodicModel:
    """Counts every symbol but refreshes the coding distribution every R symbols.

    The coding distribution is kept over probability ranks (symbols sorted by
    increasing probability), so ``rank[s]`` maps a symbol to the coded index
    and ``order[r]`` maps back.
    """

    def __init__(self, M: int, P: int, D: int, period: int | None = None):
        self.M = M
        self.P = P
        self.D = D
        self.period = period or 4 * M
        if self.period < 1:
            raise ValueError("period must be positive")
        self.counts = FrequencyModel(M)
        self.since = 0
        self.rebuilds = 0
        self._refresh()

    def _refresh(self):
        dist, order = rebuild_periodic(self.counts, self.P, self.D)
        self.order = order
        self.rank = [0] * self.M
        for r, s in enumerate(order):
            self.rank[s] = r
        self.dist = dist.permuted(order)
        self.rebuilds += 1

    def observe(self, s: int) -> bool:
        """Count s; returns True when the coding distribution was refreshed."""
        c = self.counts
        c.counts[s] += 1
        c.cumulative[-1] += 1  # only the total is kept current between rebuilds
        if c.cumulative[-1] > c.limit:
            c.rescale()
        self.since += 1
        if self.since >= self.period:
            self.since = 0
            c._rebuild()
            self._refresh()
            return True
        return False
