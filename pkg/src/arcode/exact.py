"""Exact rational Elias coding.

Everything here uses ``fractions.Fraction``; nothing is rounded. This is the
reference the integer coder is checked against, and it reproduces the
classic worked traces exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import StaticDistribution

__all__ = [
    "Interval",
    "CodeValue",
    "encode_sequence",
    "min_code_length",
    "select_code_value",
    "decode_normalized",
    "decode_by_intervals",
    "rescale",
    "recover_original",
    "TraceRow",
    "renormalized_trace",
]


@dataclass(frozen=True)
class Interval:
    """The half-open interval [b, b + l)."""

    b: Fraction
    l: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "l", Fraction(self.l))
        if self.l <= 0:
            raise ValueError("interval length must be positive")

    @property
    def end(self) -> Fraction:
        return self.b + self.l

    def contains(self, v) -> bool:
        return self.b <= v < self.b + self.l

    def disjoint(self, other: "Interval") -> bool:
        return self.end <= other.b or other.end <= self.b


@dataclass(frozen=True)
class CodeValue:
    """A number in [0, 1) given by its base-D fractional digits."""

    digits: tuple[int, ...]
    D: int = 2

    @property
    def value(self) -> Fraction:
        v = Fraction(0)
        for d in reversed(self.digits):
            v = (v + d) / self.D
        return v

    @classmethod
    def from_value(cls, v, D: int = 2, max_digits: int = 10_000) -> "CodeValue":
        """Digits of v; v must have a finite base-D expansion."""
        v = Fraction(v)
        if not 0 <= v < 1:
            raise ValueError("code value must lie in [0, 1)")
        digits = []
        while v:
            if len(digits) >= max_digits:
                raise ValueError("no finite expansion in this radix")
            v *= D
            d = int(v)
            digits.append(d)
            v -= d
        return cls(tuple(digits), D)

    def __str__(self) -> str:
        alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        if self.D <= len(alphabet):
            return "0." + "".join(alphabet[d] for d in self.digits)
        return "0." + ",".join(str(d) for d in self.digits)


def _models(models, n):
    if isinstance(models, StaticDistribution):
        return [models] * n
    models = list(models)
    if len(models) == 1:
        return models * n
    if len(models) < n:
        raise ValueError("fewer models than symbols")
    return models


def encode_sequence(models, S: Sequence[int]) -> list[Interval]:
    """Nested intervals Phi_0..Phi_N for the symbols S.

    ``models`` is one StaticDistribution used for every symbol, or one per
    symbol.
    """
    out = [Interval(0, 1)]
    b, l = Fraction(0), Fraction(1)
    for dist, s in zip(_models(models, len(S)), S):
        if not 0 <= s < dist.M:
            raise ValueError(f"symbol {s} out of range")
        b, l = b + dist.c[s] * l, dist.p[s] * l
        out.append(Interval(b, l))
    return out


def min_code_length(l, D: int = 2) -> int:
    """Smallest n with D**-n <= l, i.e. ceil(-log_D l)."""
    l = Fraction(l)
    if not 0 < l <= 1:
        raise ValueError("length must be in (0, 1]")
    n, scale = 0, Fraction(1)
    while scale > l:
        scale /= D
        n += 1
    return n


def select_code_value(interval: Interval, D: int = 2) -> CodeValue:
    """Value in the interval with the fewest base-D digits (smallest on ties).

    >>> str(select_code_value(Interval(Fraction('0.7426'), Fraction('0.0002'))))
    '0.10111110001'
    """
    b, end = interval.b, interval.end
    n, scale = 0, 1
    while True:
        k = -((-b * scale) // 1)  # ceil(b * D**n)
        if k < end * scale:
            return CodeValue.from_value(Fraction(k, scale), D)
        n += 1
        scale *= D


def _value(v) -> Fraction:
    return v.value if isinstance(v, CodeValue) else Fraction(v)


def decode_normalized(v, models, N: int, trace: list | None = None) -> list[int]:
    """Decode N symbols by renormalising the code value after each one.

    If ``trace`` is a list, the normalised values v~_k are appended to it.
    """
    vt = _value(v)
    out = []
    for dist in _models(models, N)[:N]:
        if trace is not None:
            trace.append(vt)
        s = dist.symbol_at(vt)
        out.append(s)
        vt = (vt - dist.c[s]) / dist.p[s]
    return out


def decode_by_intervals(v, models, N: int, trace: list | None = None) -> list[int]:
    """Decode N symbols by repeating the encoder's interval recursion.

    If ``trace`` is a list, the intervals Phi_1..Phi_N are appended to it.
    """
    vv = _value(v)
    b, l = Fraction(0), Fraction(1)
    out = []
    for dist in _models(models, N)[:N]:
        s = dist.symbol_at((vv - b) / l)
        out.append(s)
        b, l = b + dist.c[s] * l, dist.p[s] * l
        if trace is not None:
            trace.append(Interval(b, l))
    return out


def rescale(interval: Interval, delta, gamma, v=None):
    """Map [b, b+l) to [gamma(b - delta), ...) and v to gamma(v - delta).

    Returns ``(interval, v)``; v is None when not given.
    """
    delta, gamma = Fraction(delta), Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    new = Interval(gamma * (interval.b - delta), gamma * interval.l)
    return new, None if v is None else gamma * (_value(v) - delta)


def recover_original(interval: Interval, steps: Sequence[tuple], v=None):
    """Undo a chain of (delta, gamma) rescalings, last one first."""
    b, l = interval.b, interval.l
    vv = None if v is None else _value(v)
    for delta, gamma in reversed(steps):
        delta, gamma = Fraction(delta), Fraction(gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        b, l = delta + b / gamma, l / gamma
        if vv is not None:
            vv = delta + vv / gamma
    return Interval(b, l), vv


@dataclass(frozen=True)
class TraceRow:
    """One event of a renormalising trace.

    ``event`` is ``"s"`` (symbol coded), ``"delta"`` (digit shifted out, or a
    carry when ``value == 1``) or ``"v"`` (final code value chosen).
    b, l or v are None where the event leaves them undefined.
    """

    event: str
    value: Fraction
    b: Fraction | None
    l: Fraction | None
    digits: tuple[int, ...]
    v: Fraction | None


def renormalized_trace(dist: StaticDistribution, S: Sequence[int], D: int = 2, v=None) -> list[TraceRow]:
    """Encode S with exact arithmetic, rescaling by D whenever l <= 1/D.

    Each rescaling shifts out the digit a = floor(D b) (delta = a/D). A base
    reaching 1 is a carry (delta = 1) into the digits already emitted. At
    the end the shortest continuation is chosen: digit D/2 if 1/2 lies in
    [b, b+l), otherwise 1 (carry, then a zero digit) if b + l > 1, otherwise
    digit ceil(D b). When a code value v is given, the decoder's scaled code
    value is tracked alongside.
    """
    b, l = Fraction(0), Fraction(1)
    vv = None if v is None else _value(v)
    d: list[int] = []
    rows = [TraceRow("init", Fraction(0), b, l, (), vv)]

    def carry():
        i = len(d) - 1
        while d[i] == D - 1:
            d[i] = 0
            i -= 1
        d[i] += 1

    for s in S:
        b, l = b + dist.c[s] * l, dist.p[s] * l
        rows.append(TraceRow("s", Fraction(s), b, l, tuple(d), vv))
        if b >= 1:
            b -= 1
            carry()
            if vv is not None:
                vv -= 1
            rows.append(TraceRow("delta", Fraction(1), b, l, tuple(d), vv))
        while l <= Fraction(1, D):
            a = int(D * b)
            d.append(a)
            b, l = D * b - a, D * l
            if vv is not None:
                vv = D * vv - a
            rows.append(TraceRow("delta", Fraction(a, D), b, l, tuple(d), vv))

    half = Fraction(1, 2)
    if b <= half < b + l:
        final = half
    elif b + l > 1:
        final = Fraction(1)
    else:
        final = Fraction(-((-b * D) // 1), D)
    rows.append(TraceRow("v", final, final, None, tuple(d), None))
    if final == 1:
        carry()
        rows.append(TraceRow("delta", Fraction(1), Fraction(0), None, tuple(d), None))
        d.append(0)
        rows.append(TraceRow("delta", Fraction(0), None, None, tuple(d), None))
    else:
        d.append(int(final * D))
        rows.append(TraceRow("delta", final, None, None, tuple(d), None))
    return rows
