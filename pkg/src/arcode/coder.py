"""Fixed-precision integer arithmetic coder with base-D output.

Registers hold P base-D digits (D a power of two, so every multiplication
by D is a shift). The encoder keeps the interval base B modulo D**P and the
length L; a base that wraps around is a carry into the digits already
written. The decoder keeps only V = B_code - B and L.

Typical use::

    enc = Encoder(CoderConfig(D=256, P=4))
    for s in symbols:
        enc.encode(s, dist)
    digits = enc.finish()

    dec = Decoder(digits, enc.config)
    out = [dec.decode(dist) for _ in symbols]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exact import Interval, select_code_value
from .model import (
    COUNTER_LIMIT,
    FrequencyModel,
    PrecisionError,
    ScaledDistribution,
    TreeModel,
)

__all__ = [
    "CoderConfig",
    "OpCounter",
    "DigitBuffer",
    "CountingDigitBuffer",
    "propagate_carry",
    "Encoder",
    "Decoder",
    "interval_selection_bisection",
    "interval_selection_sequential",
    "trace_lprime",
    "transcode_radix",
    "untranscode_radix",
    "pack_digits",
    "unpack_digits",
    "encode_static",
    "decode_static",
]

_RADIX_BITS = {2: 1, 4: 2, 16: 4, 256: 8}
PRODUCT_BITS = 64


@dataclass(frozen=True)
class CoderConfig:
    """Output radix D and register precision P (in base-D digits)."""

    D: int = 256
    P: int = 4

    def __post_init__(self):
        if self.D not in _RADIX_BITS:
            raise ValueError(f"D must be one of {sorted(_RADIX_BITS)}, got {self.D}")
        if self.P < 2:
            raise ValueError("P must be at least 2")
        if 2 * self.P * _RADIX_BITS[self.D] > PRODUCT_BITS:
            raise ValueError(
                f"P={self.P} with D={self.D} needs {2 * self.width}-bit products "
                f"(limit {PRODUCT_BITS})"
            )

    @classmethod
    def default_for(cls, D: int) -> "CoderConfig":
        """32-bit registers for the given radix."""
        return cls(D, 32 // _RADIX_BITS.get(D, 1))

    @property
    def r(self) -> int:
        """Bits per output digit."""
        return _RADIX_BITS[self.D]

    @property
    def width(self) -> int:
        return self.P * _RADIX_BITS[self.D]

    @property
    def one(self) -> int:
        return 1 << self.width

    @property
    def top(self) -> int:
        """D**(P-1), the renormalisation threshold for L."""
        return 1 << (self.width - self.r)

    @property
    def counter_limit(self) -> int:
        """Largest adaptive total that keeps L // total >= 1."""
        return min(COUNTER_LIMIT, self.top)

    def frequency_model(self, M: int) -> FrequencyModel:
        return FrequencyModel(M, limit=self.counter_limit)

    def tree_model(self, M: int, tree=None) -> TreeModel:
        return TreeModel(M if tree is None else None, tree=tree, limit=self.counter_limit)


@dataclass
class OpCounter:
    """Operation tallies filled in by coders that are handed one."""

    symbols: int = 0
    probes: int = 0
    divisions: int = 0
    multiplications: int = 0
    additions: int = 0  # counter updates
    renormalizations: int = 0
    carries: int = 0

    def per_symbol(self) -> dict:
        n = max(self.symbols, 1)
        return {
            "probes": self.probes / n,
            "divisions": self.divisions / n,
            "multiplications": self.multiplications / n,
            "additions": self.additions / n,
        }


def propagate_carry(digits, D: int, t: int | None = None) -> None:
    """Add one unit at position t (default: the last digit), in place.

    Trailing D-1 digits roll over to 0 and the first smaller digit is
    incremented.
    """
    i = len(digits) - 1 if t is None else t
    while i >= 0 and digits[i] == D - 1:
        digits[i] = 0
        i -= 1
    if i < 0:
        raise AssertionError("carry propagated past the start of the buffer")
    digits[i] += 1


class DigitBuffer:
    """Output digits kept in memory; carries walk back through the buffer."""

    def __init__(self, D: int):
        self.D = D
        self.digits = bytearray()
        self.put = self.digits.append

    def carry(self):
        propagate_carry(self.digits, self.D)

    def __len__(self):
        return len(self.digits)

    def finish(self) -> bytearray:
        return self.digits


class CountingDigitBuffer:
    """Carry handling with a pending digit and a count of trailing D-1 digits.

    Digits before the pending one are final and never revisited, so they
    could be streamed out as soon as they settle.
    """

    def __init__(self, D: int):
        self.D = D
        self.settled = bytearray()
        self.pending: int | None = None
        self.run = 0

    def put(self, d: int):
        if d == self.D - 1:
            if self.pending is None:
                # nothing a carry could reach: already final
                self.settled.append(d)
            else:
                self.run += 1
            return
        if self.pending is not None:
            self.settled.append(self.pending)
            self.settled.extend(bytes([self.D - 1]) * self.run)
        self.pending = d
        self.run = 0

    def carry(self):
        if self.pending is None:
            raise AssertionError("carry propagated past the start of the buffer")
        self.settled.append(self.pending + 1)
        self.settled.extend(bytes(self.run))
        self.pending = None
        self.run = 0

    def __len__(self):
        return len(self.settled) + (self.pending is not None) + self.run

    def finish(self) -> bytearray:
        if self.pending is not None:
            self.settled.append(self.pending)
            self.settled.extend(bytes([self.D - 1]) * self.run)
            self.pending = None
            self.run = 0
        return self.settled


def interval_selection_bisection(V: int, L: int, C: Sequence[int], width: int):
    """Find s with X(s) <= V < X(s+1), X(s) = (L * C[s]) >> width, by halving.

    Returns ``(s, X, Y, probes)`` where [X, Y) is the symbol's sub-interval,
    computed with the same truncated products as the encoder.
    """
    s, n = 0, len(C) - 1
    X, Y = 0, L
    probes = 0
    while n - s > 1:
        m = (s + n) >> 1
        Z = (L * C[m]) >> width
        probes += 1
        if Z > V:
            n, Y = m, Z
        else:
            s, X = m, Z
    return s, X, Y, probes


def interval_selection_sequential(V: int, L: int, C: Sequence[int], width: int):
    """Like :func:`interval_selection_bisection`, probing downward from M-1.

    Costs M - s probes, so it pays off when symbols are sorted by
    increasing probability.
    """
    s = len(C) - 2
    Y = L
    X = (L * C[s]) >> width
    probes = 1
    while X > V:
        s -= 1
        Y = X
        X = (L * C[s]) >> width
        probes += 1
    return s, X, Y, probes


class Encoder:
    """Integer arithmetic encoder.

    Parameters
    ----------
    config : CoderConfig
    carry : {"buffer", "counter"}
        Carry strategy; both give identical output.
    ops : OpCounter, optional
        Receives operation counts when given.
    """

    def __init__(self, config: CoderConfig | None = None, carry: str = "buffer", ops: OpCounter | None = None):
        self.config = cfg = config or CoderConfig()
        if carry == "buffer":
            self.out = DigitBuffer(cfg.D)
        elif carry == "counter":
            self.out = CountingDigitBuffer(cfg.D)
        else:
            raise ValueError(f"unknown carry strategy {carry!r}")
        self.B = 0
        self.L = cfg.one - 1
        self.ops = ops
        self._r = cfg.r
        self._w = cfg.width
        self._mask = cfg.one - 1
        self._top = cfg.top
        self._shift = cfg.width - cfg.r

    @property
    def t(self) -> int:
        """Digits emitted so far."""
        return len(self.out)

    def _advance(self, X: int, Y: int):
        A = self.B
        B = (A + X) & self._mask
        L = Y - X
        if B < A:
            self.out.carry()
            if self.ops:
                self.ops.carries += 1
        if L < self._top:
            put = self.out.put
            r, mask, top, shift = self._r, self._mask, self._top, self._shift
            n = 0
            while L < top:
                put(B >> shift)
                B = (B << r) & mask
                L <<= r
                n += 1
            if self.ops:
                self.ops.renormalizations += n
        self.B = B
        self.L = L

    def encode(self, s: int, dist: ScaledDistribution):
        """Code s with a static scaled distribution."""
        C = dist.C
        M = len(C) - 1
        if not 0 <= s < M:
            raise ValueError(f"symbol {s} out of range")
        L = self.L
        w = self._w
        Y = L if s == M - 1 else (L * C[s + 1]) >> w
        X = (L * C[s]) >> w
        if self.ops:
            self.ops.symbols += 1
            self.ops.multiplications += 1 if s == M - 1 else 2
        self._advance(X, Y)

    def encode_adaptive(self, s: int, model: FrequencyModel):
        """Code s with the model's current counts, then count s."""
        M = model.M
        if not 0 <= s < M:
            raise ValueError(f"symbol {s} out of range")
        Ct = model.cumulative
        L = self.L
        total = Ct[M]
        if total > L:
            raise PrecisionError("counter total exceeds interval length")
        g = L // total
        X = g * Ct[s]
        Y = L if s == M - 1 else g * Ct[s + 1]
        self._advance(X, Y)
        adds = model.update(s)
        if self.ops:
            self.ops.symbols += 1
            self.ops.divisions += 1
            self.ops.multiplications += 1 if s == M - 1 else 2
            self.ops.additions += adds

    def encode_tree(self, s: int, model: TreeModel):
        """Code s with cumulative counts read off tree counters, then count s."""
        tree = model.tree
        M = model.M
        if not 0 <= s < M:
            raise ValueError(f"symbol {s} out of range")
        cnt = model.counts
        L = self.L
        total = cnt[0]
        if total > L:
            raise PrecisionError("counter total exceeds interval length")
        g = L // total
        E, F = 0, total
        left, right = tree.left, tree.right
        node = tree.root
        steps = 0
        while node > 0:
            steps += 1
            if s < node:
                F = E + cnt[node]
                cnt[node] += 1
                node = left[node]
            else:
                E += cnt[node]
                node = right[node]
        cnt[0] += 1
        X = g * E
        Y = L if s == M - 1 else g * F
        self._advance(X, Y)
        if cnt[0] > model.limit:
            model.rescale()
        if self.ops:
            self.ops.symbols += 1
            self.ops.divisions += 1
            self.ops.multiplications += 1 if s == M - 1 else 2
            self.ops.additions += steps + 1

    def encode_bit(self, bit: int, c1: int, c2: int):
        """Binary decision with P(0) estimated as c1/c2."""
        L = self.L
        x = (L * c1) // c2
        if self.ops:
            self.ops.divisions += 1
            self.ops.multiplications += 1
        if bit:
            self._advance(x, L)
        else:
            self._advance(0, x)

    def finish(self, shortest: bool = False) -> bytearray:
        """Terminate the stream and return all digits.

        By default B moves half a digit-window up and exactly two more digits
        are emitted; any digits a decoder reads past the end then decode
        correctly. With ``shortest=True`` a single digit is emitted instead
        (D/2 if the midpoint is inside the interval, else a carry and 0 if
        the interval straddles 1, else the first digit at or above B); the
        stream must then be read with zero padding.
        """
        if shortest:
            B, L, one, top = self.B, self.L, self._mask + 1, self._top
            if B <= one >> 1 < B + L:
                self.out.put(self.config.D >> 1)
            elif B + L > one:
                self.out.carry()
                self.out.put(0)
            else:
                self.out.put(-(-B // top))
        else:
            A = self.B
            B = (A + (self._top >> 1)) & self._mask
            if B < A:
                self.out.carry()
            for _ in range(2):
                self.out.put(B >> self._shift)
                B = (B << self._r) & self._mask
        self.B = 0
        self.L = 0
        return self.out.finish()


class Decoder:
    """Integer arithmetic decoder over a digit sequence.

    Digits beyond the end of ``digits`` read as zero; ``needed`` reports how
    many digits the encoder must have written for the symbols decoded so far.
    """

    def __init__(self, digits: Sequence[int], config: CoderConfig | None = None, ops: OpCounter | None = None):
        self.config = cfg = config or CoderConfig()
        self.digits = digits
        self._n = len(digits)
        self._r = cfg.r
        self._w = cfg.width
        self._top = cfg.top
        self.ops = ops
        V = 0
        for i in range(cfg.P):
            V = (V << cfg.r) | (digits[i] if i < self._n else 0)
        self.V = V
        self.L = cfg.one - 1
        self.pos = cfg.P

    @property
    def needed(self) -> int:
        """Stream length implied by the renormalisations so far (plus the two final digits)."""
        return self.pos - self.config.P + 2

    def _advance(self, X: int, Y: int):
        V = self.V - X
        L = Y - X
        if L < self._top:
            digits, n, r, top = self.digits, self._n, self._r, self._top
            pos = self.pos
            while L < top:
                V = (V << r) | (digits[pos] if pos < n else 0)
                L <<= r
                pos += 1
            self.pos = pos
        self.V = V
        self.L = L

    def decode(self, dist: ScaledDistribution, search: Callable | None = None) -> int:
        """Decode one symbol coded with a static distribution.

        ``search(V, L)`` returns ``(s, X, Y, probes)``; plain bisection over
        ``dist`` is used when omitted.
        """
        if search is None:
            s, X, Y, probes = interval_selection_bisection(self.V, self.L, dist.C, self._w)
        else:
            s, X, Y, probes = search(self.V, self.L)
        if self.ops:
            self.ops.symbols += 1
            self.ops.probes += probes
            self.ops.multiplications += probes
        self._advance(X, Y)
        return s

    def decode_adaptive(self, model: FrequencyModel, search: str = "bisection") -> int:
        M = model.M
        Ct = model.cumulative
        L = self.L
        total = Ct[M]
        if total > L:
            raise PrecisionError("counter total exceeds interval length")
        g = L // total
        W = self.V // g
        if search == "sequential":
            s = M - 1
            probes = 1
            while Ct[s] > W:
                s -= 1
                probes += 1
        elif search == "bisection":
            s, n = 0, M
            probes = 0
            while n - s > 1:
                m = (s + n) >> 1
                probes += 1
                if Ct[m] > W:
                    n = m
                else:
                    s = m
        else:
            raise ValueError(f"unknown adaptive search {search!r}")
        X = g * Ct[s]
        Y = L if s == M - 1 else g * Ct[s + 1]
        self._advance(X, Y)
        adds = model.update(s)
        if self.ops:
            self.ops.symbols += 1
            self.ops.probes += probes
            self.ops.divisions += 2
            self.ops.multiplications += 1 if s == M - 1 else 2
            self.ops.additions += adds
        return s

    def decode_tree(self, model: TreeModel) -> int:
        tree = model.tree
        cnt = model.counts
        L = self.L
        V = self.V
        total = cnt[0]
        if total > L:
            raise PrecisionError("counter total exceeds interval length")
        g = L // total
        E = 0
        X, Y = 0, L
        left, right = tree.left, tree.right
        node = tree.root
        probes = 0
        while node > 0:
            Z = g * (E + cnt[node])
            probes += 1
            if Z > V:
                Y = Z
                cnt[node] += 1
                node = left[node]
            else:
                X = Z
                E += cnt[node]
                node = right[node]
        cnt[0] += 1
        self._advance(X, Y)
        if cnt[0] > model.limit:
            model.rescale()
        if self.ops:
            self.ops.symbols += 1
            self.ops.probes += probes
            self.ops.divisions += 1
            self.ops.multiplications += probes
            self.ops.additions += probes + 1
        return ~node

    def decode_bit(self, c1: int, c2: int) -> int:
        L = self.L
        x = (L * c1) // c2
        if self.ops:
            self.ops.divisions += 1
            self.ops.multiplications += 1
            self.ops.probes += 1
        if self.V < x:
            self._advance(0, x)
            return 0
        self._advance(x, L)
        return 1


def encode_static(symbols: Sequence[int], dist: ScaledDistribution, config: CoderConfig | None = None, carry: str = "buffer") -> bytearray:
    """Digits for a whole sequence under one static distribution."""
    config = config or CoderConfig(dist.D, dist.P)
    enc = Encoder(config, carry)
    for s in symbols:
        enc.encode(s, dist)
    return enc.finish()


def decode_static(digits: Sequence[int], N: int, dist: ScaledDistribution, config: CoderConfig | None = None, search: Callable | None = None) -> list[int]:
    config = config or CoderConfig(dist.D, dist.P)
    dec = Decoder(digits, config)
    return [dec.decode(dist, search) for _ in range(N)]


@dataclass
class LPrimeRow:
    symbol: int
    product: int  # X
    base: int  # B after renormalisation
    length: int  # L' after renormalisation
    b: Fraction  # absolute base, settled bits included
    l: Fraction  # absolute length


@dataclass
class LPrimeTrace:
    rows: list[LPrimeRow] = field(default_factory=list)
    digits: list[int] = field(default_factory=list)


def trace_lprime(symbols: Sequence[int], dist: ScaledDistribution) -> LPrimeTrace:
    """Binary encoding with the length held as L' = 2**P l - 1.

    This variant is kept to replay hand-worked 8-bit register tables. The
    update is ``X = ((L'+1) C(s)) >> P`` and
    ``L' = (((L'+1)(C(s+1) - C(s))) >> P) - 1``, renormalising while
    ``L'+1 < 2**(P-1)``. The stream ends with one digit chosen the way the
    exact coder does it: 1 if b <= 1/2, else a carry and 0.
    """
    if dist.D != 2:
        raise ValueError("the L' trace is binary only")
    P = dist.P
    one = 1 << P
    half = one >> 1
    C = dist.C
    B, Lp = 0, one - 1
    buf = DigitBuffer(2)
    out = LPrimeTrace()
    for s in symbols:
        X = ((Lp + 1) * C[s]) >> P
        Lp = (((Lp + 1) * (C[s + 1] - C[s])) >> P) - 1
        A = B
        B = (B + X) & (one - 1)
        if B < A:
            buf.carry()
        while Lp + 1 < half:
            buf.put(B >> (P - 1))
            B = (B << 1) & (one - 1)
            Lp = 2 * Lp + 1
        t = len(buf)
        settled = sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(buf.digits))
        out.rows.append(
            LPrimeRow(s, X, B, Lp, settled + Fraction(B, one << t), Fraction(Lp + 1, one << t))
        )
    if 2 * B <= one:
        buf.put(1)
    else:
        buf.carry()
        buf.put(0)
    out.digits = list(buf.digits)
    return out


def transcode_radix(bits: Sequence[int], D_target: int, n_digits: int | None = None) -> list[int]:
    """Re-express a finished binary code stream in another radix.

    A terminated stream of t bits stands for every value in
    [v, v + 2**-t), so any base-D_target value inside that range decodes
    the same. The shortest one is returned (right-padded with zeros to
    ``n_digits`` when given).
    """
    t = len(bits)
    v = sum(Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits))
    digits = list(select_code_value(Interval(v, Fraction(1, 2**t)), D_target).digits)
    if n_digits is not None:
        if len(digits) > n_digits:
            raise ValueError(f"needs {len(digits)} digits, only {n_digits} allowed")
        digits += [0] * (n_digits - len(digits))
    return digits


def untranscode_radix(digits: Sequence[int], D_source: int, t: int) -> list[int]:
    """Recover the t-bit stream from :func:`transcode_radix` output."""
    u = sum(Fraction(d, D_source ** (i + 1)) for i, d in enumerate(digits))
    k = int(u * 2**t)
    return [(k >> (t - 1 - i)) & 1 for i in range(t)]


def pack_digits(digits: Sequence[int], D: int) -> bytes:
    """Pack base-D digits into bytes, most significant digit first."""
    r = _RADIX_BITS[D]
    if r == 8:
        return bytes(digits)
    per = 8 // r
    out = bytearray()
    for i in range(0, len(digits), per):
        chunk = list(digits[i : i + per])
        chunk += [0] * (per - len(chunk))
        byte = 0
        for d in chunk:
            byte = (byte << r) | d
        out.append(byte)
    return bytes(out)


def unpack_digits(data: bytes, D: int) -> list[int] | bytes:
    """Inverse of :func:`pack_digits` (trailing pad digits included)."""
    r = _RADIX_BITS[D]
    if r == 8:
        return bytes(data)
    per = 8 // r
    mask = D - 1
    out = []
    shifts = [8 - r * (k + 1) for k in range(per)]
    for byte in data:
        out.extend((byte >> sh) & mask for sh in shifts)
    return out
