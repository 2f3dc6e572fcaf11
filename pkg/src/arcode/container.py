"""The ACS1 container: a small header followed by the packed digit stream.

Layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"ACS1"
    4       1     version (1)
    5       1     config: bits 7-6 radix code (0: D=2, 1: D=4, 2: D=16, 3: D=256),
                  bits 5-0 register precision P in base-D digits
    6       1     mode: 0 static, 1 adaptive, 2 tree, 3 binary, 4 periodic
    7       4     M, alphabet size (u32)
    11      8     N, number of symbols (u64)
    19      ...   static:   M (u32) then M scaled frequencies (u32 each)
                  periodic: rebuild period R (u32)
    ...     ...   payload: digits packed most significant first

The payload holds exactly the digits the encoder wrote, padded with zero
digits to a whole byte. The decoder knows how many digits it consumed, so a
short or overlong payload is reported instead of silently decoded.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .binary import decode_symbol_tree, encode_symbol_tree
from .coder import CoderConfig, Decoder, Encoder, OpCounter, pack_digits, unpack_digits
from .model import PeriodicModel, ScaledDistribution, scale_counts
from .search import DEFAULT_KT, make_search

__all__ = [
    "MAGIC",
    "VERSION",
    "MODES",
    "FormatError",
    "Header",
    "encode_symbols",
    "decode_symbols",
    "compress",
    "decompress",
    "info",
]

MAGIC = b"ACS1"
VERSION = 1
MODES = ("static", "adaptive", "tree", "binary", "periodic")
_RADIX_CODES = (2, 4, 16, 256)
_FIXED = struct.Struct("<4sBBBIQ")


class FormatError(ValueError):
    """The input is not a valid container."""


@dataclass
class Header:
    config: CoderConfig
    mode: str
    M: int
    N: int
    dist: ScaledDistribution | None = None  # static mode
    period: int | None = None  # periodic mode
    size: int = 0  # header bytes, model included

    def to_bytes(self) -> bytes:
        cfg = self.config
        config_byte = (_RADIX_CODES.index(cfg.D) << 6) | cfg.P
        out = _FIXED.pack(MAGIC, VERSION, config_byte, MODES.index(self.mode), self.M, self.N)
        if self.mode == "static":
            out += self.dist.to_bytes()
        elif self.mode == "periodic":
            out += struct.pack("<I", self.period)
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> "Header":
        if len(data) < _FIXED.size:
            raise FormatError("file too short for a header")
        magic, version, config_byte, mode, M, N = _FIXED.unpack_from(data)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")
        if mode >= len(MODES):
            raise FormatError(f"unknown mode {mode}")
        try:
            config = CoderConfig(_RADIX_CODES[config_byte >> 6], config_byte & 63)
        except ValueError as e:
            raise FormatError(f"bad coder configuration: {e}") from None
        if M < 2:
            raise FormatError(f"bad alphabet size {M}")
        h = cls(config, MODES[mode], M, N)
        pos = _FIXED.size
        if h.mode == "static":
            try:
                h.dist, pos = ScaledDistribution.from_bytes(data, config.P, config.D, pos)
            except ValueError as e:
                raise FormatError(f"bad model: {e}") from None
            if h.dist.M != M:
                raise FormatError("model size does not match header")
        elif h.mode == "periodic":
            if len(data) < pos + 4:
                raise FormatError("truncated header")
            (h.period,) = struct.unpack_from("<I", data, pos)
            pos += 4
            if h.period < 1:
                raise FormatError("bad rebuild period")
        h.size = pos
        return h


def encode_symbols(
    symbols: Sequence[int],
    M: int,
    mode: str,
    config: CoderConfig,
    dist: ScaledDistribution | None = None,
    period: int | None = None,
    carry: str = "buffer",
    ops: OpCounter | None = None,
) -> bytearray:
    """Code a symbol sequence in one of the container modes; returns digits."""
    enc = Encoder(config, carry, ops)
    if mode == "static":
        for s in symbols:
            enc.encode(s, dist)
    elif mode == "adaptive":
        model = config.frequency_model(M)
        for s in symbols:
            enc.encode_adaptive(s, model)
    elif mode == "tree":
        model = config.tree_model(M)
        for s in symbols:
            enc.encode_tree(s, model)
    elif mode == "binary":
        model = config.tree_model(M)
        for s in symbols:
            encode_symbol_tree(enc, s, model)
    elif mode == "periodic":
        pm = PeriodicModel(M, config.P, config.D, period)
        for s in symbols:
            enc.encode(pm.rank[s], pm.dist)
            pm.observe(s)
        if ops:
            ops.divisions += pm.rebuilds * M
            ops.additions += len(symbols)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return enc.finish()


def decode_symbols(
    digits: Sequence[int],
    N: int,
    M: int,
    mode: str,
    config: CoderConfig,
    dist: ScaledDistribution | None = None,
    period: int | None = None,
    search: str = "bisection",
    K_t: int = DEFAULT_KT,
    ops: OpCounter | None = None,
) -> tuple[list[int], int]:
    """Decode N symbols; returns them and the digit count the encoder wrote."""
    dec = Decoder(digits, config, ops)
    kw = {"K_t": K_t} if search == "lookup" else {}
    if mode == "static":
        finder = make_search(search, dist, **kw)
        out = [dec.decode(dist, finder) for _ in range(N)]
    elif mode == "adaptive":
        model = config.frequency_model(M)
        how = search if search in ("sequential", "bisection") else "bisection"
        out = [dec.decode_adaptive(model, how) for _ in range(N)]
    elif mode == "tree":
        model = config.tree_model(M)
        out = [dec.decode_tree(model) for _ in range(N)]
    elif mode == "binary":
        model = config.tree_model(M)
        out = [decode_symbol_tree(dec, model) for _ in range(N)]
    elif mode == "periodic":
        pm = PeriodicModel(M, config.P, config.D, period)
        finder = make_search(search, pm.dist, **kw)
        out = []
        for _ in range(N):
            s = pm.order[dec.decode(pm.dist, finder)]
            out.append(s)
            if pm.observe(s):
                finder = make_search(search, pm.dist, **kw)
        if ops:
            ops.divisions += pm.rebuilds * M
            ops.additions += N
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out, dec.needed


def compress(
    data: bytes,
    mode: str = "tree",
    D: int = 256,
    P: int | None = None,
    period: int | None = None,
    M: int = 256,
) -> bytes:
    """Compress bytes into a container.

    ``mode`` is one of static (two-pass, model stored in the header),
    adaptive, tree, binary or periodic. P defaults to 32-bit registers.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    config = CoderConfig(D, P) if P is not None else CoderConfig.default_for(D)
    symbols = data
    if M < 256 and any(b >= M for b in data):
        raise ValueError(f"input has byte values >= M={M}")
    dist = None
    if mode == "static":
        hist = Counter(symbols)
        dist = scale_counts([hist.get(s, 0) for s in range(M)] if data else [1] * M, config.P, config.D)
    if mode == "periodic":
        period = period or 4 * M
    elif period is not None:
        raise ValueError("a rebuild period only applies to periodic mode")
    header = Header(config, mode, M, len(data), dist, period).to_bytes()
    if not data:
        return header
    digits = encode_symbols(symbols, M, mode, config, dist, period)
    return header + pack_digits(digits, config.D)


def decompress(blob: bytes, search: str = "bisection", K_t: int = DEFAULT_KT) -> bytes:
    """Inverse of :func:`compress`. Raises FormatError on damaged input."""
    h = Header.from_bytes(blob)
    if h.M > 256:
        raise FormatError("byte containers need M <= 256")
    payload = blob[h.size :]
    if h.N == 0:
        if payload:
            raise FormatError("payload present for an empty stream")
        return b""
    cfg = h.config
    digits = unpack_digits(payload, cfg.D)
    symbols, needed = decode_symbols(digits, h.N, h.M, h.mode, cfg, h.dist, h.period, search, K_t)
    per = 8 // cfg.r
    expect = -(-needed // per)
    if len(payload) < expect:
        raise FormatError(f"truncated payload: {len(payload)} bytes, stream needs {expect}")
    if len(payload) > expect:
        raise FormatError(f"{len(payload) - expect} unexpected bytes after payload")
    return bytes(symbols)


def info(blob: bytes) -> dict:
    """Header fields and size accounting for a container."""
    h = Header.from_bytes(blob)
    payload_bytes = len(blob) - h.size
    n = max(h.N, 1)
    return {
        "D": h.config.D,
        "P": h.config.P,
        "mode": h.mode,
        "M": h.M,
        "N": h.N,
        "period": h.period,
        "header_bytes": h.size,
        "payload_bytes": payload_bytes,
        "payload_bits_per_symbol": 8 * payload_bytes / n if h.N else 0.0,
        "total_bits_per_symbol": 8 * len(blob) / n if h.N else 0.0,
    }
