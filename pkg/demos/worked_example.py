"""Code a six-symbol message three ways and print every step.

1. exact rational arithmetic, with decoding by renormalised code values
2. exact arithmetic with binary and hexadecimal renormalisation
3. 8-bit integer registers
"""

from fractions import Fraction

from arcode.coder import trace_lprime
from arcode.exact import decode_normalized, encode_sequence, renormalized_trace, select_code_value
from arcode.model import StaticDistribution

dist = StaticDistribution(["0.2", "0.5", "0.2", "0.1"])
S = [2, 1, 0, 0, 1, 3]

print("exact intervals")
for k, iv in enumerate(encode_sequence(dist, S)):
    print(f"  k={k}  b={float(iv.b):<8} l={float(iv.l)}")
v = select_code_value(encode_sequence(dist, S)[-1], 2)
print(f"shortest code value {v} = {float(v.value)}")

trace = []
decode_normalized(v, dist, len(S), trace)
print("decoder values", [float(x) for x in trace])

for D in (2, 16):
    rows = renormalized_trace(dist, S, D, v)
    print(f"\nrenormalised trace, D={D}")
    for r in rows:
        digits = "".join("%X" % d for d in r.digits)
        val = "" if r.value is None else f"{r.event}={r.value}"
        b = "" if r.b is None else f"{float(r.b):.4f}"
        l = "" if r.l is None else f"{float(r.l):.4f}"
        print(f"  {val:<10} b={b:<8} l={l:<8} d={digits}")

print("\n8-bit registers (length held as L' = 2^P l - 1)")
tr = trace_lprime(S, dist.scaled(8, 2))
for r in tr.rows:
    print(f"  s={r.symbol}  X={r.product:08b}  B={r.base:08b}  L'={r.length:08b}  b={float(r.b)}")
bits = "".join(map(str, tr.digits))
value = sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(tr.digits))
print(f"  code value 0.{bits} = {float(value)}")
