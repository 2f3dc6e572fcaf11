"""Compress some text in every container mode and report sizes."""

import sys

from arcode.container import MODES, compress, decompress, info

data = open(sys.argv[1], "rb").read() if len(sys.argv) > 1 else open(__file__, "rb").read() * 20

print(f"{len(data)} input bytes")
for mode in MODES:
    for D in (2, 16, 256):
        blob = compress(data, mode=mode, D=D)
        assert decompress(blob) == data
        r = info(blob)
        print(f"  {mode:<9} D={D:<4} {len(blob):>7} bytes  payload {r['payload_bits_per_symbol']:.3f} bits/byte")
