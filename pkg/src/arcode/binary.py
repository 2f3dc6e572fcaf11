"""Binary arithmetic coding and M-ary coding through a binary decision tree.

An M-ary symbol is coded as the sequence of left/right decisions on its
root-to-leaf path. Each decision is a binary event whose probability comes
from the tree counters: at node n with k occurrences arriving, ``counts[n]``
went left, so P(left) = counts[n] / k. The product of the decisions along
a path equals the symbol's estimated probability, so there is no loss in
compression, only more coding steps.
"""

from __future__ import annotations

from fractions import Fraction

from .coder import Decoder, Encoder
from .model import BinaryFrequency, TreeModel
from .trees import (  # re-exported: tree construction lives with the coder using it
    DecisionTree,
    build_alphabetic_tree,
    build_bisection_tree,
    build_optimal_tree,
    expected_tests,
    sequential_tests,
)

__all__ = [
    "binary_encode",
    "binary_decode",
    "encode_symbol_tree",
    "decode_symbol_tree",
    "path_estimates",
    "DecisionTree",
    "build_bisection_tree",
    "build_optimal_tree",
    "build_alphabetic_tree",
    "expected_tests",
    "sequential_tests",
]


def binary_encode(enc: Encoder, bit: int, freq: BinaryFrequency) -> None:
    """Code one bit with an adaptive binary model, then update the model."""
    enc.encode_bit(bit, freq.c1, freq.c2)
    freq.update(bit)


def binary_decode(dec: Decoder, freq: BinaryFrequency) -> int:
    bit = dec.decode_bit(freq.c1, freq.c2)
    freq.update(bit)
    return bit


def encode_symbol_tree(enc: Encoder, s: int, model: TreeModel) -> None:
    """Code s as its path of binary decisions, updating node counters."""
    if not 0 <= s < model.M:
        raise ValueError(f"symbol {s} out of range")
    cnt = model.counts
    k = cnt[0]
    cnt[0] += 1
    for node, bit in model.tree.paths[s]:
        c = cnt[node]
        enc.encode_bit(bit, c, k)
        if bit:
            k -= c
        else:
            k = c
            cnt[node] += 1
    if cnt[0] > model.limit:
        model.rescale()
    if enc.ops:
        enc.ops.symbols += 1
        enc.ops.additions += len(model.tree.paths[s]) + 1


def decode_symbol_tree(dec: Decoder, model: TreeModel) -> int:
    tree = model.tree
    cnt = model.counts
    k = cnt[0]
    cnt[0] += 1
    node = tree.root
    steps = 0
    while node > 0:
        c = cnt[node]
        steps += 1
        if dec.decode_bit(c, k):
            k -= c
            node = tree.right[node]
        else:
            k = c
            cnt[node] += 1
            node = tree.left[node]
    if cnt[0] > model.limit:
        model.rescale()
    if dec.ops:
        dec.ops.symbols += 1
        dec.ops.additions += steps + 1
    return ~node


def path_estimates(model: TreeModel, s: int) -> list[tuple[int, int, Fraction]]:
    """Per-node decisions for s: ``(node, bit, P(left at node))``.

    The probability of s is the product of P(left) or 1 - P(left) along
    the path. Counters are not modified.
    """
    cnt = model.counts
    k = cnt[0]
    out = []
    for node, bit in model.tree.paths[s]:
        c = cnt[node]
        out.append((node, bit, Fraction(c, k)))
        k = k - c if bit else c
    return out
