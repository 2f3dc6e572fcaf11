import functools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcode.binary import (
    DecisionTree,
    binary_decode,
    binary_encode,
    build_alphabetic_tree,
    build_bisection_tree,
    build_optimal_tree,
    decode_symbol_tree,
    encode_symbol_tree,
    expected_tests,
    path_estimates,
    sequential_tests,
)
from arcode.coder import CoderConfig, Decoder, Encoder
from arcode.model import BinaryFrequency, TreeModel
from arcode.trees import build_tree_from_depths

COST_P = [0.033, 0.066, 0.083, 0.124, 0.157, 0.537]


def brute_alphabetic_cost(w):
    """O(M^3) ordered-tree cost without Knuth's speed-up."""

    @functools.lru_cache(None)
    def cost(i, j):
        if j - i == 1:
            return 0
        return sum(w[i:j]) + min(cost(i, k) + cost(k, j) for k in range(i + 1, j))

    return cost(0, len(w))


def kraft(depths):
    return sum(Fraction(1, 2**d) for d in depths)


def test_bisection_tree_shape():
    t = build_bisection_tree(6)
    assert t.root == 3 and t.left[3] == 1 and t.right[3] == 4
    assert t.depths == [2, 3, 3, 2, 3, 3]
    assert t.ordered
    assert build_bisection_tree(2).depths == [1, 1]
    with pytest.raises(ValueError):
        build_bisection_tree(1)


def test_cost_table():
    assert sequential_tests(COST_P) == pytest.approx(2.083, abs=1e-3)
    assert expected_tests(build_bisection_tree(6), COST_P) == pytest.approx(2.843, abs=1e-3)
    opt = build_optimal_tree(COST_P)
    assert opt.depths == [4, 4, 3, 3, 3, 1]
    assert expected_tests(opt, COST_P) == pytest.approx(2.025, abs=1e-3)


def test_optimal_tree_from_counts_is_ordered():
    t = build_optimal_tree([4, 8, 10, 15, 19, 65])
    assert t.ordered
    assert t.node_counts([4, 8, 10, 15, 19, 65]) == [121, 4, 12, 22, 15, 56]


def test_optimal_tree_unsorted_counts_fall_back_to_paths():
    counts = [10, 1, 10, 1, 10]
    t = build_optimal_tree(counts)
    assert kraft(t.depths) == 1
    # a valid prefix code whatever the layout
    codes = {tuple(b for _, b in t.paths[s]) for s in range(5)}
    assert len(codes) == 5
    for a in codes:
        for b in codes:
            assert a == b or a != b[: len(a)]


@settings(max_examples=200)
@given(st.lists(st.integers(1, 500), min_size=2, max_size=12))
def test_alphabetic_tree_matches_brute_force(w):
    t = build_alphabetic_tree(w)
    assert t.ordered
    assert sum(x * d for x, d in zip(w, t.depths)) == brute_alphabetic_cost(tuple(w))


@settings(max_examples=200)
@given(st.lists(st.integers(1, 500), min_size=2, max_size=16))
def test_huffman_not_worse_than_alphabetic(w):
    h = build_optimal_tree(w)
    a = build_alphabetic_tree(w)
    assert kraft(h.depths) == 1
    assert sum(x * d for x, d in zip(w, h.depths)) <= sum(x * d for x, d in zip(w, a.depths))
    if w == sorted(w):
        assert h.ordered


def test_tree_from_depths():
    assert build_tree_from_depths([1, 2, 2]).ordered
    assert build_tree_from_depths([2, 1, 2]) is None
    assert build_tree_from_depths([1, 1, 1]) is None


@given(st.integers(2, 40))
def test_tree_serialisation_roundtrip(M):
    t = build_bisection_tree(M)
    blob = b"xx" + t.to_bytes()
    back, end = DecisionTree.from_bytes(blob, 2)
    assert end == len(blob)
    assert back.paths == t.paths and back.root == t.root


def test_binary_model_roundtrip():
    rng = random.Random(1)
    bits = [int(rng.random() < 0.2) for _ in range(3000)]
    cfg = CoderConfig(2, 16)
    enc = Encoder(cfg)
    f = BinaryFrequency(limit=cfg.counter_limit)
    for b in bits:
        binary_encode(enc, b, f)
    digits = enc.finish()
    dec = Decoder(digits, cfg)
    f2 = BinaryFrequency(limit=cfg.counter_limit)
    assert [binary_decode(dec, f2) for _ in bits] == bits
    assert f == f2
    # a skewed source compresses
    assert len(digits) < 0.8 * len(bits)


def test_path_estimates_multiply_to_symbol_estimate():
    m = TreeModel(6, counts=[121, 4, 8, 22, 15, 19])
    leaves = m.leaf_counts()
    for s in range(6):
        prod = Fraction(1)
        for _, bit, q in path_estimates(m, s):
            prod *= 1 - q if bit else q
        assert prod == Fraction(leaves[s], 121)


@pytest.mark.parametrize("D,P", [(2, 16), (16, 4), (256, 4), (4, 8)])
def test_symbol_tree_roundtrip(D, P):
    rng = random.Random(D + P)
    cfg = CoderConfig(D, P)
    M = 9
    seq = [min(int(rng.expovariate(0.5)), M - 1) for _ in range(2000)]
    for tree in (None, build_optimal_tree([1, 1, 5, 3, 9, 2, 2, 7, 1])):
        enc = Encoder(cfg)
        m = cfg.tree_model(M, tree)
        for s in seq:
            encode_symbol_tree(enc, s, m)
        dec = Decoder(enc.finish(), cfg)
        m2 = cfg.tree_model(M, tree)
        assert [decode_symbol_tree(dec, m2) for _ in seq] == seq
        assert m.counts == m2.counts


def test_symbol_tree_counters_match_tree_model_update():
    cfg = CoderConfig(256, 4)
    a, b = cfg.tree_model(7), cfg.tree_model(7)
    enc = Encoder(cfg)
    for s in [0, 6, 3, 3, 2, 5, 1, 4]:
        encode_symbol_tree(enc, s, a)
        b.update(s)
        assert a.counts == b.counts
