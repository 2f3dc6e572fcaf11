import itertools
import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcode.exact import (
    CodeValue,
    Interval,
    decode_by_intervals,
    decode_normalized,
    encode_sequence,
    min_code_length,
    recover_original,
    renormalized_trace,
    rescale,
    select_code_value,
)
from arcode.model import StaticDistribution

DIST = StaticDistribution(["0.2", "0.5", "0.2", "0.1"])
S = [2, 1, 0, 0, 1, 3]
V_HAT = F("0.74267578125")
FINAL = Interval(F("0.7426"), F("0.0002"))


def test_encode_sequence_worked_example():
    iv = encode_sequence(DIST, S)
    assert [x.b for x in iv[1:]] == [F(x) for x in ["0.7", "0.74", "0.74", "0.74", "0.7408", "0.7426"]]
    assert [x.l for x in iv[1:]] == [F(x) for x in ["0.2", "0.1", "0.02", "0.004", "0.002", "0.0002"]]


def test_encode_sequence_trivial_cases():
    assert encode_sequence(DIST, []) == [Interval(0, 1)]
    with pytest.raises(ValueError):
        encode_sequence(DIST, [4])


def test_min_code_length():
    assert min_code_length(F("0.0002"), 2) == 13
    assert min_code_length(F("0.0002"), 3) == 8
    assert min_code_length(1, 2) == 0
    assert min_code_length(F(1, 1024), 2) == 10
    with pytest.raises(ValueError):
        min_code_length(0)


@given(st.fractions(min_value=F(1, 10**9), max_value=1), st.sampled_from([2, 3, 10, 16]))
def test_min_code_length_against_mpmath(l, D):
    mpmath.mp.dps = 60
    ref = int(mpmath.ceil(-mpmath.log(mpmath.mpf(l.numerator) / l.denominator, D)))
    n = min_code_length(l, D)
    # tolerate mpmath landing a hair off an exact power
    assert n == ref or F(1, D**n) == l
    assert F(1, D**n) <= l < F(1, D ** (n - 1)) if n else l == 1


def test_select_code_value_examples():
    v = select_code_value(FINAL, 2)
    assert str(v) == "0.10111110001" and v.value == V_HAT and len(v.digits) == 11
    t = select_code_value(FINAL, 3)
    assert t.digits == (2, 0, 2, 0, 0, 1, 1, 1)
    assert float(t.value) == pytest.approx(0.742722146, abs=1e-9)
    assert select_code_value(Interval(0, 1), 2).digits == ()
    assert select_code_value(Interval(F(1, 4), F(1, 2)), 2).digits == (1,)


@settings(max_examples=300)
@given(st.fractions(min_value=0, max_value=F(999, 1000)), st.fractions(min_value=F(1, 10**6), max_value=F(1, 1000)), st.sampled_from([2, 3, 16]))
def test_select_code_value_is_inside_and_short(b, l, D):
    iv = Interval(b, l)
    v = select_code_value(iv, D)
    assert iv.contains(v.value)
    assert len(v.digits) <= min_code_length(l, D) + 1
    # no shorter expansion lies inside
    n = len(v.digits)
    if n:
        k = math.ceil(b * D ** (n - 1))
        assert not iv.contains(F(k, D ** (n - 1)))


def test_code_value_roundtrip():
    assert CodeValue.from_value(V_HAT).digits == (1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 1)
    with pytest.raises(ValueError):
        CodeValue.from_value(F(1, 3), 2, max_digits=50)
    with pytest.raises(ValueError):
        CodeValue.from_value(1)


def test_decode_normalized_trace():
    trace = []
    assert decode_normalized(V_HAT, DIST, 6, trace) == S
    assert trace == [F(x) for x in ["0.74267578125", "0.21337890625", "0.0267578125", "0.1337890625", "0.6689453125", "0.937890625"]]
    assert decode_normalized(CodeValue((1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 1)), DIST, 6) == S


def test_decode_by_intervals_matches_encoder():
    trace = []
    assert decode_by_intervals(V_HAT, DIST, 6, trace) == S
    assert trace == encode_sequence(DIST, S)[1:]


def test_decoding_continues_past_the_message():
    # the same code value keeps decoding; the tail is just not the message
    ext = []
    decode_normalized(V_HAT, DIST, 8, ext)
    assert ext[6:] == [F("0.37890625"), F("0.3578125")]


def test_rescale_and_recover_example():
    iv = encode_sequence(DIST, S[:2])[-1]
    a, va = rescale(iv, F("0.74"), 10, V_HAT)
    assert a == Interval(0, 1) and va == 10 * (V_HAT - F("0.74"))
    iv4 = encode_sequence(DIST, S[:4])[-1]
    first, _ = rescale(iv4, F("0.74"), 10)
    second, _ = rescale(first, 0, 25)
    assert second == Interval(0, 1)
    full = encode_sequence(DIST, S)[-1]
    x, _ = rescale(full, F("0.74"), 10)
    y, _ = rescale(x, 0, 25)
    assert y == Interval(F("0.65"), F("0.05"))
    back, v = recover_original(y, [(F("0.74"), 10), (0, 25)], F("0.66"))
    assert back == FINAL
    assert v == F("0.74") + F("0.66") / 250
    with pytest.raises(ValueError):
        rescale(full, 0, 0)


def test_intervals_are_disjoint_small_case():
    seqs = list(itertools.product(range(3), repeat=3))
    dist = StaticDistribution(["0.25", "0.5", "0.25"])
    finals = [encode_sequence(dist, s)[-1] for s in seqs]
    for a, b in itertools.combinations(finals, 2):
        assert a.disjoint(b)
    assert sum(x.l for x in finals) == 1


def test_renormalized_trace_binary():
    rows = renormalized_trace(DIST, S, 2, V_HAT)
    assert "".join(map(str, rows[-1].digits)) == "1011111000100"
    bs = [r.b for r in rows if r.event == "delta" and r.l is not None]
    assert bs[:3] == [F("0.4"), F("0.8"), F("0.92")]
    vs = [r.v for r in rows if r.v is not None]
    assert F("0.4853515625") in vs and F("1.0625") in vs and F("1.125") in vs
    carries = [i for i, r in enumerate(rows) if r.event == "delta" and r.value == 1]
    assert len(carries) == 2


def test_renormalized_trace_hex():
    rows = renormalized_trace(DIST, S, 16, V_HAT)
    stream = ["".join("%X" % d for d in r.digits) for r in rows]
    assert stream[-1] == "BE20"
    assert "BD" in stream and "BE" in stream and "BE1" in stream and "BE2" in stream
    d = [r for r in rows if r.event == "delta"]
    assert d[0].value == F(11, 16) and d[1].value == F(13, 16)
    assert [r.v for r in d[:3]] == [F("0.8828125"), F("1.125"), F("0.125")]
