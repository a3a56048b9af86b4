import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecpcpp import gf
from vecpcpp.exceptions import CapExceededError, ShapeError
from vecpcpp.hadamard import (ExplicitWord, HonestWord, OverlayWord, RandomWord, SeededWord, ZeroWord,
                              blr_pass_rate, blr_test, distance_to_code, local_correct, pwh_encode_point,
                              word_from_json)

GF2, GF8 = gf.GF2, gf.GF8


def single_flip_word():
    """PWH((1,0)) over GF(2)^2 with the entry at (1,1) flipped."""
    return OverlayWord(HonestWord(GF2, [[1, 0]]), [((1, 1), (0,))])


def test_encode_examples():
    assert pwh_encode_point(GF2, np.eye(2, dtype=np.uint8), [1, 1]).tolist() == [1, 1]
    assert pwh_encode_point(GF8, np.zeros((2, 3), dtype=np.uint8), [1, 2, 3]).tolist() == [0, 0]
    assert pwh_encode_point(GF8, [[2, 3]], [4, 1]).tolist() == [0]


def test_blr_examples():
    honest = HonestWord(GF8, [[1, 2], [3, 4]])
    for a, b in itertools.product(gf.all_vectors(GF8, 2)[::7], repeat=2):
        assert blr_test(honest, a, b)
    assert not blr_test(single_flip_word(), (1, 0), (0, 1))


def test_blr_at_origin_checks_zero_entry():
    bad = OverlayWord(ZeroWord(GF2, 2, 1), [((0, 0), (1,))])
    assert not blr_test(bad, (0, 0), (0, 0))
    assert blr_test(ZeroWord(GF2, 2, 1), (0, 0), (0, 0))


def test_pass_rates():
    assert blr_pass_rate(HonestWord(GF8, [[1, 5]])) == 1
    assert blr_pass_rate(single_flip_word()) == Fraction(10, 16)
    assert blr_pass_rate(ZeroWord(GF4 := gf.GF4, 2, 2)) == 1


def test_sampled_pass_rate_is_reproducible():
    w = single_flip_word()
    a = blr_pass_rate(w, mode="sampled", trials=2000, seed=4)
    b = blr_pass_rate(w, mode="sampled", trials=2000, seed=4)
    assert a == b
    assert a.low <= 10 / 16 <= a.high


def test_local_correction():
    honest = HonestWord(GF8, [[1, 2, 3]])
    for x in gf.all_vectors(GF8, 3)[::37]:
        for a in gf.all_vectors(GF8, 3)[::53]:
            assert np.array_equal(local_correct(honest, x, a), honest(x))
    assert not local_correct(honest, (0, 0, 0), (1, 2, 3)).any()
    w = single_flip_word()
    truth = HonestWord(GF2, [[1, 0]])
    for x in gf.all_vectors(GF2, 2):
        ok = sum(np.array_equal(local_correct(w, x, a), truth(x)) for a in gf.all_vectors(GF2, 2))
        assert ok >= 2


def test_distance_examples():
    dist, msg = distance_to_code(HonestWord(GF2, [[1, 1]]))
    assert dist == 0 and msg.tolist() == [[1, 1]]
    # the flipped word is 1/4 from both PWH((1,0)) and PWH((0,0)); ties go to the first message
    w = single_flip_word()
    dist, msg = distance_to_code(w)
    assert dist == Fraction(1, 4) and msg.tolist() == [[0, 0]]
    original = HonestWord(GF2, [[1, 0]]).materialize()
    assert np.mean(np.any(w.materialize() != original, axis=1)) == dist


def test_codewords_are_far_apart():
    words = [HonestWord(GF2, [m]) for m in itertools.product((0, 1), repeat=2)]
    tables = [w.materialize() for w in words]
    for a, b in itertools.combinations(tables, 2):
        assert np.mean(np.any(a != b, axis=1)) >= 0.5


def test_blr_bound_exhaustive():
    for table in itertools.product((0, 1), repeat=4):
        w = ExplicitWord(GF2, 2, [[x] for x in table])
        eps = 1 - blr_pass_rate(w)
        assert distance_to_code(w)[0] <= 6 * eps


def test_index_shape_checked():
    with pytest.raises(ShapeError):
        HonestWord(GF2, [[1, 0]])((1, 0, 1))


def test_materialize_cap():
    with pytest.raises(CapExceededError):
        HonestWord(GF8, np.ones((1, 6), dtype=np.uint8)).materialize(cap=1000)


def test_seeded_corruption_is_deterministic_and_rate_bounded():
    base = HonestWord(GF8, [[1, 2, 3]])
    w1, w2 = SeededWord(base, 0.25, 9), SeededWord(base, 0.25, 9)
    pts = gf.all_vectors(GF8, 3)
    diffs = [not np.array_equal(w1(p), base(p)) for p in pts]
    assert [w1(p).tolist() for p in pts] == [w2(p).tolist() for p in pts]
    assert 0.18 < np.mean(diffs) < 0.32
    assert all(np.array_equal(SeededWord(base, 0.0, 1)(p), base(p)) for p in pts)


def test_json_round_trip():
    base = HonestWord(GF8, [[1, 2], [3, 4]])
    words = [base, ZeroWord(GF8, 2, 2), OverlayWord(base, [((1, 1), (0, 0))]), SeededWord(base, 0.3, 5),
             RandomWord(GF8, 2, 2, 3), ExplicitWord(GF2, 1, [[0], [1]])]
    for w in words:
        back = word_from_json(json.loads(json.dumps(w.to_json())))
        pts = gf.all_vectors(w.field, w.arity)
        assert all(np.array_equal(w(p), back(p)) for p in pts)


@given(st.sampled_from([1, 2, 3]), st.data())
def test_encoding_is_additive(t, data):
    F = gf.gf(t)
    d = data.draw(st.integers(1, 3))
    k = data.draw(st.integers(1, 4))
    el = st.integers(0, F.order - 1)
    A = np.array(data.draw(st.lists(el, min_size=d * k, max_size=d * k)), dtype=np.uint8).reshape(d, k)
    b1 = np.array(data.draw(st.lists(el, min_size=k, max_size=k)), dtype=np.uint8)
    b2 = np.array(data.draw(st.lists(el, min_size=k, max_size=k)), dtype=np.uint8)
    assert np.array_equal(pwh_encode_point(F, A, b1) ^ pwh_encode_point(F, A, b2),
                          pwh_encode_point(F, A, b1 ^ b2))


@given(st.sampled_from([1, 2, 3]), st.data())
def test_honest_words_pass_blr_and_decode(t, data):
    F = gf.gf(t)
    k = data.draw(st.integers(1, 2))
    el = st.integers(0, F.order - 1)
    A = np.array(data.draw(st.lists(el, min_size=k, max_size=k)), dtype=np.uint8).reshape(1, k)
    w = HonestWord(F, A)
    assert blr_pass_rate(w) == 1
    dist, msg = distance_to_code(w)
    assert dist == 0 and np.array_equal(msg, A)
