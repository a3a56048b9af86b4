import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecpcpp import gf
from vecpcpp.exceptions import FieldMismatchError, ShapeError

MODULI = {1: 0b10, 2: 0b111, 3: 0b1011}


def long_division_product(a: int, b: int, t: int) -> int:
    """Independent oracle: schoolbook polynomial product, then long division by the modulus."""
    product = 0
    for i in range(t):
        if (b >> i) & 1:
            product ^= a << i
    modulus = MODULI[t]
    for degree in range(2 * t - 2, t - 1, -1):
        if (product >> degree) & 1:
            product ^= modulus << (degree - t)
    return product


@pytest.mark.parametrize("t", [1, 2, 3])
def test_multiplication_matches_long_division(t):
    F = gf.gf(t)
    for a, b in itertools.product(F.elements(), repeat=2):
        assert F.mul(a, b) == long_division_product(a, b, t)


@pytest.mark.parametrize("a,b,expected", [(2, 4, 3), (3, 3, 5)])
def test_gf8_products(a, b, expected):
    assert long_division_product(a, b, 3) == expected
    x, y = gf.FieldElement(gf.GF8, a), gf.FieldElement(gf.GF8, b)
    assert int(gf.ff_mul(x, y)) == expected


def test_gf8_addition():
    assert int(gf.ff_add(gf.FieldElement(gf.GF8, 5), gf.FieldElement(gf.GF8, 3))) == 6


@pytest.mark.parametrize("t", [1, 2, 3])
def test_additive_and_multiplicative_identities(t):
    F = gf.gf(t)
    zero, one = gf.FieldElement(F, 0), gf.FieldElement(F, 1)
    for a in F.elements():
        x = gf.FieldElement(F, a)
        assert x + zero == x
        assert int(x + x) == 0
        assert one * x == x


@pytest.mark.parametrize("t", [1, 2, 3])
def test_field_axioms_exhaustively(t):
    F = gf.gf(t)
    els = list(F.elements())
    for a, b, c in itertools.product(els, repeat=3):
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
        assert F.mul(a, b) == F.mul(b, a)
    for a in els[1:]:
        assert F.mul(a, F.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldMismatchError):
        gf.FieldElement(gf.GF4, 1) + gf.FieldElement(gf.GF8, 1)


def test_element_out_of_range():
    with pytest.raises(ValueError):
        gf.FieldElement(gf.GF4, 4)


def test_mat_vec_examples():
    assert gf.mat_vec_mul(gf.GF8, np.array([[2, 3]]), np.array([4, 1])).tolist() == [0]
    v = np.array([5, 7, 1], dtype=np.uint8)
    assert gf.mat_vec_mul(gf.GF8, gf.identity(3), v).tolist() == v.tolist()
    assert not gf.mat_vec_mul(gf.GF8, np.zeros((3, 3), dtype=np.uint8), v).any()


def test_mat_vec_shape_mismatch():
    with pytest.raises(ShapeError):
        gf.mat_vec_mul(gf.GF8, np.zeros((2, 3), dtype=np.uint8), np.zeros(2, dtype=np.uint8))


def test_chi_examples():
    assert gf.chi_flatten(gf.GF8, 5) == (1, 0, 1)
    xor = tuple(a ^ b for a, b in zip(gf.chi_flatten(gf.GF8, 3), gf.chi_flatten(gf.GF8, 5)))
    assert xor == gf.chi_flatten(gf.GF8, 6)
    assert [gf.chi_flatten(gf.GF2, a) for a in (0, 1)] == [(0,), (1,)]


@pytest.mark.parametrize("t", [1, 2, 3])
def test_chi_round_trip_exhaustively(t):
    F = gf.gf(t)
    for a in F.elements():
        assert gf.chi_unflatten(F, gf.chi_flatten(F, a)) == a


def test_field_json_round_trip():
    for t in (1, 2, 3):
        assert gf.field_from_json(gf.gf(t).to_json()) == gf.gf(t)
    with pytest.raises(ValueError):
        gf.field_from_json({"t": 4})


field_index = st.sampled_from([1, 2, 3])


@given(field_index, st.data())
def test_mat_vec_is_linear(t, data):
    F = gf.gf(t)
    rows = data.draw(st.integers(1, 4))
    cols = data.draw(st.integers(1, 4))
    entry = st.integers(0, F.order - 1)
    M = np.array(data.draw(st.lists(entry, min_size=rows * cols, max_size=rows * cols)),
                 dtype=np.uint8).reshape(rows, cols)
    u = np.array(data.draw(st.lists(entry, min_size=cols, max_size=cols)), dtype=np.uint8)
    v = np.array(data.draw(st.lists(entry, min_size=cols, max_size=cols)), dtype=np.uint8)
    a = data.draw(entry)
    lhs = gf.mat_vec_mul(F, M, u ^ gf.scale(F, a, v))
    rhs = gf.mat_vec_mul(F, M, u) ^ gf.scale(F, a, gf.mat_vec_mul(F, M, v))
    assert np.array_equal(lhs, rhs)


@given(st.permutations(list(range(5))), st.lists(st.integers(0, 7), min_size=5, max_size=5))
def test_permutation_matrix_reads_the_permuted_entry(perm, values):
    v = np.array(values, dtype=np.uint8)
    out = gf.mat_vec_mul(gf.GF8, gf.permutation_matrix(perm), v)
    assert out.tolist() == [values[p] for p in perm]


@given(field_index, st.data())
def test_digit_encoding_round_trip(t, data):
    F = gf.gf(t)
    n = data.draw(st.integers(1, 5))
    value = data.draw(st.integers(0, F.order ** n - 1))
    digits = gf.int_to_digits(F, value, n)
    assert gf.digits_to_int(F, digits) == value
    assert gf.all_vectors(F, n)[value].tolist() == digits.tolist()
