"""Arithmetic over the characteristic-2 fields GF(2), GF(4) and GF(8).

An element is a ``t``-bit mask whose bit ``i`` is the coefficient of ``x**i``
in its polynomial representative. Vectors and matrices are ``uint8`` numpy
arrays holding such masks, so the lookup tables on :class:`FieldSpec` can be
indexed with whole arrays at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import FieldMismatchError, ShapeError

# x, x^2+x+1, x^3+x+1
MODULI = {1: 0b10, 2: 0b111, 3: 0b1011}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit-polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, modulus: int) -> int:
    deg = modulus.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= modulus << (a.bit_length() - 1 - deg)
    return a


class FieldSpec:
    """GF(2^t) for t in {1, 2, 3} with a fixed irreducible modulus."""

    __slots__ = ("t", "modulus", "order", "mul_table", "inv_table")

    def __init__(self, t: int):
        if t not in MODULI:
            raise ValueError(f"unsupported extension degree t={t}; expected 1, 2 or 3")
        self.t = t
        self.modulus = MODULI[t]
        self.order = 1 << t
        table = np.zeros((self.order, self.order), dtype=np.uint8)
        for a in range(self.order):
            for b in range(self.order):
                table[a, b] = poly_mod(clmul(a, b), self.modulus)
        table.setflags(write=False)
        self.mul_table = table
        inv = np.zeros(self.order, dtype=np.uint8)
        for a in range(1, self.order):
            inv[a] = int(np.flatnonzero(table[a] == 1)[0])
        inv.setflags(write=False)
        self.inv_table = inv

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.t == self.t

    def __hash__(self):
        return hash(("FieldSpec", self.t))

    def __repr__(self):
        return f"GF({self.order})"

    def __reduce__(self):
        return (gf, (self.t,))

    def elements(self) -> range:
        return range(self.order)

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.inv_table[a])

    def to_json(self) -> dict:
        return {"t": self.t}


@lru_cache(maxsize=None)
def gf(t: int) -> FieldSpec:
    return FieldSpec(t)


def field_from_json(obj) -> FieldSpec:
    return gf(int(obj["t"]))


GF2 = gf(1)
GF4 = gf(2)
GF8 = gf(3)


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < self.field.order:
            raise ValueError(f"{self.bits} is not an element of {self.field}")

    def _same(self, other: "FieldElement"):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.bits ^ other.bits)

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field.mul(self.bits, other.bits))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.bits))

    def __int__(self):
        return self.bits


def ff_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


# -- arrays ---------------------------------------------------------------

def as_array(F: FieldSpec, values, ndim: int | None = None) -> np.ndarray:
    """Coerce ``values`` to a uint8 array and check every entry lies in ``F``."""
    arr = np.asarray(values, dtype=np.int64)
    if ndim is not None and arr.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= F.order):
        raise ValueError(f"entries outside {F}")
    return arr.astype(np.uint8)


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


def xor_reduce(arr: np.ndarray, axis=-1) -> np.ndarray:
    if arr.shape[axis] == 0:
        shape = list(arr.shape)
        del shape[axis]
        return np.zeros(shape, dtype=np.uint8)
    return np.bitwise_xor.reduce(arr, axis=axis)


def scale(F: FieldSpec, a, v: np.ndarray) -> np.ndarray:
    return F.mul_table[a, v]


def dot(F: FieldSpec, a: np.ndarray, b: np.ndarray) -> int:
    if a.shape != b.shape:
        raise ShapeError(f"{a.shape} vs {b.shape}")
    return int(xor_reduce(F.mul_table[a, b]))


def mat_vec_mul(F: FieldSpec, M: np.ndarray, v: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise ShapeError(f"cannot multiply {M.shape} by {v.shape}")
    return xor_reduce(F.mul_table[M, v[None, :]], axis=1)


def mat_mul(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return xor_reduce(F.mul_table[A[:, :, None], B[None, :, :]], axis=1)


def vec_mat_mul(F: FieldSpec, x: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Row vector times matrix, ``x^T M``."""
    return mat_vec_mul(F, np.asarray(M, dtype=np.uint8).T, x)


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.uint8)


def permutation_matrix(perm) -> np.ndarray:
    """Matrix ``P`` with ``(P v)[i] = v[perm[i]]``."""
    d = len(perm)
    P = np.zeros((d, d), dtype=np.uint8)
    P[np.arange(d), np.asarray(perm, dtype=np.int64)] = 1
    return P


# -- flattening chi: F -> GF(2)^t --------------------------------------------

def chi_flatten(F: FieldSpec, a: int) -> tuple:
    """Little-endian bits of ``a``; additive: chi(a) + chi(b) == chi(a + b)."""
    if not 0 <= a < F.order:
        raise ValueError(f"{a} is not an element of {F}")
    return tuple((a >> i) & 1 for i in range(F.t))


def chi_unflatten(F: FieldSpec, bits) -> int:
    bits = tuple(bits)
    if len(bits) != F.t:
        raise ShapeError(f"expected {F.t} bits, got {len(bits)}")
    out = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"not a bit: {b!r}")
        out |= b << i
    return out


def chi_array(F: FieldSpec, values: np.ndarray) -> np.ndarray:
    """Flatten an array of elements to bits along a new trailing axis of length t."""
    values = np.asarray(values, dtype=np.uint8)
    shifts = np.arange(F.t, dtype=np.uint8)
    return (values[..., None] >> shifts) & 1


def digits_to_int(F: FieldSpec, digits) -> int:
    """Little-endian base-|F| integer of a digit vector."""
    out = 0
    for i, a in enumerate(np.asarray(digits, dtype=np.int64).tolist()):
        out |= a << (F.t * i)
    return out


def int_to_digits(F: FieldSpec, value: int, n: int) -> np.ndarray:
    mask = F.order - 1
    return np.array([(value >> (F.t * i)) & mask for i in range(n)], dtype=np.uint8)


def all_vectors(F: FieldSpec, n: int) -> np.ndarray:
    """Every vector of F^n, row ``i`` being the little-endian digits of ``i``."""
    count = F.order ** n
    idx = np.arange(count, dtype=np.int64)
    shifts = F.t * np.arange(n, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & (F.order - 1)).astype(np.uint8)
