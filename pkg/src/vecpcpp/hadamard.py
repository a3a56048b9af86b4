"""Parallel Walsh-Hadamard words over explicit index vectors.

The honest word for a ``d x k`` message ``A`` maps an index ``b`` in ``F^k``
to ``A b`` in ``F^d``. Words are evaluated point by point and never stored
unless explicitly requested, so corrupted variants are thin overlays.
"""
from __future__ import annotations

import hashlib
import itertools
from fractions import Fraction

import numpy as np

from . import gf as gfm
from .exceptions import CapExceededError, ShapeError
from .gf import FieldSpec
from .stats import wilson

EXPLICIT_CAP = 1 << 16


def index_key(index) -> bytes:
    return np.asarray(index, dtype=np.uint8).tobytes()


class WordOracle:
    """A function from ``F^arity`` to ``F^d``."""

    provenance = "abstract"

    def __init__(self, field: FieldSpec, arity: int, d: int):
        self.field = field
        self.arity = arity
        self.d = d

    def value(self, index: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, index) -> np.ndarray:
        index = np.asarray(index, dtype=np.uint8)
        if index.shape != (self.arity,):
            raise ShapeError(f"index shape {index.shape}, expected ({self.arity},)")
        return self.value(index)

    def key(self, index) -> bytes:
        return index_key(index)

    def domain_size(self) -> int:
        return self.field.order ** self.arity

    def materialize(self, cap: int = EXPLICIT_CAP) -> np.ndarray:
        """Table of all values, row ``i`` at the index whose base-|F| digits spell ``i``."""
        size = self.domain_size()
        if size > cap:
            raise CapExceededError(f"word of length {size} exceeds cap {cap}")
        points = gfm.all_vectors(self.field, self.arity)
        return np.array([self(p) for p in points], dtype=np.uint8).reshape(size, self.d)

    def to_json(self) -> dict:
        raise NotImplementedError


class HonestWord(WordOracle):
    provenance = "honest"

    def __init__(self, field: FieldSpec, message):
        message = gfm.frozen(gfm.as_array(field, message, ndim=2))
        super().__init__(field, message.shape[1], message.shape[0])
        self.message = message

    def value(self, index):
        return gfm.mat_vec_mul(self.field, self.message, index)

    def to_json(self):
        return {"kind": "honest", "field": self.field.to_json(), "message": self.message.tolist()}


class ZeroWord(WordOracle):
    provenance = "zero"

    def value(self, index):
        return np.zeros(self.d, dtype=np.uint8)

    def to_json(self):
        return {"kind": "zero", "field": self.field.to_json(), "arity": self.arity, "d": self.d}


class ExplicitWord(WordOracle):
    provenance = "explicit"

    def __init__(self, field: FieldSpec, arity: int, table):
        table = gfm.frozen(gfm.as_array(field, table, ndim=2))
        if table.shape[0] != field.order ** arity:
            raise ShapeError(f"table has {table.shape[0]} rows, expected {field.order ** arity}")
        super().__init__(field, arity, table.shape[1])
        self.table = table

    def value(self, index):
        return self.table[gfm.digits_to_int(self.field, index)].copy()

    def to_json(self):
        return {"kind": "explicit", "field": self.field.to_json(), "arity": self.arity,
                "table": self.table.tolist()}


class OverlayWord(WordOracle):
    """``base`` with a sparse set of replaced entries."""

    provenance = "overlay"

    def __init__(self, base: WordOracle, patches):
        super().__init__(base.field, base.arity, base.d)
        self.base = base
        self.patches = {}
        for index, value in (patches.items() if isinstance(patches, dict) else patches):
            index = gfm.as_array(base.field, index, ndim=1)
            self.patches[index_key(index)] = (index, gfm.frozen(gfm.as_array(base.field, value, ndim=1)))

    def value(self, index):
        hit = self.patches.get(index_key(index))
        return hit[1].copy() if hit is not None else self.base(index)

    def to_json(self):
        return {"kind": "overlay", "base": self.base.to_json(),
                "patches": [[i.tolist(), v.tolist()] for i, v in self.patches.values()]}


class SeededWord(WordOracle):
    """``base`` corrupted at each index independently with probability ``rate``.

    Corruption decisions and replacement values come from a keyed hash of the
    index, so the word is deterministic for a given seed.
    """

    provenance = "seeded"

    def __init__(self, base: WordOracle, rate: float, seed: int):
        if not 0 <= rate <= 1:
            raise ValueError("rate must lie in [0, 1]")
        super().__init__(base.field, base.arity, base.d)
        self.base, self.rate, self.seed = base, float(rate), int(seed)

    def _digest(self, index) -> bytes:
        h = hashlib.blake2b(index_key(index), digest_size=16,
                            key=self.seed.to_bytes(8, "little", signed=True))
        return h.digest()

    def corrupted(self, index) -> bool:
        u = int.from_bytes(self._digest(index)[:8], "little") / 2.0 ** 64
        return u < self.rate

    def value(self, index):
        value = self.base(index)
        if not self.corrupted(index):
            return value
        rng = np.random.default_rng(int.from_bytes(self._digest(index)[8:], "little"))
        delta = np.zeros(self.d, dtype=np.uint8)
        while not delta.any():
            delta = rng.integers(0, self.field.order, size=self.d, dtype=np.uint8)
        return value ^ delta

    def to_json(self):
        return {"kind": "seeded", "base": self.base.to_json(), "rate": self.rate, "seed": self.seed}


class RandomWord(WordOracle):
    """A uniformly random word, each entry derived from a keyed hash of its index."""

    provenance = "random"

    def __init__(self, field: FieldSpec, arity: int, d: int, seed: int):
        super().__init__(field, arity, d)
        self.seed = int(seed)

    def value(self, index):
        h = hashlib.blake2b(index_key(index), digest_size=16, key=self.seed.to_bytes(8, "little", signed=True))
        rng = np.random.default_rng(int.from_bytes(h.digest(), "little"))
        return rng.integers(0, self.field.order, size=self.d, dtype=np.uint8)

    def to_json(self):
        return {"kind": "random", "field": self.field.to_json(), "arity": self.arity, "d": self.d,
                "seed": self.seed}


def word_from_json(obj) -> WordOracle:
    kind = obj["kind"]
    if kind == "honest":
        return HonestWord(gfm.field_from_json(obj["field"]), obj["message"])
    if kind == "zero":
        return ZeroWord(gfm.field_from_json(obj["field"]), int(obj["arity"]), int(obj["d"]))
    if kind == "explicit":
        return ExplicitWord(gfm.field_from_json(obj["field"]), int(obj["arity"]), obj["table"])
    if kind == "overlay":
        return OverlayWord(word_from_json(obj["base"]), [tuple(p) for p in obj["patches"]])
    if kind == "seeded":
        return SeededWord(word_from_json(obj["base"]), obj["rate"], obj["seed"])
    if kind == "random":
        return RandomWord(gfm.field_from_json(obj["field"]), int(obj["arity"]), int(obj["d"]), obj["seed"])
    raise ValueError(f"unknown word kind {kind!r}")


def pwh_encode_point(F: FieldSpec, A, b) -> np.ndarray:
    return gfm.mat_vec_mul(F, gfm.as_array(F, A, ndim=2), gfm.as_array(F, b, ndim=1))


def blr_test(w: WordOracle, a, b) -> bool:
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    return bool(np.array_equal(w(a) ^ w(b), w(a ^ b)))


def blr_pass_rate(w: WordOracle, mode: str = "exhaustive", cap: int = EXPLICIT_CAP,
                  trials: int = 10_000, seed: int = 0):
    """Exact BLR acceptance as a Fraction, or a seeded Wilson estimate in ``"sampled"`` mode."""
    if mode == "exhaustive":
        size = w.domain_size()
        if size * size > cap:
            raise CapExceededError(f"{size * size} BLR pairs exceed cap {cap}")
        table = w.materialize(cap)
        ints = np.arange(size)
        # digit-wise xor of base-|F| indices is the xor of their integer encodings
        lhs = table[:, None, :] ^ table[None, :, :]
        rhs = table[ints[:, None] ^ ints[None, :]]
        passed = int(np.all(lhs == rhs, axis=2).sum())
        return Fraction(passed, size * size)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        ok = 0
        for _ in range(trials):
            a = rng.integers(0, w.field.order, size=w.arity, dtype=np.uint8)
            b = rng.integers(0, w.field.order, size=w.arity, dtype=np.uint8)
            ok += blr_test(w, a, b)
        return wilson(ok, trials, seed)
    raise ValueError(f"unknown mode {mode!r}")


def local_correct(w: WordOracle, x, a) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    a = np.asarray(a, dtype=np.uint8)
    return w(x ^ a) ^ w(a)


def distance_to_code(w: WordOracle, cap: int = EXPLICIT_CAP):
    """Exact relative distance to the nearest codeword and that codeword's message.

    Messages are scanned in lexicographic order of their row-major entries, so
    ties resolve to the first such message.
    """
    F = w.field
    messages = F.order ** (w.d * w.arity)
    if messages > cap or w.domain_size() > cap:
        raise CapExceededError(f"{messages} messages over {w.domain_size()} points exceed cap {cap}")
    table = w.materialize(cap)
    points = gfm.all_vectors(F, w.arity)
    best = None
    for entries in itertools.product(F.elements(), repeat=w.d * w.arity):
        A = np.array(entries, dtype=np.uint8).reshape(w.d, w.arity)
        code = gfm.xor_reduce(F.mul_table[A[None, :, :], points[:, None, :]], axis=2)
        diff = int(np.any(code != table, axis=1).sum())
        if best is None or diff < best[0]:
            best = (diff, A)
            if diff == 0:
                break
    return Fraction(best[0], w.domain_size()), best[1]
