"""Lazy indices into, and sparse messages behind, the block-structured binary words.

The words queried by the parallel verifier are indexed by ``GF(2)^(B*L)``:
``B = 2^m`` blocks of length ``L`` (``c`` or ``c*c``). Such an index can
have billions of bits, so it is represented lazily. ``index.block(S)``
returns the block-``S`` slice as a list of terms whose xor is the slice:

* ``Dense(bits)``: an explicit bit vector of length ``L``;
* ``Rank1(x, y)``: the flattened ``c x c`` matrix ``x y^T``;
* ``Pairs(rows, cols)``: a matrix with ones at the listed cells, each cell
  listed at most once.

An honest message only populates a few blocks per coordinate, so the value
of a word at an index is a short sum of inner products between those
blocks and the matching slices of the index.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..tape import Tape


@dataclass(frozen=True, eq=False)
class Dense:
    bits: np.ndarray


@dataclass(frozen=True, eq=False)
class Rank1:
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True, eq=False)
class Pairs:
    rows: np.ndarray
    cols: np.ndarray


def pairs_from_cells(cells) -> Pairs:
    cells = sorted(cells)
    rows = np.array([a for a, _ in cells], dtype=np.int64)
    cols = np.array([b for _, b in cells], dtype=np.int64)
    return Pairs(rows, cols)


def _support(v: np.ndarray) -> np.ndarray:
    return np.flatnonzero(v)


def inner(a, b, c: int) -> int:
    """GF(2) inner product of two block terms; ``c`` is the side of square blocks."""
    if isinstance(b, Dense) and not isinstance(a, Dense):
        a, b = b, a
    if isinstance(a, Dense):
        if isinstance(b, Dense):
            return int(np.count_nonzero(a.bits & b.bits)) & 1
        X = a.bits.reshape(c, c)
        if isinstance(b, Rank1):
            # x^T X y: xor the rows picked by x, then pair with y
            rows = np.bitwise_xor.reduce(X[_support(b.x)], axis=0)
            return int(np.count_nonzero(rows & b.y)) & 1
        return int(np.count_nonzero(X[b.rows, b.cols])) & 1
    if isinstance(a, Pairs) and isinstance(b, Rank1):
        a, b = b, a
    if isinstance(a, Rank1):
        if isinstance(b, Rank1):
            return (int(np.count_nonzero(a.x & b.x)) & 1) & (int(np.count_nonzero(a.y & b.y)) & 1)
        return int(np.count_nonzero(a.x[b.rows] & a.y[b.cols])) & 1
    raise TypeError("cannot pair two cell lists")


def densify(term, length: int, c: int) -> np.ndarray:
    if isinstance(term, Dense):
        return np.asarray(term.bits, dtype=np.uint8)
    out = np.zeros((c, c), dtype=np.uint8)
    if isinstance(term, Rank1):
        out = np.outer(term.x, term.y).astype(np.uint8) & 1
    else:
        out[term.rows, term.cols] ^= 1
    return out.reshape(length)


# -- lazy indices -------------------------------------------------------------------

class BlockIndex:
    """An element of ``GF(2)^(blocks*length)`` known block by block."""

    def __init__(self, blocks: int, length: int):
        self.blocks = blocks
        self.length = length

    def block(self, S: int) -> list:
        raise NotImplementedError

    @property
    def key(self) -> tuple:
        raise NotImplementedError

    def __add__(self, other: "BlockIndex") -> "BlockIndex":
        return SumIndex(self, other)

    def dense(self, c: int, cap: int = 1 << 20) -> np.ndarray:
        """The whole index as a bit vector, for small layouts only."""
        total = self.blocks * self.length
        if total > cap:
            raise ValueError(f"index of {total} bits is too large to materialize")
        out = np.zeros(total, dtype=np.uint8)
        for S in range(self.blocks):
            for term in self.block(S):
                out[S * self.length:(S + 1) * self.length] ^= densify(term, self.length, c)
        return out


class ZeroIndex(BlockIndex):
    def block(self, S):
        return []

    @property
    def key(self):
        return ("zero",)


class TapeIndex(BlockIndex):
    """Blocks read straight off a tape starting at ``offset``."""

    def __init__(self, tape: Tape, offset: int, blocks: int, length: int):
        super().__init__(blocks, length)
        self.tape, self.offset = tape, offset

    def block(self, S):
        return [Dense(self.tape.bits(self.offset + S * self.length, self.length))]

    @property
    def key(self):
        return ("tape", self.tape.window_key(self.offset, self.blocks * self.length), self.length)


class DenseIndex(BlockIndex):
    """An explicit index given as a full bit vector (micro layouts)."""

    def __init__(self, bits, blocks: int, length: int):
        super().__init__(blocks, length)
        bits = np.array(bits, dtype=np.uint8)
        if bits.shape != (blocks * length,):
            raise ValueError(f"expected {blocks * length} bits")
        bits.setflags(write=False)
        self.bits = bits

    def block(self, S):
        return [Dense(self.bits[S * self.length:(S + 1) * self.length])]

    @property
    def key(self):
        return ("dense", self.bits.tobytes())


class SparseIndex(BlockIndex):
    """An index with ones at a few ``(block, offset)`` positions."""

    def __init__(self, ones, blocks: int, length: int):
        super().__init__(blocks, length)
        self.ones = {}
        for S, pos in ones:
            self.ones.setdefault(int(S), set()).symmetric_difference_update({int(pos)})

    def block(self, S):
        pos = self.ones.get(S)
        if not pos:
            return []
        bits = np.zeros(self.length, dtype=np.uint8)
        bits[sorted(pos)] = 1
        return [Dense(bits)]

    @property
    def key(self):
        return ("sparse", tuple(sorted((S, tuple(sorted(p))) for S, p in self.ones.items() if p)))


class SumIndex(BlockIndex):
    def __init__(self, a: BlockIndex, b: BlockIndex):
        if (a.blocks, a.length) != (b.blocks, b.length):
            raise ValueError("cannot add indices of different layouts")
        super().__init__(a.blocks, a.length)
        self.a, self.b = a, b

    def block(self, S):
        return self.a.block(S) + self.b.block(S)

    @property
    def key(self):
        return ("sum", self.a.key, self.b.key)


class MaskedIndex(BlockIndex):
    """``base`` with every block outside ``keep`` zeroed; ``keep`` is a bit tape field."""

    def __init__(self, base: BlockIndex, tape: Tape, offset: int):
        super().__init__(base.blocks, base.length)
        self.base, self.tape, self.offset = base, tape, offset

    def keeps(self, S: int) -> bool:
        return bool(self.tape.bit(self.offset + S))

    def block(self, S):
        return self.base.block(S) if self.keeps(S) else []

    @property
    def key(self):
        return ("masked", self.base.key, self.tape.window_key(self.offset, self.blocks))


class OuterIndex(BlockIndex):
    """Block ``S`` is ``r_S r'_S^T`` for two length-``c`` indices ``r`` and ``r'``."""

    def __init__(self, r: BlockIndex, r2: BlockIndex):
        super().__init__(r.blocks, r.length * r.length)
        self.r, self.r2 = r, r2
        self.c = r.length

    def _vec(self, idx, S):
        out = np.zeros(self.c, dtype=np.uint8)
        for term in idx.block(S):
            out ^= term.bits
        return out

    def block(self, S):
        return [Rank1(self._vec(self.r, S), self._vec(self.r2, S))]

    @property
    def key(self):
        return ("outer", self.r.key, self.r2.key)


class ShiftIndex(BlockIndex):
    """``base`` with the same vector ``eta`` added to every block."""

    def __init__(self, base: BlockIndex, eta):
        super().__init__(base.blocks, base.length)
        eta = np.array(eta, dtype=np.uint8)
        eta.setflags(write=False)
        self.base, self.eta = base, eta

    def block(self, S):
        return self.base.block(S) + [Dense(self.eta)]

    @property
    def key(self):
        return ("shift", self.base.key, self.eta.tobytes())


class FunctionIndex(BlockIndex):
    """Blocks computed on demand by ``fn(S)``, identified by ``label``."""

    def __init__(self, fn, label: tuple, blocks: int, length: int):
        super().__init__(blocks, length)
        self.fn, self.label = fn, label
        self._memo = {}

    def block(self, S):
        if S not in self._memo:
            self._memo[S] = list(self.fn(S))
        return self._memo[S]

    @property
    def key(self):
        return ("function",) + self.label


# -- messages and words --------------------------------------------------------------

class BlockSparseWord:
    """``PWH_2`` of a message supported on a few blocks per coordinate.

    ``content[j]`` maps a block number to a list of ``Dense``/``Rank1``
    terms whose xor is coordinate ``j``'s message restricted to that block.
    The value at an index is, per coordinate, the GF(2) inner product of the
    message with the index.
    """

    def __init__(self, d: int, blocks: int, length: int, c: int, content=None, provenance="honest"):
        self.d, self.blocks, self.length, self.c = d, blocks, length, c
        self.content = [dict() for _ in range(d)] if content is None else [dict(x) for x in content]
        self.provenance = provenance

    def copy(self, provenance=None) -> "BlockSparseWord":
        content = [{S: list(terms) for S, terms in coord.items()} for coord in self.content]
        return BlockSparseWord(self.d, self.blocks, self.length, self.c, content,
                               provenance or self.provenance)

    def add(self, j: int, S: int, term) -> None:
        self.content[j].setdefault(S, []).append(term)

    def clear(self, j: int, S: int) -> None:
        self.content[j].pop(S, None)

    def __call__(self, index: BlockIndex) -> np.ndarray:
        if (index.blocks, index.length) != (self.blocks, self.length):
            raise ValueError("index layout does not match the word")
        out = np.zeros(self.d, dtype=np.uint8)
        slices = {}
        for j in range(self.d):
            acc = 0
            for S, terms in self.content[j].items():
                if S not in slices:
                    slices[S] = index.block(S)
                for mine in terms:
                    for theirs in slices[S]:
                        acc ^= inner(mine, theirs, self.c)
            out[j] = acc
        return out

    def key(self, index: BlockIndex):
        return index.key


class ZeroBlockWord(BlockSparseWord):
    def __init__(self, d, blocks, length, c):
        super().__init__(d, blocks, length, c, provenance="zero")


class RandomBlockWord:
    """A word whose value at every index is pseudo-random, keyed by seed and index identity."""

    provenance = "random"

    def __init__(self, d: int, blocks: int, length: int, seed: int):
        self.d, self.blocks, self.length, self.seed = d, blocks, length, seed

    def __call__(self, index: BlockIndex) -> np.ndarray:
        digest = hashlib.blake2b(repr((self.seed, index.key)).encode(), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.integers(0, 2, size=self.d, dtype=np.uint8)

    def key(self, index):
        return index.key
