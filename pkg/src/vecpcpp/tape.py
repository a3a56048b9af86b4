"""Random tapes addressed by absolute bit offset.

A verifier test reads its random choices as consecutive bit fields of a
tape. :class:`IndexTape` is the tape whose bits are the binary digits of a
canonical randomness index, used for exhaustive enumeration. :class:`SeededTape`
draws bits from a counter-based generator keyed by ``(seed, sample)``, so any
bit range can be produced directly without generating the bits before it.
"""
from __future__ import annotations

import numpy as np

from .gf import FieldSpec


class Tape:
    key: tuple

    def bits(self, offset: int, n: int) -> np.ndarray:
        raise NotImplementedError

    def window_key(self, offset: int, n: int) -> tuple:
        """Identity of the bit window ``[offset, offset + n)``."""
        return (self.key, offset, n)

    def bit(self, offset: int) -> int:
        return int(self.bits(offset, 1)[0])

    def integer(self, offset: int, n: int) -> int:
        out = 0
        for i, b in enumerate(self.bits(offset, n).tolist()):
            out |= b << i
        return out

    def elements(self, F: FieldSpec, offset: int, count: int) -> np.ndarray:
        """``count`` field elements, each ``t`` little-endian bits, starting at ``offset``."""
        raw = self.bits(offset, count * F.t).reshape(count, F.t)
        weights = (1 << np.arange(F.t)).astype(np.uint8)
        return (raw * weights).sum(axis=1).astype(np.uint8)


class IndexTape(Tape):
    def __init__(self, index: int):
        if index < 0:
            raise ValueError("randomness index must be non-negative")
        self.index = index
        self.key = ("index", index)

    def window_key(self, offset, n):
        # canonical: two tapes with equal bits in the window give equal keys
        return ("bits", (self.index >> offset) & ((1 << n) - 1), n)

    def bits(self, offset, n):
        if n == 0:
            return np.zeros(0, dtype=np.uint8)
        chunk = (self.index >> offset) & ((1 << n) - 1)
        raw = np.frombuffer(chunk.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:n]


class SeededTape(Tape):
    """Philox stream keyed by ``(seed, sample)``; bit ``i`` is bit ``i % 64`` of word ``i // 64``."""

    def __init__(self, seed: int, sample: int):
        self.seed = int(seed) & (2**64 - 1)
        self.sample = int(sample) & (2**64 - 1)
        self.key = ("seeded", self.seed, self.sample)
        self._cache = {}

    def _words(self, first: int, count: int) -> np.ndarray:
        start = first // 4
        skip = first - 4 * start
        gen = np.random.Philox(key=np.array([self.seed, self.sample], dtype=np.uint64),
                               counter=np.array([start, 0, 0, 0], dtype=np.uint64))
        return gen.random_raw(skip + count)[skip:].astype(np.uint64)

    def bits(self, offset, n):
        if n == 0:
            return np.zeros(0, dtype=np.uint8)
        cached = self._cache.get((offset, n))
        if cached is not None:
            return cached
        first = offset // 64
        last = (offset + n - 1) // 64
        words = self._words(first, last - first + 1)
        raw = np.unpackbits(words.view(np.uint8), bitorder="little")
        out = raw[offset - 64 * first: offset - 64 * first + n]
        out.setflags(write=False)
        if len(self._cache) > 64:
            self._cache.clear()
        self._cache[(offset, n)] = out
        return out


class OverrideTape(Tape):
    """``base`` with some leading bit fields replaced by fixed values."""

    def __init__(self, base: Tape, overrides: dict):
        self.base = base
        self.overrides = {int(o): np.asarray(v, dtype=np.uint8) for o, v in overrides.items()}
        self.key = ("override", base.key,
                    tuple(sorted((o, v.tobytes()) for o, v in self.overrides.items())))

    def bits(self, offset, n):
        out = np.array(self.base.bits(offset, n), dtype=np.uint8)
        for o, v in self.overrides.items():
            lo, hi = max(o, offset), min(o + len(v), offset + n)
            if lo < hi:
                out[lo - offset: hi - offset] = v[lo - o: hi - o]
        return out
