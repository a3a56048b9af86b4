"""Verifier for the parallel constraints and its honest prover.

Proof blocks: ``pi1`` over ``F^k`` (shared with the linear verifier),
``tau1`` over ``GF(2)^(B*c)`` and ``tau2`` over ``GF(2)^(B*c*c)`` with
``B = 2^m`` blocks, both with alphabet ``GF(2)^d``. Honestly, coordinate ``j``
of ``tau1`` encodes the gate values ``u`` of the conjunction circuit for the
constraint set ``kappa(j)``, placed in that set's block; ``tau2`` encodes
``u u^T`` the same way.
"""
from __future__ import annotations

import numpy as np

from .. import csp
from .. import gf as gfm
from ..exceptions import NotASolutionError
from ..hadamard import HonestWord
from ..quadeq import ParallelSystem, block_of, set_of_block
from ..tape import Tape
from .blocks import (BlockSparseWord, Dense, FunctionIndex, MaskedIndex, OuterIndex, Rank1,
                     ShiftIndex, TapeIndex, pairs_from_cells)
from .core import Descriptor, Verifier

BINARY = frozenset({"tau1", "tau2"})


class ParallelVerifier(Verifier):
    name = "A_P"
    tests = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8")

    def __init__(self, G_P: csp.VecCspInstance, system: ParallelSystem | None = None):
        self.instance = G_P
        self.system = system or ParallelSystem(G_P)
        self.field = G_P.field
        self.k, self.m, self.d, self.t = G_P.k, G_P.m, G_P.d, G_P.field.t
        self.blocks = 1 << self.m
        self.c, self.q = self.system.c, self.system.q
        self.kappa_blocks = np.array([block_of(self.system.kappa[j]) for j in range(self.d)], dtype=np.int64)

    def randomness_bits(self, test):
        B, c, q, k, t = self.blocks, self.c, self.q, self.k, self.t
        return {"P1": 2 * k * t, "P2": 2 * B * c, "P3": 2 * B * c * c, "P4": B + 2 * B * c,
                "P5": B + 2 * B * c * c, "P6": (2 * c + c * c) * B, "P7": q + B * c * c,
                "P8": k + k * t + t + B * c}[test]

    def _desc(self, test, tape, queries, predicate, elements):
        return Descriptor(self.name, test, tape.key, queries, predicate, elements, BINARY)

    def constraint_rhs(self, H) -> np.ndarray:
        """Per coordinate, the sum over ``z`` in ``H`` of the right-hand sides for ``kappa(j)``."""
        out = np.zeros(self.d, dtype=np.uint8)
        for j in range(self.d):
            eqs = self.system.quadeq(self.system.kappa[j]).equations
            out[j] = sum(eqs[z].rhs for z in H) & 1
        return out

    def constraint_index(self, H: tuple):
        def block(S):
            eqs = self.system.quadeq(set_of_block(S)).equations
            cells = set()
            for z in H:
                cells ^= eqs[z].entries
            return [pairs_from_cells(cells)] if cells else []

        return FunctionIndex(block, ("constraint", H), self.blocks, self.c * self.c)

    def describe(self, test, tape: Tape) -> Descriptor:
        F, k, t, B, c = self.field, self.k, self.t, self.blocks, self.c
        cc = c * c
        if test == "P1":
            a, b = tape.elements(F, 0, k), tape.elements(F, k * t, k)
            return self._desc(test, tape, [("pi1", a), ("pi1", b), ("pi1", a ^ b)], _blr, {"alpha": a, "beta": b})
        if test in ("P2", "P3"):
            block, L = ("tau1", c) if test == "P2" else ("tau2", cc)
            a, b = TapeIndex(tape, 0, B, L), TapeIndex(tape, B * L, B, L)
            return self._desc(test, tape, [(block, a), (block, b), (block, a + b)], _blr, {"alpha": a, "beta": b})
        if test in ("P4", "P5"):
            block, L = ("tau1", c) if test == "P4" else ("tau2", cc)
            alpha = MaskedIndex(TapeIndex(tape, B, B, L), tape, 0)
            beta = TapeIndex(tape, B + B * L, B, L)
            outside = np.array([not alpha.keeps(int(S)) for S in self.kappa_blocks], dtype=bool)

            def zero_check(ans):
                return not np.any((ans[0] ^ ans[1])[outside])

            T = [S for S in range(B) if alpha.keeps(S)] if B <= 1 << 16 else None
            return self._desc(test, tape, [(block, beta), (block, alpha + beta)], zero_check,
                              {"T": T, "alpha": alpha, "beta": beta})
        if test == "P6":
            r, r2 = TapeIndex(tape, 0, B, c), TapeIndex(tape, B * c, B, c)
            y = TapeIndex(tape, 2 * B * c, B, cc)
            queries = [("tau1", r), ("tau1", r2), ("tau2", y), ("tau2", y + OuterIndex(r, r2))]

            def tensor_check(ans):
                return np.array_equal(ans[0] & ans[1], ans[2] ^ ans[3])

            return self._desc(test, tape, queries, tensor_check, {"r": r, "r2": r2, "y": y})
        if test == "P7":
            H = tuple(int(z) for z in np.flatnonzero(tape.bits(0, self.q)))
            beta = TapeIndex(tape, self.q, B, cc)
            alpha = self.constraint_index(H)
            rhs = self.constraint_rhs(H)

            def constraint_check(ans):
                return np.array_equal(ans[0] ^ ans[1], rhs)

            return self._desc(test, tape, [("tau2", beta), ("tau2", alpha + beta)], constraint_check,
                              {"H": H, "beta": beta, "rhs": rhs})
        if test == "P8":
            D = tape.bits(0, k).astype(bool)
            beta = tape.elements(F, k, k)
            gamma = tape.bits(k + k * t, t)
            xi = TapeIndex(tape, k + k * t + t, B, c)
            alpha = D.astype(np.uint8)
            eta = np.zeros(c, dtype=np.uint8)
            for i in np.flatnonzero(D):
                slot = self.system.input_slot(int(i))
                eta[slot:slot + t] = gamma
            mask = int(sum(int(g) << i for i, g in enumerate(gamma)))
            queries = [("pi1", beta), ("pi1", alpha ^ beta), ("tau1", xi), ("tau1", ShiftIndex(xi, eta))]

            def consistency_check(ans):
                s = (ans[0] ^ ans[1]) & mask
                parity = np.array([bin(int(x)).count("1") & 1 for x in s], dtype=np.uint8)
                return np.array_equal(parity, ans[2] ^ ans[3])

            return self._desc(test, tape, queries, consistency_check,
                              {"D": D, "beta": beta, "gamma": gamma, "xi": xi, "eta": eta})
        raise ValueError(f"unknown test {test!r}")


def _blr(ans) -> bool:
    return bool(np.array_equal(ans[0] ^ ans[1], ans[2]))


def empty_tau_words(verifier: ParallelVerifier):
    v = verifier
    tau1 = BlockSparseWord(v.d, v.blocks, v.c, v.c)
    tau2 = BlockSparseWord(v.d, v.blocks, v.c * v.c, v.c)
    return tau1, tau2


def build_honest_parallel_proof(G_P: csp.VecCspInstance, sigma, verifier: ParallelVerifier | None = None,
                                require_solution: bool = True) -> dict:
    """``pi1``, ``tau1`` and ``tau2`` for ``sigma``; only the blocks ``kappa(j)`` are populated."""
    sigma = csp.as_assignment(G_P, sigma)
    if require_solution and csp.evaluate(G_P, sigma) != 1:
        raise NotASolutionError("assignment violates a parallel constraint")
    verifier = verifier or ParallelVerifier(G_P)
    tau1, tau2 = empty_tau_words(verifier)
    for j in range(G_P.d):
        u = verifier.system.witness(sigma, j)
        S = int(verifier.kappa_blocks[j])
        tau1.add(j, S, Dense(u))
        tau2.add(j, S, Rank1(u, u))
    return {"pi1": HonestWord(G_P.field, sigma.T), "tau1": tau1, "tau2": tau2}


def gate_witnesses(verifier: ParallelVerifier, sigma) -> list:
    return [verifier.system.witness(sigma, j) for j in range(verifier.d)]
