"""Verifier for the linear constraints and its honest prover.

Proof blocks: ``pi1`` over ``F^k`` (the encoding of the assignment) and
``piL`` over ``F^(k*m)``, the encoding of the auxiliary values
``z[p, e] = M_e sigma(p)`` for every vertex ``p`` and constraint ``e``,
stored at position ``p*m + e``.
"""
from __future__ import annotations

import numpy as np

from .. import csp
from .. import gf as gfm
from ..exceptions import NotASolutionError
from ..hadamard import HonestWord
from ..tape import Tape
from .core import Descriptor, Verifier


class LinearVerifier(Verifier):
    name = "A_L"
    tests = ("L1", "L2", "L3", "L4")

    def __init__(self, G_L: csp.VecCspInstance):
        if any(not isinstance(c, csp.Linear) for c in G_L.constraints):
            raise ValueError("the linear verifier needs an all-linear instance")
        self.instance = G_L
        self.field = G_L.field
        self.k, self.m, self.d = G_L.k, G_L.m, G_L.d
        self.matrices = np.array([c.M for c in G_L.constraints], dtype=np.uint8).reshape(self.m, self.d, self.d)
        self.heads = np.array([c.u for c in G_L.constraints], dtype=np.int64)
        self.tails = np.array([c.v for c in G_L.constraints], dtype=np.int64)

    def randomness_bits(self, test):
        k, m, t = self.k, self.m, self.field.t
        return {"L1": 2 * k, "L2": 2 * k * m, "L3": 2 * k + m + k * m, "L4": k + m + k * m}[test] * t

    def combine_matrices(self, mu) -> np.ndarray:
        """``M_0 = sum_e mu_e M_e``."""
        F = self.field
        if self.m == 0:
            return np.zeros((self.d, self.d), dtype=np.uint8)
        return gfm.xor_reduce(F.mul_table[np.asarray(mu)[:, None, None], self.matrices], axis=0)

    def describe(self, test, tape: Tape) -> Descriptor:
        F, k, m, t = self.field, self.k, self.m, self.field.t
        elems = lambda offset, n: tape.elements(F, offset * t, n)
        if test == "L1":
            a1, a2 = elems(0, k), elems(k, k)
            queries = [("pi1", a1), ("pi1", a2), ("pi1", a1 ^ a2)]
            return Descriptor(self.name, test, tape.key, queries, _blr, {"a1": a1, "a2": a2})
        if test == "L2":
            b1, b2 = elems(0, k * m), elems(k * m, k * m)
            queries = [("piL", b1), ("piL", b2), ("piL", b1 ^ b2)]
            return Descriptor(self.name, test, tape.key, queries, _blr, {"b1": b1, "b2": b2})
        if test == "L3":
            lam, mu = elems(0, k), elems(k, m)
            a, b = elems(k + m, k), elems(2 * k + m, k * m)
            gamma = F.mul_table[lam[:, None], mu[None, :]].reshape(k * m)
            M0 = self.combine_matrices(mu)

            def check(ans):
                return np.array_equal(ans[3] ^ ans[2], gfm.mat_vec_mul(F, M0, ans[1] ^ ans[0]))

            queries = [("pi1", a), ("pi1", a ^ lam), ("piL", b), ("piL", b ^ gamma)]
            return Descriptor(self.name, test, tape.key, queries, check,
                              {"lambda": lam, "mu": mu, "a": a, "b": b, "gamma": gamma, "M0": M0})
        if test == "L4":
            mu = elems(0, m)
            a, b = elems(m, k), elems(m + k, k * m)
            lam = np.zeros(k, dtype=np.uint8)
            gamma = np.zeros((k, m), dtype=np.uint8)
            for e in range(m):
                lam[self.heads[e]] ^= mu[e]
                gamma[self.tails[e], e] = mu[e]
            gamma = gamma.reshape(k * m)
            queries = [("pi1", a), ("pi1", a ^ lam), ("piL", b), ("piL", b ^ gamma)]
            return Descriptor(self.name, test, tape.key, queries, _difference_match,
                              {"mu": mu, "a": a, "b": b, "lambda": lam, "gamma": gamma})
        raise ValueError(f"unknown test {test!r}")


def _blr(ans) -> bool:
    return bool(np.array_equal(ans[0] ^ ans[1], ans[2]))


def _difference_match(ans) -> bool:
    return bool(np.array_equal(ans[3] ^ ans[2], ans[1] ^ ans[0]))


def auxiliary_values(G_L: csp.VecCspInstance, sigma) -> np.ndarray:
    """``d x (k*m)`` matrix whose column ``p*m + e`` is ``M_e sigma(p)``."""
    F = G_L.field
    sigma = csp.as_assignment(G_L, sigma)
    cols = np.zeros((G_L.k, G_L.m, G_L.d), dtype=np.uint8)
    for e, c in enumerate(G_L.constraints):
        for p in range(G_L.k):
            cols[p, e] = gfm.mat_vec_mul(F, c.M, sigma[p])
    return cols.reshape(G_L.k * G_L.m, G_L.d).T.copy()


def build_honest_linear_proof(G_L: csp.VecCspInstance, sigma, require_solution: bool = True) -> dict:
    sigma = csp.as_assignment(G_L, sigma)
    if require_solution and csp.evaluate(G_L, sigma) != 1:
        raise NotASolutionError("assignment violates a linear constraint")
    F = G_L.field
    return {"pi1": HonestWord(F, sigma.T), "piL": HonestWord(F, auxiliary_values(G_L, sigma))}
