"""Small named instances used by the tests, the self-test and the documentation."""
from __future__ import annotations

import numpy as np

from . import csp, sat2vec
from .gf import GF2

NAND = np.array([[1, 1], [1, 0]], dtype=bool)


def lin1() -> csp.VecCspInstance:
    """Two GF(2) variables of dimension 1 joined by an equality constraint."""
    return csp.VecCspInstance(GF2, 1, 2, (csp.linear(0, 1, [[1]]),))


def par1() -> csp.VecCspInstance:
    """Two GF(2)^2 variables joined by NAND on both coordinates."""
    return csp.VecCspInstance(GF2, 2, 2, (csp.parallel(0, 1, NAND, [0, 1]),))


LIN1_SOLUTION = np.array([[1], [1]], dtype=np.uint8)
LIN1_NON_SOLUTION = np.array([[1], [0]], dtype=np.uint8)
PAR1_SOLUTION = np.array([[0, 1], [1, 0]], dtype=np.uint8)


def sat1() -> sat2vec.Cnf3:
    """The single clause ``x1 or x2 or x3``."""
    return sat2vec.Cnf3(3, ((1, 2, 3),))


FIXTURES = {"LIN-1": lin1, "PAR-1": par1}


def random_cnf3(rng: np.random.Generator, n: int, m: int, max_occurrences: int | None = None,
                attempts: int = 1000) -> sat2vec.Cnf3:
    """A random formula of ``m`` clauses over three distinct variables each.

    With ``max_occurrences`` set, redraw until no variable occurs more often.
    """
    for _ in range(attempts):
        clauses = []
        for _ in range(m):
            xs = rng.choice(n, size=3, replace=False) + 1
            signs = rng.choice([-1, 1], size=3)
            clauses.append(tuple(int(x * s) for x, s in zip(xs, signs)))
        phi = sat2vec.Cnf3(n, tuple(clauses))
        if max_occurrences is None or sat2vec.check_structure(phi)["max_occurrences"] <= max_occurrences:
            return phi
    raise RuntimeError("could not draw a formula with the requested occurrence bound")


def random_circuit(rng: np.random.Generator, n_inputs: int, n_gates: int):
    """A random circuit of ``n_gates`` logic gates; the last gate is the output."""
    from .quadeq import BoolCircuit
    gates = [("IN", 0, 0)] * n_inputs
    for g in range(n_inputs, n_inputs + n_gates):
        op = str(rng.choice(["AND", "OR", "NOT"]))
        a, b = (int(x) for x in rng.integers(0, g, size=2))
        gates.append((op, a, 0 if op == "NOT" else b))
    return BoolCircuit(n_inputs, tuple(gates), len(gates) - 1)
