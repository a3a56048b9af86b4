"""The combined verifier: with probability 1/2 each, run the linear or the parallel verifier.

Both halves read the same ``pi1``; the proof is the union of their blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import csp
from ..exceptions import NotASolutionError
from .core import Verifier
from .linear import LinearVerifier, build_honest_linear_proof
from .parallel import ParallelVerifier, build_honest_parallel_proof


@dataclass(frozen=True)
class Parameters:
    queries: int = 4
    delta: Fraction = Fraction(1, 25)
    epsilon: Fraction = Fraction(1, 2400)
    epsilon_linear: Fraction = Fraction(1, 600)
    epsilon_parallel: Fraction = Fraction(1, 1200)
    epsilon_gap: Fraction = Fraction(1, 9600)

    def __post_init__(self):
        if not 0 < self.epsilon_linear < Fraction(1, 400):
            raise ValueError("linear soundness parameter must lie in (0, 1/400)")
        if not 0 < self.epsilon_parallel < Fraction(1, 800):
            raise ValueError("parallel soundness parameter must lie in (0, 1/800)")

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


class CombinedVerifier(Verifier):
    name = "A"

    def __init__(self, G: csp.VecCspInstance, parameters: Parameters | None = None):
        self.instance = G
        self.G_L, self.G_P = csp.split_instance(G)
        self.linear = LinearVerifier(self.G_L)
        self.parallel = ParallelVerifier(self.G_P)
        self.parameters = parameters or Parameters()
        self.tests = tuple(f"{v.name}/{t}" for v in (self.linear, self.parallel) for t in v.tests)

    def branches(self):
        half = Fraction(1, 2)
        return ([(half * w, v, t) for w, v, t in self.linear.branches()]
                 + [(half * w, v, t) for w, v, t in self.parallel.branches()])

    def randomness_bits(self, test):
        verifier, name = test.split("/")
        return (self.linear if verifier == self.linear.name else self.parallel).randomness_bits(name)

    def describe(self, test, tape):
        verifier, name = test.split("/")
        return (self.linear if verifier == self.linear.name else self.parallel).describe(name, tape)


def build_honest_combined_proof(G: csp.VecCspInstance, sigma, verifier: CombinedVerifier | None = None,
                                require_solution: bool = True) -> dict:
    if require_solution and csp.evaluate(G, sigma) != 1:
        raise NotASolutionError("assignment does not satisfy the instance")
    verifier = verifier or CombinedVerifier(G)
    linear = build_honest_linear_proof(verifier.G_L, sigma, require_solution=False)
    parallel = build_honest_parallel_proof(verifier.G_P, sigma, verifier.parallel, require_solution=False)
    return {**linear, **parallel}


def verifier_for(G: csp.VecCspInstance, which: str = "auto"):
    """Pick a verifier: ``linear``, ``parallel``, ``combined`` or ``auto``.

    ``auto`` uses the linear or parallel verifier alone when the instance has
    only one kind of constraint, and the combined verifier otherwise.
    """
    if which == "auto":
        L, P = csp.split_instance(G)
        which = "linear" if P.m == 0 else "parallel" if L.m == 0 else "combined"
    if which == "linear":
        return LinearVerifier(csp.split_instance(G)[0])
    if which == "parallel":
        return ParallelVerifier(csp.split_instance(G)[1])
    if which == "combined":
        return CombinedVerifier(G)
    raise ValueError(f"unknown verifier {which!r}")


def build_honest_proof(verifier, sigma, require_solution: bool = True) -> dict:
    if isinstance(verifier, CombinedVerifier):
        return build_honest_combined_proof(verifier.instance, sigma, verifier, require_solution)
    if isinstance(verifier, LinearVerifier):
        return build_honest_linear_proof(verifier.instance, sigma, require_solution)
    return build_honest_parallel_proof(verifier.instance, sigma, verifier, require_solution)
