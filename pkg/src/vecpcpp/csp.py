"""Vector-valued CSPs, generic gap CSPs, evaluation and a brute-force solver.

A :class:`VecCspInstance` has ``k`` variables over ``F^d``. Each constraint is
either :class:`Linear` (``sigma[u] == M @ sigma[v]``, ``u`` being the head) or
:class:`Parallel` (``sub[sigma[u][i], sigma[v][i]]`` for every ``i`` in ``Q``).
Assignments are ``(k, d)`` uint8 arrays.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import gf as gfm
from .exceptions import CapExceededError, ShapeError
from .gf import FieldSpec

DEFAULT_SEARCH_CAP = 1 << 24


@dataclass(frozen=True, eq=False)
class Linear:
    u: int
    v: int
    M: np.ndarray

    kind = "linear"

    def holds(self, F: FieldSpec, su: np.ndarray, sv: np.ndarray) -> bool:
        return bool(np.array_equal(su, gfm.mat_vec_mul(F, self.M, sv)))


@dataclass(frozen=True, eq=False)
class Parallel:
    u: int
    v: int
    sub: np.ndarray  # (|F|, |F|) booleans, rows indexed by the head value
    Q: tuple

    kind = "parallel"

    def holds(self, F: FieldSpec, su: np.ndarray, sv: np.ndarray) -> bool:
        if not self.Q:
            return True
        q = np.asarray(self.Q, dtype=np.int64)
        return bool(self.sub[su[q], sv[q]].all())


def linear(u: int, v: int, M) -> Linear:
    return Linear(int(u), int(v), gfm.frozen(M))


def parallel(u: int, v: int, sub, Q) -> Parallel:
    sub = np.array(sub, dtype=bool)
    sub.setflags(write=False)
    return Parallel(int(u), int(v), sub, tuple(sorted(int(i) for i in Q)))


def linear_form_of(F: FieldSpec, con: Parallel, d: int):
    """Return the matrix of an equivalent linear constraint, or ``None``.

    A parallel constraint is linear exactly when it covers every coordinate
    and its sub-constraint is the graph of ``x -> a*x`` for some scalar ``a``.
    """
    if len(con.Q) != d:
        return None
    for a in F.elements():
        graph = np.zeros((F.order, F.order), dtype=bool)
        for x in F.elements():
            graph[F.mul(a, x), x] = True
        if np.array_equal(graph, con.sub):
            return (np.eye(d, dtype=np.uint8) * a).astype(np.uint8)
    return None


def make_constraint(F: FieldSpec, d: int, u: int, v: int, sub, Q):
    """Build a parallel constraint, reclassified as linear when it is one."""
    con = parallel(u, v, sub, Q)
    M = linear_form_of(F, con, d)
    return con if M is None else linear(u, v, M)


@dataclass(frozen=True, eq=False)
class VecCspInstance:
    field: FieldSpec
    d: int
    k: int
    constraints: tuple
    names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def linear_constraints(self):
        return [c for c in self.constraints if isinstance(c, Linear)]

    def parallel_constraints(self):
        return [c for c in self.constraints if isinstance(c, Parallel)]

    @cached_property
    def compiled(self) -> dict:
        """Constraints stacked into arrays for vectorized evaluation."""
        lin, par = self.linear_constraints(), self.parallel_constraints()
        d, order = self.d, self.field.order
        mask = np.zeros((len(par), d), dtype=bool)
        for i, c in enumerate(par):
            mask[i, list(c.Q)] = True
        return {
            "lin_u": np.array([c.u for c in lin], dtype=np.int64),
            "lin_v": np.array([c.v for c in lin], dtype=np.int64),
            "lin_M": np.array([c.M for c in lin], dtype=np.uint8).reshape(len(lin), d, d),
            "par_u": np.array([c.u for c in par], dtype=np.int64),
            "par_v": np.array([c.v for c in par], dtype=np.int64),
            "par_sub": np.array([c.sub for c in par], dtype=bool).reshape(len(par), order, order),
            "par_mask": mask,
        }

    def with_constraints(self, constraints) -> "VecCspInstance":
        return VecCspInstance(self.field, self.d, self.k, tuple(constraints), self.names)

    def to_json(self) -> dict:
        cons = []
        for c in self.constraints:
            if isinstance(c, Linear):
                cons.append({"u": c.u, "v": c.v, "kind": "linear", "M": c.M.tolist()})
            else:
                cons.append({"u": c.u, "v": c.v, "kind": "parallel", "Q": list(c.Q),
                             "sub": c.sub.astype(int).tolist()})
        out = {"field": self.field.to_json(), "d": self.d, "k": self.k, "constraints": cons}
        if self.names is not None:
            out["names"] = list(self.names)
        return out

    @classmethod
    def from_json(cls, obj) -> "VecCspInstance":
        F = gfm.field_from_json(obj["field"])
        d, k = int(obj["d"]), int(obj["k"])
        cons = []
        for c in obj["constraints"]:
            if c["kind"] == "linear":
                cons.append(linear(c["u"], c["v"], gfm.as_array(F, c["M"], ndim=2)))
            elif c["kind"] == "parallel":
                cons.append(parallel(c["u"], c["v"], c["sub"], c["Q"]))
            else:
                raise ValueError(f"unknown constraint kind {c['kind']!r}")
        return cls(F, d, k, tuple(cons), obj.get("names"))


def as_assignment(G: VecCspInstance, values) -> np.ndarray:
    arr = gfm.as_array(G.field, values, ndim=2)
    if arr.shape != (G.k, G.d):
        raise ShapeError(f"assignment shape {arr.shape}, expected {(G.k, G.d)}")
    return arr


def assignment_to_json(sigma) -> dict:
    return {"values": np.asarray(sigma).tolist()}


def assignment_from_json(G: VecCspInstance, obj) -> np.ndarray:
    return as_assignment(G, obj["values"])


# -- generic CSP used for the gap instance ----------------------------------

@dataclass(frozen=True)
class GapConstraint:
    u: int
    v: int
    predicate: Callable = field(compare=False)
    label: tuple = ()


@dataclass(eq=False)
class GapCspInstance:
    """Binary CSP with per-variable alphabet descriptors and predicate constraints."""

    alphabets: list
    constraints: list
    names: list | None = None

    @property
    def num_variables(self) -> int:
        return len(self.alphabets)


def evaluate(G, sigma) -> Fraction:
    """Exact fraction of constraints satisfied by ``sigma``."""
    if isinstance(G, VecCspInstance):
        return _evaluate_vec(G, sigma)
    if isinstance(G, GapCspInstance):
        return _evaluate_gap(G, sigma)
    raise TypeError(f"cannot evaluate {type(G).__name__}")


def _evaluate_vec(G: VecCspInstance, sigma) -> Fraction:
    sigma = as_assignment(G, sigma)
    if not G.constraints:
        return Fraction(1)
    return Fraction(int(satisfied_counts(G, sigma[None])[0]), len(G.constraints))


def _evaluate_gap(G: GapCspInstance, sigma) -> Fraction:
    if not G.constraints:
        return Fraction(1)
    sat = 0
    for c in G.constraints:
        try:
            a, b = sigma[c.u], sigma[c.v]
        except (KeyError, IndexError):
            raise KeyError(f"assignment missing a value for constraint {c.u}-{c.v}") from None
        sat += bool(c.predicate(a, b))
    return Fraction(sat, len(G.constraints))


def satisfied_counts(G: VecCspInstance, sigmas) -> np.ndarray:
    """Number of satisfied constraints for each assignment in a ``(N, k, d)`` stack."""
    sigmas = np.asarray(sigmas, dtype=np.uint8)
    if sigmas.ndim != 3 or sigmas.shape[1:] != (G.k, G.d):
        raise ShapeError(f"expected a stack of shape (N, {G.k}, {G.d}), got {sigmas.shape}")
    plan = G.compiled
    counts = np.zeros(sigmas.shape[0], dtype=np.int64)
    if plan["lin_u"].size:
        sv = sigmas[:, plan["lin_v"]]                                  # (N, L, d)
        prod = G.field.mul_table[plan["lin_M"][None], sv[:, :, None, :]]
        image = gfm.xor_reduce(prod, axis=3)
        counts += np.all(image == sigmas[:, plan["lin_u"]], axis=2).sum(axis=1)
    if plan["par_u"].size:
        rows = np.arange(plan["par_u"].size)[None, :, None]
        ok = plan["par_sub"][rows, sigmas[:, plan["par_u"]], sigmas[:, plan["par_v"]]]
        counts += np.all(ok | ~plan["par_mask"][None], axis=2).sum(axis=1)
    return counts


def is_solution(G: VecCspInstance, sigma) -> bool:
    return evaluate(G, sigma) == 1


def validate_veccsp(G: VecCspInstance) -> list:
    """Return a list of human-readable violations; empty means well formed."""
    problems = []
    F, d = G.field, G.d
    seen_parallel = {}
    for idx, c in enumerate(G.constraints):
        for end in (c.u, c.v):
            if not 0 <= end < G.k:
                problems.append(f"constraint {idx}: endpoint {end} out of range")
        if c.u == c.v:
            problems.append(f"constraint {idx}: self-loop on variable {c.u}")
        if isinstance(c, Linear):
            if c.M.shape != (d, d):
                problems.append(f"constraint {idx}: matrix shape {c.M.shape} != {(d, d)}")
            elif c.M.size and c.M.max() >= F.order:
                problems.append(f"constraint {idx}: matrix entries outside {F}")
        else:
            if c.sub.shape != (F.order, F.order):
                problems.append(f"constraint {idx}: sub table shape {c.sub.shape}")
            if any(not 0 <= i < d for i in c.Q) or len(set(c.Q)) != len(c.Q):
                problems.append(f"constraint {idx}: bad coordinate set {c.Q}")
            if linear_form_of(F, c, d) is not None:
                problems.append(f"constraint {idx}: parallel constraint is linear and must be stored as linear")
            for end in (c.u, c.v):
                if end in seen_parallel:
                    problems.append(
                        f"variable {end} is in parallel constraints {seen_parallel[end]} and {idx}")
                else:
                    seen_parallel[end] = idx
    return problems


def split_instance(G: VecCspInstance):
    """Partition constraints into the linear part and the parallel part."""
    return (G.with_constraints(G.linear_constraints()),
            G.with_constraints(G.parallel_constraints()))


def brute_force_solve(G: VecCspInstance, cap: int = DEFAULT_SEARCH_CAP):
    """Lexicographically first solution, or ``None``.

    Variables are assigned in index order and values tried in lexicographic
    order of their coordinate tuples; the search backtracks as soon as a
    constraint with both endpoints assigned fails.
    """
    space = (G.field.order ** G.d) ** G.k
    if space > cap:
        raise CapExceededError(f"search space {space} exceeds cap {cap}")
    values = [np.array(v, dtype=np.uint8) for v in itertools.product(G.field.elements(), repeat=G.d)]
    closing = [[] for _ in range(G.k)]
    for c in G.constraints:
        closing[max(c.u, c.v)].append(c)
    sigma = np.zeros((G.k, G.d), dtype=np.uint8)

    def extend(i):
        if i == G.k:
            return True
        for val in values:
            sigma[i] = val
            if all(c.holds(G.field, sigma[c.u], sigma[c.v]) for c in closing[i]):
                if extend(i + 1):
                    return True
        return False

    return sigma.copy() if extend(0) else None


def all_assignments(G: VecCspInstance, cap: int = 1 << 16):
    """Iterate every assignment of a micro instance."""
    per_var = G.field.order ** G.d
    if per_var ** G.k > cap:
        raise CapExceededError(f"{per_var ** G.k} assignments exceed cap {cap}")
    vecs = gfm.all_vectors(G.field, G.d)
    for combo in itertools.product(range(per_var), repeat=G.k):
        yield vecs[list(combo)]


def stack_assignment(rows: Sequence) -> np.ndarray:
    return np.array([np.asarray(r, dtype=np.uint8) for r in rows], dtype=np.uint8)
