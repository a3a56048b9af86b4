"""3SAT front end and the reduction from structured 3SAT to a vector-valued CSP.

Clauses and variables are split into ``ell`` contiguous parts. For every
choice ``(p, q, j, s, b)`` there is a clause-side vertex ``z`` and a
variable-side vertex ``w`` over ``GF(8)^d``. A ``z`` entry holds the truth
values of a clause's three literals (literal ``j`` in bit ``j-1``); a ``w``
entry holds a variable's value. One parallel constraint per ``(p, q, j, s, b)``
links the clause entries to the variable entries whose ``s``-th occurrence is
literal ``j`` with sign ``b``, after the ``w`` coordinates have been permuted so
that linked entries line up. Cycles of equalities keep the duplicates
consistent.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import csp
from . import gf as gfm
from .exceptions import CapExceededError, DimacsParseError, NotASolutionError

BRUTE_FORCE_MAX_VARS = 24


@dataclass(frozen=True)
class Cnf3:
    n: int
    clauses: tuple  # tuples of three nonzero signed ints

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, clause in enumerate(self.clauses):
            _check_clause(clause, self.n, i)

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, values) -> bool:
        values = np.asarray(values, dtype=bool)
        return all(any(values[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {self.m}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def _check_clause(clause, n, where, lineno=None):
    if len(clause) != 3:
        raise DimacsParseError(f"clause {where} has {len(clause)} literals, expected 3", lineno)
    if len({abs(l) for l in clause}) != 3:
        raise DimacsParseError(f"clause {where}: repeated variable in clause", lineno)
    for lit in clause:
        if lit == 0 or abs(lit) > n:
            raise DimacsParseError(f"clause {where}: literal {lit} out of range 1..{n}", lineno)


def parse_dimacs(text: str) -> Cnf3:
    """Parse DIMACS CNF, requiring exactly three distinct variables per clause."""
    declared = None
    clauses, current, current_line = [], [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsParseError(f"malformed problem line {line!r}", lineno)
            if declared is not None:
                raise DimacsParseError("duplicate problem line", lineno)
            try:
                declared = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsParseError(f"malformed problem line {line!r}", lineno) from None
            if min(declared) < 0:
                raise DimacsParseError("negative counts in problem line", lineno)
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsParseError(f"not an integer: {tok!r}", lineno) from None
            if current_line is None:
                current_line = lineno
            if lit == 0:
                clauses.append((tuple(current), current_line))
                current, current_line = [], None
            else:
                current.append(lit)
    if current:
        raise DimacsParseError("last clause is not terminated by 0", current_line)
    n = declared[0] if declared else max((abs(l) for c, _ in clauses for l in c), default=0)
    for i, (clause, lineno) in enumerate(clauses):
        _check_clause(clause, n, i + 1, lineno)
    if declared and declared[1] != len(clauses):
        raise DimacsParseError(f"problem line declares {declared[1]} clauses, found {len(clauses)}")
    return Cnf3(n, tuple(c for c, _ in clauses))


def occurrence_counts(phi: Cnf3) -> list:
    counts = [0] * phi.n
    for clause in phi.clauses:
        for lit in clause:
            counts[abs(lit) - 1] += 1
    return counts


def check_structure(phi: Cnf3) -> dict:
    counts = occurrence_counts(phi)
    top = max(counts, default=0)
    return {"max_occurrences": top, "counts": counts, "at_most_four": top <= 4}


def brute_force_sat(phi: Cnf3, max_vars: int = BRUTE_FORCE_MAX_VARS):
    """First satisfying assignment in binary counting order (x1 least significant), or None."""
    if phi.n > max_vars:
        raise CapExceededError(f"{phi.n} variables exceed the brute-force cap of {max_vars}")
    total = 1 << phi.n
    chunk = 1 << 16
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for clause in phi.clauses:
            sat = np.zeros(idx.shape, dtype=bool)
            for lit in clause:
                bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
                sat |= bit if lit > 0 else ~bit
            ok &= sat
        hits = np.flatnonzero(ok)
        if hits.size:
            x = int(idx[hits[0]])
            return np.array([(x >> i) & 1 for i in range(phi.n)], dtype=bool)
    return None


def build_pi_jb(j: int, b: int) -> np.ndarray:
    """8x8 table of the clause/variable test; rows are clause values, columns variable values."""
    if j not in (1, 2, 3) or b not in (0, 1):
        raise ValueError("j must be in 1..3 and b in {0, 1}")
    table = np.zeros((8, 8), dtype=bool)
    for tau in range(8):
        for c in (0, 1):
            table[tau, c] = tau != 0 and ((tau >> (j - 1)) & 1) == (c ^ b)
    return table


# -- reduction ------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionPlan:
    ell: int
    n: int
    m: int
    d: int
    s_max: int
    clause_parts: tuple  # tuple of tuples of 0-based clause indices
    var_parts: tuple     # tuple of tuples of 0-based variable indices
    occurrences: tuple   # per variable: clause indices in occurrence order
    clauses: tuple

    def clause_location(self, c: int):
        size = len(self.clause_parts[0]) if self.clause_parts else 1
        return c // size, c % size

    def var_location(self, x: int):
        size = len(self.var_parts[0]) if self.var_parts else 1
        return x // size, x % size

    def keys(self):
        """All ``(p, q, j, s, b)`` tuples in lexicographic order, 1-based except ``b``."""
        return list(itertools.product(range(1, self.ell + 1), range(1, self.ell + 1),
                                      range(1, 4), range(1, self.s_max + 1), (0, 1)))

    def to_json(self) -> dict:
        return {"ell": self.ell, "n": self.n, "m": self.m, "d": self.d, "s_max": self.s_max,
                "clause_parts": [list(p) for p in self.clause_parts],
                "var_parts": [list(p) for p in self.var_parts],
                "occurrences": [list(o) for o in self.occurrences],
                "clauses": [list(c) for c in self.clauses]}

    @classmethod
    def from_json(cls, obj) -> "PartitionPlan":
        return cls(obj["ell"], obj["n"], obj["m"], obj["d"], obj["s_max"],
                   tuple(tuple(p) for p in obj["clause_parts"]),
                   tuple(tuple(p) for p in obj["var_parts"]),
                   tuple(tuple(o) for o in obj["occurrences"]),
                   tuple(tuple(c) for c in obj["clauses"]))


@dataclass(frozen=True)
class MatchingPermutation:
    """Per key ``(p, q, j, s, b)``: the clause-to-variable matching and its completion."""

    matchings: dict  # key -> tuple of (clause position, variable position)
    kappa: dict      # key -> tuple, kappa[C] = old variable position shown at new position C

    def inverse(self, key) -> tuple:
        perm = self.kappa[key]
        inv = [0] * len(perm)
        for i, x in enumerate(perm):
            inv[x] = i
        return tuple(inv)

    def to_json(self) -> dict:
        return {"entries": [{"key": list(key), "matching": [list(e) for e in self.matchings[key]],
                             "kappa": list(self.kappa[key])} for key in self.kappa]}

    @classmethod
    def from_json(cls, obj) -> "MatchingPermutation":
        matchings, kappa = {}, {}
        for e in obj["entries"]:
            key = tuple(e["key"])
            matchings[key] = tuple(tuple(x) for x in e["matching"])
            kappa[key] = tuple(e["kappa"])
        return cls(matchings, kappa)


def make_plan(phi: Cnf3, ell: int) -> PartitionPlan:
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    d = max(math.ceil(phi.m / ell), math.ceil(phi.n / ell), 1)
    csize = max(math.ceil(phi.m / ell), 1)
    vsize = max(math.ceil(phi.n / ell), 1)
    clause_parts = tuple(tuple(range(p * csize, min(phi.m, (p + 1) * csize))) for p in range(ell))
    var_parts = tuple(tuple(range(q * vsize, min(phi.n, (q + 1) * vsize))) for q in range(ell))
    occ = [[] for _ in range(phi.n)]
    for ci, clause in enumerate(phi.clauses):
        for lit in clause:
            occ[abs(lit) - 1].append(ci)
    s_max = max(4, max((len(o) for o in occ), default=0))
    return PartitionPlan(ell, phi.n, phi.m, d, s_max, clause_parts, var_parts,
                         tuple(tuple(o) for o in occ), phi.clauses)


def complete_permutation(matching, d: int) -> tuple:
    """Extend a partial matching to a permutation of ``range(d)``.

    Unmatched sources are paired with unmatched targets, both ascending.
    """
    perm = [None] * d
    used = set()
    for src, dst in matching:
        perm[src] = dst
        used.add(dst)
    free = iter(x for x in range(d) if x not in used)
    for src in range(d):
        if perm[src] is None:
            perm[src] = next(free)
    return tuple(perm)


def build_matchings(plan: PartitionPlan) -> MatchingPermutation:
    matchings = {key: [] for key in plan.keys()}
    for x, occ in enumerate(plan.occurrences):
        q, xpos = plan.var_location(x)
        for s, ci in enumerate(occ, start=1):
            clause = plan.clauses[ci]
            j = next(i for i, lit in enumerate(clause, start=1) if abs(lit) == x + 1)
            b = int(clause[j - 1] < 0)
            p, cpos = plan.clause_location(ci)
            matchings[(p + 1, q + 1, j, s, b)].append((cpos, xpos))
    matchings = {k: tuple(sorted(v)) for k, v in matchings.items()}
    kappa = {k: complete_permutation(v, plan.d) for k, v in matchings.items()}
    return MatchingPermutation(matchings, kappa)


def vertex_names(plan: PartitionPlan) -> list:
    keys = plan.keys()
    return ([f"z_{p},{q},{j},{s},{b}" for p, q, j, s, b in keys]
            + [f"w_{p},{q},{j},{s},{b}" for p, q, j, s, b in keys])


def reduce_sat_to_veccsp(phi: Cnf3, ell: int):
    """Return ``(instance, plan, matchings)``; see the module docstring for the layout."""
    plan = make_plan(phi, ell)
    perms = build_matchings(plan)
    keys = plan.keys()
    z_of = {key: i for i, key in enumerate(keys)}
    w_of = {key: len(keys) + i for i, key in enumerate(keys)}
    d = plan.d
    F = gfm.GF8

    constraints = []
    for key in keys:
        _, _, j, _, b = key
        Q = [cpos for cpos, _ in perms.matchings[key]]
        constraints.append(csp.make_constraint(F, d, z_of[key], w_of[key], build_pi_jb(j, b), Q))

    eye = gfm.identity(d)
    for p in range(1, ell + 1):
        cycle = [k for k in keys if k[0] == p]
        for a, nxt in zip(cycle, cycle[1:] + cycle[:1]):
            constraints.append(csp.linear(z_of[a], z_of[nxt], eye))
    for q in range(1, ell + 1):
        cycle = [k for k in keys if k[1] == q]
        for a, nxt in zip(cycle, cycle[1:] + cycle[:1]):
            # head[C] = old[kappa_head(C)] = tail[kappa_tail^{-1}(kappa_head(C))]
            inv_tail = perms.inverse(nxt)
            perm = [inv_tail[perms.kappa[a][c]] for c in range(d)]
            constraints.append(csp.linear(w_of[a], w_of[nxt], gfm.permutation_matrix(perm)))

    G = csp.VecCspInstance(F, d, 2 * len(keys), tuple(constraints), tuple(vertex_names(plan)))
    return G, plan, perms


def clause_value(clause, values) -> int:
    """Literal truth values of a clause packed into a GF(8) element, literal 1 in bit 0."""
    out = 0
    for j, lit in enumerate(clause):
        if bool(values[abs(lit) - 1]) == (lit > 0):
            out |= 1 << j
    return out


def lift_assignment(phi: Cnf3, plan: PartitionPlan, perms: MatchingPermutation, values) -> np.ndarray:
    values = np.asarray(values, dtype=bool)
    if values.shape != (plan.n,):
        raise ValueError(f"expected {plan.n} boolean values, got shape {values.shape}")
    keys = plan.keys()
    d = plan.d
    sigma = np.zeros((2 * len(keys), d), dtype=np.uint8)
    clause_vec = [np.zeros(d, dtype=np.uint8) for _ in range(plan.ell)]
    var_vec = [np.zeros(d, dtype=np.uint8) for _ in range(plan.ell)]
    for p, part in enumerate(plan.clause_parts):
        for pos, ci in enumerate(part):
            clause_vec[p][pos] = clause_value(plan.clauses[ci], values)
    for q, part in enumerate(plan.var_parts):
        for pos, x in enumerate(part):
            var_vec[q][pos] = values[x]
    for i, key in enumerate(keys):
        p, q = key[0] - 1, key[1] - 1
        sigma[i] = clause_vec[p]
        sigma[len(keys) + i] = var_vec[q][list(perms.kappa[key])]
    return sigma


def project_solution(G, plan: PartitionPlan, perms: MatchingPermutation, sigma) -> np.ndarray:
    """Read a boolean assignment back from a solution of the reduced instance."""
    sigma = csp.as_assignment(G, sigma)
    if csp.evaluate(G, sigma) != 1:
        raise NotASolutionError("assignment does not satisfy the reduced instance")
    keys = plan.keys()
    out = np.zeros(plan.n, dtype=bool)
    for q, part in enumerate(plan.var_parts):
        key = (1, q + 1, 1, 1, 0)
        new = sigma[len(keys) + keys.index(key)]
        inv = perms.inverse(key)
        for pos, x in enumerate(part):
            out[x] = bool(new[inv[pos]] & 1)
    return out


def sidecar_json(plan: PartitionPlan, perms: MatchingPermutation) -> dict:
    return {"plan": plan.to_json(), "matchings": perms.to_json()}


def sidecar_from_json(obj):
    return PartitionPlan.from_json(obj["plan"]), MatchingPermutation.from_json(obj["matchings"])
