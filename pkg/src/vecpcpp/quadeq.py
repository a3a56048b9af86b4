"""Boolean circuits for conjunctions of sub-constraints and their quadratic-equation encoding.

Gates are ``(op, a, b)`` tuples with ``op`` in ``IN``, ``AND``, ``OR`` and
``NOT`` (``b`` unused for ``NOT``, both unused for ``IN``). Gate ``g`` of a
circuit becomes variable ``g`` of its equation system, and ``x*x = x`` over
GF(2) turns every gate into one quadratic equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import csp
from . import gf as gfm
from .exceptions import CapExceededError

BRUTE_FORCE_MAX_VARS = 24
OPS = ("IN", "AND", "OR", "NOT")


@dataclass(frozen=True)
class BoolCircuit:
    n_inputs: int
    gates: tuple
    output: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        for i, (op, a, b) in enumerate(self.gates):
            if op not in OPS:
                raise ValueError(f"gate {i}: unknown op {op!r}")
            if (op == "IN") != (i < self.n_inputs):
                raise ValueError(f"gate {i}: inputs must come first and only first")
            if op in ("AND", "OR") and not (0 <= a < i and 0 <= b < i):
                raise ValueError(f"gate {i}: operands must precede the gate")
            if op == "NOT" and not 0 <= a < i:
                raise ValueError(f"gate {i}: operand must precede the gate")
        if not 0 <= self.output < len(self.gates):
            raise ValueError("output gate out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    def gate_values(self, inputs) -> np.ndarray:
        inputs = np.asarray(inputs, dtype=np.uint8)
        if inputs.shape != (self.n_inputs,):
            raise ValueError(f"expected {self.n_inputs} input bits")
        vals = np.zeros(self.size, dtype=np.uint8)
        vals[: self.n_inputs] = inputs
        for i in range(self.n_inputs, self.size):
            op, a, b = self.gates[i]
            if op == "AND":
                vals[i] = vals[a] & vals[b]
            elif op == "OR":
                vals[i] = vals[a] | vals[b]
            else:
                vals[i] = vals[a] ^ 1
        return vals

    def evaluate(self, inputs) -> int:
        return int(self.gate_values(inputs)[self.output])

    def padded(self, size: int) -> "BoolCircuit":
        """Append unreferenced ``NOT`` gates on gate 0 until the circuit has ``size`` gates."""
        if size < self.size:
            raise ValueError(f"cannot pad a {self.size}-gate circuit down to {size}")
        extra = (("NOT", 0, 0),) * (size - self.size)
        return BoolCircuit(self.n_inputs, self.gates + extra, self.output)

    def to_json(self) -> dict:
        return {"n_inputs": self.n_inputs, "output": self.output, "gates": [list(g) for g in self.gates]}

    @classmethod
    def from_json(cls, obj) -> "BoolCircuit":
        return cls(obj["n_inputs"], tuple(tuple(g) for g in obj["gates"]), obj["output"])


class _Builder:
    def __init__(self, n_inputs: int):
        self.gates = [("IN", 0, 0)] * n_inputs
        self._negations = {}

    def add(self, op, a, b=0) -> int:
        self.gates.append((op, a, b))
        return len(self.gates) - 1

    def neg(self, a) -> int:
        if a not in self._negations:
            self._negations[a] = self.add("NOT", a)
        return self._negations[a]

    def chain(self, op, items) -> int:
        acc = items[0]
        for x in items[1:]:
            acc = self.add(op, acc, x)
        return acc

    def constant(self, value: bool, x: int = 0) -> int:
        return self.add("OR" if value else "AND", x, self.neg(x))

    def subconstraint(self, sub: np.ndarray, t: int, bits: list) -> int:
        """Sum of accepted minterms of ``sub`` over ``bits`` (head bits then tail bits)."""
        sub = np.asarray(sub, dtype=bool)
        accepted = [(a, b) for a in range(sub.shape[0]) for b in range(sub.shape[1]) if sub[a, b]]
        if not accepted:
            return self.constant(False, bits[0])
        if len(accepted) == sub.size:
            return self.constant(True, bits[0])
        terms = []
        for a, b in accepted:
            want = [(a >> i) & 1 for i in range(t)] + [(b >> i) & 1 for i in range(t)]
            lits = [g if w else self.neg(g) for g, w in zip(bits, want)]
            terms.append(self.chain("AND", lits))
        return self.chain("OR", terms)

    def build(self, n_inputs: int, output: int) -> BoolCircuit:
        return BoolCircuit(n_inputs, tuple(self.gates), output)


def subconstraint_to_circuit(sub, t: int) -> BoolCircuit:
    """Circuit on ``2t`` bits, the head value's bits first, accepting exactly the table's pairs."""
    builder = _Builder(2 * t)
    out = builder.subconstraint(sub, t, list(range(2 * t)))
    return builder.build(2 * t, out)


def build_conjunction_circuit(S, subs, k: int, t: int, size: int | None = None) -> BoolCircuit:
    """Conjunction over ``l`` in ``S`` of ``subs[l]`` applied to variables ``2l`` and ``2l+1``.

    Inputs are the ``k*t`` bits of the ``k`` variables in order, ``t`` bits
    each. The empty conjunction is the constant-1 circuit. With ``size`` the
    circuit is padded to that many gates.
    """
    S = sorted(set(S))
    if any(not 0 <= l < len(subs) for l in S):
        raise ValueError(f"constraint set {S} out of range for {len(subs)} constraints")
    if any(2 * l + 1 >= k for l in S):
        raise ValueError("constraint endpoints exceed the variable count")
    if k * t == 0:
        raise ValueError("circuit needs at least one input bit")
    builder = _Builder(k * t)
    outs = []
    for l in S:
        bits = list(range(2 * l * t, 2 * l * t + 2 * t))
        outs.append(builder.subconstraint(subs[l], t, bits))
    out = builder.chain("AND", outs) if outs else builder.constant(True, 0)
    circuit = builder.build(k * t, out)
    return circuit if size is None else circuit.padded(size)


# -- quadratic equations --------------------------------------------------------

@dataclass(frozen=True)
class Equation:
    entries: frozenset  # positions (i, j) of the nonzero entries of D
    rhs: int

    def holds(self, u) -> bool:
        return sum(int(u[i]) & int(u[j]) for i, j in self.entries) % 2 == self.rhs


@dataclass(frozen=True)
class QuadeqInstance:
    c: int
    equations: tuple

    @property
    def q(self) -> int:
        return len(self.equations)

    def dense(self, i: int) -> np.ndarray:
        D = np.zeros((self.c, self.c), dtype=np.uint8)
        for a, b in self.equations[i].entries:
            D[a, b] = 1
        return D

    def padded(self, q: int) -> "QuadeqInstance":
        if q < self.q:
            raise ValueError("cannot pad to fewer equations")
        return QuadeqInstance(self.c, self.equations + (Equation(frozenset(), 0),) * (q - self.q))

    def to_json(self) -> dict:
        return {"c": self.c, "equations": [{"entries": [[a, b, 1] for a, b in sorted(e.entries)],
                                            "b": e.rhs} for e in self.equations]}

    @classmethod
    def from_json(cls, obj) -> "QuadeqInstance":
        eqs = []
        for e in obj["equations"]:
            entries = set()
            for a, b, v in e["entries"]:
                if v % 2:
                    entries ^= {(a, b)}
            eqs.append(Equation(frozenset(entries), int(e["b"]) % 2))
        return cls(int(obj["c"]), tuple(eqs))


def _equation(cells, rhs) -> Equation:
    entries = set()
    for cell in cells:
        entries ^= {cell}
    return Equation(frozenset(entries), rhs)


def circuit_to_quadeq(C: BoolCircuit) -> QuadeqInstance:
    eqs = []
    for g in range(C.n_inputs, C.size):
        op, a, b = C.gates[g]
        if op == "AND":
            eqs.append(_equation([(a, b), (g, g)], 0))
        elif op == "OR":
            eqs.append(_equation([(a, a), (b, b), (a, b), (g, g)], 0))
        else:
            eqs.append(_equation([(a, a), (g, g)], 1))
    eqs.append(_equation([(C.output, C.output)], 1))
    return QuadeqInstance(C.size, tuple(eqs))


def quadeq_check(gamma: QuadeqInstance, u) -> bool:
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (gamma.c,):
        raise ValueError(f"expected {gamma.c} bits")
    return all(e.holds(u) for e in gamma.equations)


def lex_vectors(c: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the bit vectors of length ``c``, first bit most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(c - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _solution_chunks(gamma: QuadeqInstance, max_vars: int):
    if gamma.c > max_vars:
        raise CapExceededError(f"{gamma.c} variables exceed the brute-force cap of {max_vars}")
    total = 1 << gamma.c
    chunk = 1 << 14
    for start in range(0, total, chunk):
        U = lex_vectors(gamma.c, start, min(total, start + chunk))
        ok = np.ones(U.shape[0], dtype=bool)
        for e in gamma.equations:
            acc = np.zeros(U.shape[0], dtype=np.uint8)
            for a, b in e.entries:
                acc ^= U[:, a] & U[:, b]
            ok &= acc == e.rhs
        yield U[ok]


def quadeq_brute_force(gamma: QuadeqInstance, max_vars: int = BRUTE_FORCE_MAX_VARS):
    """Lexicographically first solution (first variable most significant), or None."""
    for hits in _solution_chunks(gamma, max_vars):
        if hits.shape[0]:
            return hits[0].copy()
    return None


def quadeq_solutions(gamma: QuadeqInstance, max_vars: int = BRUTE_FORCE_MAX_VARS) -> np.ndarray:
    """Every solution, in lexicographic order, as rows of a ``(count, c)`` array."""
    parts = list(_solution_chunks(gamma, max_vars))
    return np.concatenate(parts) if parts else np.zeros((0, gamma.c), dtype=np.uint8)


def circuit_brute_force(C: BoolCircuit, max_inputs: int = BRUTE_FORCE_MAX_VARS):
    """First accepted input in lexicographic order, or None."""
    if C.n_inputs > max_inputs:
        raise CapExceededError(f"{C.n_inputs} inputs exceed the cap of {max_inputs}")
    for x in lex_vectors(C.n_inputs, 0, 1 << C.n_inputs):
        if C.evaluate(x):
            return x
    return None


def kappa_map(G_P: csp.VecCspInstance) -> dict:
    """For each coordinate, the set of constraint indices whose coordinate set contains it."""
    for c in G_P.constraints:
        if not isinstance(c, csp.Parallel):
            raise ValueError("kappa_map needs an all-parallel instance")
    return {j: frozenset(l for l, c in enumerate(G_P.constraints) if j in c.Q) for j in range(G_P.d)}


def block_of(S) -> int:
    """Block index of a constraint set: the bitmask with bit ``l`` set for ``l`` in ``S``."""
    return sum(1 << l for l in S)


def set_of_block(block: int) -> frozenset:
    return frozenset(l for l in range(block.bit_length()) if (block >> l) & 1)


class ParallelSystem:
    """All conjunction circuits and equation systems for an all-parallel instance.

    Variables are rearranged so constraint ``l`` joins circuit positions
    ``2l`` (head) and ``2l+1`` (tail); the remaining variables follow in index
    order. ``order[i]`` is the original variable at circuit position ``i``.
    Circuits are built on demand and padded to one common gate count ``c``.
    """

    def __init__(self, G_P: csp.VecCspInstance):
        self.instance = G_P
        self.field = G_P.field
        self.t = G_P.field.t
        self.k = G_P.k
        self.d = G_P.d
        self.m = G_P.m
        self.kappa = kappa_map(G_P)
        order = []
        for c in G_P.constraints:
            order += [c.u, c.v]
        if len(set(order)) != len(order):
            raise ValueError("a variable is in more than one parallel constraint")
        order += [x for x in range(self.k) if x not in set(order)]
        self.order = tuple(order)
        self.position = {x: i for i, x in enumerate(order)}
        self.subs = tuple(c.sub for c in G_P.constraints)
        self.n_inputs = self.k * self.t
        self._circuit = lru_cache(maxsize=256)(self._build)
        self.c = max(self._raw(frozenset()).size, self._raw(frozenset(range(self.m))).size)
        self.q = self.c - self.n_inputs + 1

    def _raw(self, S: frozenset) -> BoolCircuit:
        return build_conjunction_circuit(S, self.subs, self.k, self.t)

    def _build(self, S: frozenset):
        circuit = self._raw(S).padded(self.c)
        return circuit, circuit_to_quadeq(circuit)

    def circuit(self, S) -> BoolCircuit:
        return self._circuit(frozenset(S))[0]

    def quadeq(self, S) -> QuadeqInstance:
        return self._circuit(frozenset(S))[1]

    def input_bits(self, column) -> np.ndarray:
        """Circuit input bits for one coordinate slice of an assignment."""
        column = np.asarray(column, dtype=np.uint8)
        arranged = column[list(self.order)]
        return gfm.chi_array(self.field, arranged).reshape(-1)

    def witness(self, sigma, j: int) -> np.ndarray:
        """Gate values of the circuit for coordinate ``j`` on the slice ``sigma[:, j]``."""
        return self.circuit(self.kappa[j]).gate_values(self.input_bits(np.asarray(sigma)[:, j]))

    def input_slot(self, variable: int) -> int:
        """First circuit input bit belonging to an original variable."""
        return self.position[variable] * self.t
