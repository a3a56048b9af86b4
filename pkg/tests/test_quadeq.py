import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecpcpp import csp, fixtures, gf, quadeq, sat2vec
from vecpcpp.exceptions import CapExceededError
from vecpcpp.quadeq import (BoolCircuit, Equation, QuadeqInstance, build_conjunction_circuit,
                            circuit_brute_force, circuit_to_quadeq, kappa_map, quadeq_brute_force,
                            quadeq_check, quadeq_solutions, subconstraint_to_circuit)


def truth_table(C):
    return [C.evaluate(x) for x in quadeq.lex_vectors(C.n_inputs, 0, 1 << C.n_inputs)]


def test_equality_circuit():
    C = subconstraint_to_circuit(np.eye(2, dtype=bool), 1)
    assert {op for op, _, _ in C.gates} <= {"IN", "AND", "OR", "NOT"}
    assert truth_table(C) == [1, 0, 0, 1]


def test_all_accepting_table_is_constant_one():
    C = subconstraint_to_circuit(np.ones((2, 2), dtype=bool), 1)
    assert truth_table(C) == [1, 1, 1, 1]


def test_pi_circuit_matches_table():
    table = sat2vec.build_pi_jb(1, 0)
    C = subconstraint_to_circuit(table, 3)
    assert C.n_inputs == 6
    for a, b in itertools.product(range(8), repeat=2):
        bits = list(gf.chi_flatten(gf.GF8, a)) + list(gf.chi_flatten(gf.GF8, b))
        assert C.evaluate(bits) == int(table[a, b])


def test_conjunction_examples(par1):
    equality = np.eye(2, dtype=bool)
    assert truth_table(build_conjunction_circuit((), [], 2, 1)) == [1, 1, 1, 1]
    assert build_conjunction_circuit((0,), [equality], 2, 1).evaluate([1, 1]) == 1
    assert build_conjunction_circuit((0,), [fixtures.NAND], 2, 1).evaluate([1, 1]) == 0


def test_single_gate_systems():
    not_circuit = BoolCircuit(1, (("IN", 0, 0), ("NOT", 0, 0)), 1)
    assert quadeq_solutions(circuit_to_quadeq(not_circuit)).tolist() == [[0, 1]]
    and_circuit = BoolCircuit(2, (("IN", 0, 0), ("IN", 0, 0), ("AND", 0, 1)), 2)
    assert quadeq_solutions(circuit_to_quadeq(and_circuit)).tolist() == [[1, 1, 1]]


def test_constant_one_system_is_satisfiable():
    C = build_conjunction_circuit((), [], 2, 1)
    gamma = circuit_to_quadeq(C)
    u = quadeq_brute_force(gamma)
    assert u is not None and quadeq_check(gamma, u)
    assert np.array_equal(u, C.gate_values(u[:2]))


def test_single_product_equation():
    gamma = QuadeqInstance(3, (Equation(frozenset({(0, 1)}), 1),))
    assert quadeq_brute_force(gamma).tolist()[:2] == [1, 1]


def test_caps():
    with pytest.raises(CapExceededError):
        quadeq_brute_force(QuadeqInstance(30, ()))
    with pytest.raises(CapExceededError):
        circuit_brute_force(BoolCircuit(30, (("IN", 0, 0),) * 30, 0))


def test_bad_circuits_rejected():
    with pytest.raises(ValueError):
        BoolCircuit(1, (("IN", 0, 0), ("AND", 0, 1)), 1)
    with pytest.raises(ValueError):
        BoolCircuit(1, (("IN", 0, 0), ("XOR", 0, 0)), 1)


def test_json_round_trips(rng):
    C = fixtures.random_circuit(rng, 3, 6)
    assert BoolCircuit.from_json(json.loads(json.dumps(C.to_json()))) == C
    gamma = circuit_to_quadeq(C)
    assert QuadeqInstance.from_json(json.loads(json.dumps(gamma.to_json()))) == gamma


def test_kappa_examples(par1):
    assert kappa_map(par1) == {0: frozenset({0}), 1: frozenset({0})}
    F = gf.GF2
    G = csp.VecCspInstance(F, 3, 4, (csp.parallel(0, 1, fixtures.NAND, [0]),
                                     csp.parallel(2, 3, fixtures.NAND, [0, 1])))
    kappa = kappa_map(G)
    assert kappa[0] == {0, 1} and kappa[1] == {1} and kappa[2] == frozenset()


def test_parallel_system_shares_sizes(par1):
    system = quadeq.ParallelSystem(par1)
    assert (system.c, system.q) == (9, 8)
    for S in ((), (0,)):
        assert system.circuit(S).size == system.c
        assert system.quadeq(S).q == system.q


def test_padding_keeps_witness_exact(rng):
    C = fixtures.random_circuit(rng, 2, 3).padded(8)
    gamma = circuit_to_quadeq(C)
    for x in quadeq.lex_vectors(2, 0, 4):
        if C.evaluate(x):
            assert quadeq_check(gamma, C.gate_values(x))


@given(st.integers(0, 2**32 - 1))
def test_circuit_and_system_have_the_same_solutions(seed):
    rng = np.random.default_rng(seed)
    C = fixtures.random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(1, 11)))
    gamma = circuit_to_quadeq(C)
    solutions = quadeq_solutions(gamma)
    inputs = quadeq.lex_vectors(C.n_inputs, 0, 1 << C.n_inputs)
    expected = {C.gate_values(x).tobytes() for x in inputs if C.evaluate(x)}
    assert {u.tobytes() for u in solutions} == expected
    for u in solutions:
        assert np.array_equal(u, C.gate_values(u[:C.n_inputs]))


@given(st.integers(0, 2**32 - 1))
def test_solution_iff_every_conjunction_circuit_accepts(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 3))
    cons = []
    for pair in ((0, 1), (2, 3))[: int(rng.integers(1, 3))]:
        sub = rng.integers(0, 2, size=(2, 2)).astype(bool)
        Q = [i for i in range(d) if rng.integers(0, 2)]
        cons.append(csp.make_constraint(gf.GF2, d, *pair, sub, Q))
    G = csp.VecCspInstance(gf.GF2, d, 4, tuple(cons))
    _, G_P = csp.split_instance(G)
    if G_P.m == 0:
        return
    system = quadeq.ParallelSystem(G_P)
    for sigma in csp.all_assignments(G_P):
        accepted = all(system.circuit(system.kappa[j]).evaluate(system.input_bits(sigma[:, j]))
                       for j in range(d))
        assert accepted == csp.is_solution(G_P, sigma)
