import io
import json
from fractions import Fraction

import numpy as np
import pytest

from vecpcpp import csp, fixtures, sat2vec
from vecpcpp.exceptions import CapExceededError, NotASolutionError
from vecpcpp.gf import GF2
from vecpcpp.hadamard import ZeroWord
from vecpcpp.pcpp import (CombinedVerifier, LinearVerifier, ParallelVerifier, Parameters,
                          build_honest_proof, enumerate_randomness, estimate_acceptance, verifier_for)
from vecpcpp.pcpp.blocks import SparseIndex, TapeIndex
from vecpcpp.pcpp.core import query_answers
from vecpcpp.tape import IndexTape, SeededTape


@pytest.fixture
def lin_verifier(lin1):
    return LinearVerifier(lin1)


@pytest.fixture
def par_verifier(par1):
    return ParallelVerifier(par1)


def test_lin1_counts(lin_verifier):
    assert {t: n for (_, t), n in lin_verifier.counts().items()} == {"L1": 16, "L2": 16, "L3": 128, "L4": 32}
    total, descs = enumerate_randomness(lin_verifier)
    assert total == 192 == len(list(descs))


def closed_forms(k, m, t, c, q, B):
    F = 2 ** t
    return {"L1": F ** (2 * k), "L2": F ** (2 * k * m), "L3": F ** (2 * k + m + k * m),
            "L4": F ** (k + m + k * m), "P1": F ** (2 * k), "P2": 2 ** (2 * c * B), "P3": 2 ** (2 * c * c * B),
            "P4": 2 ** B * 2 ** (2 * c * B), "P5": 2 ** B * 2 ** (2 * c * c * B),
            "P6": 2 ** ((2 * c + c * c) * B), "P7": 2 ** q * 2 ** (c * c * B),
            "P8": 2 ** k * F ** k * 2 ** t * 2 ** (c * B)}


@pytest.mark.parametrize("name", ["LIN-1", "PAR-1"])
def test_counts_match_closed_forms(name):
    G = fixtures.FIXTURES[name]()
    V = CombinedVerifier(G)
    P = V.parallel
    for (verifier, test), bits in V.randomness_log2().items():
        m = V.linear.m if verifier == "A_L" else 0
        forms = closed_forms(G.k, m, G.field.t, P.c, P.q, P.blocks)
        assert 2 ** bits == forms[test], test


def test_honest_linear_examples(lin_verifier, lin1):
    proofs = build_honest_proof(lin_verifier, fixtures.LIN1_SOLUTION)
    assert proofs["piL"](np.array([1, 0])).tolist() == [1]
    assert proofs["pi1"](np.array([0, 0])).tolist() == [0]
    zero = build_honest_proof(lin_verifier, [[0], [0]])
    for x in ([0, 0], [0, 1], [1, 0], [1, 1]):
        assert not zero["pi1"](np.array(x)).any() and not zero["piL"](np.array(x)).any()


def test_honest_linear_exhaustive(lin_verifier):
    proofs = build_honest_proof(lin_verifier, fixtures.LIN1_SOLUTION)
    assert estimate_acceptance(lin_verifier, proofs) == 1
    _, descs = enumerate_randomness(lin_verifier, test="L1")
    assert all(d.accepts(query_answers(d, proofs)) for d in descs)


def test_l4_rejects_zero_auxiliary_proof(lin_verifier):
    proofs = build_honest_proof(lin_verifier, fixtures.LIN1_SOLUTION)
    proofs["piL"] = ZeroWord(GF2, 2, 1)
    d = lin_verifier.describe("L4", IndexTape(0b1))  # mu=(1), a=b=0
    assert d.elements["mu"].tolist() == [1] and not d.elements["a"].any() and not d.elements["b"].any()
    assert not d.accepts(query_answers(d, proofs))


def test_l3_example_accepts(lin_verifier):
    proofs = build_honest_proof(lin_verifier, fixtures.LIN1_SOLUTION)
    d = lin_verifier.describe("L3", IndexTape(0b101))  # lambda=(1,0), mu=(1), a=b=0
    assert d.elements["lambda"].tolist() == [1, 0] and d.elements["mu"].tolist() == [1]
    assert d.accepts(query_answers(d, proofs))
    assert proofs["piL"](d.elements["gamma"]).tolist() == [1]


def test_wrong_assignment_is_rejected(lin_verifier):
    proofs = build_honest_proof(lin_verifier, fixtures.LIN1_NON_SOLUTION, require_solution=False)
    acceptance = estimate_acceptance(lin_verifier, proofs)
    # only L4 with mu = 1 notices: 1/4 * 1/2
    assert acceptance == Fraction(7, 8)
    assert acceptance < 1 - Fraction(1, 600)


def test_non_solution_needs_opt_in(lin_verifier):
    with pytest.raises(NotASolutionError):
        build_honest_proof(lin_verifier, fixtures.LIN1_NON_SOLUTION)


def test_query_budget_over_enumerations(lin_verifier, par_verifier):
    _, descs = enumerate_randomness(lin_verifier)
    assert all(len(d.positions()) <= 4 and len(d.queries) <= 4 for d in descs)
    for test in par_verifier.tests:
        for i in range(20):
            d = par_verifier.describe(test, SeededTape(1, i))
            assert len(d.queries) <= 4


def test_parallel_examples(par_verifier):
    proofs = build_honest_proof(par_verifier, fixtures.PAR1_SOLUTION)
    B, c = par_verifier.blocks, par_verifier.c
    assert proofs["tau1"](TapeIndex(IndexTape(0), 0, B, c)).tolist() == [0, 0]
    slot = par_verifier.system.input_slot(0)
    value = proofs["tau1"](SparseIndex([(1, slot)], B, c))
    assert value.tolist() == [int(x) & 1 for x in fixtures.PAR1_SOLUTION[0]]
    only_empty_block = SparseIndex([(0, 3), (0, 11)], B, c * c)
    assert proofs["tau2"](only_empty_block).tolist() == [0, 0]


def test_parallel_completeness(par_verifier, par1):
    for sigma in csp.all_assignments(par1):
        if csp.is_solution(par1, sigma):
            proofs = build_honest_proof(par_verifier, sigma)
            assert estimate_acceptance(par_verifier, proofs, tests=["P1"]) == 1
            est = estimate_acceptance(par_verifier, proofs, mode="sampled", trials=400, seed=2)
            assert est.successes == est.trials


def test_p8_catches_inconsistent_first_block(par_verifier):
    proofs = build_honest_proof(par_verifier, fixtures.PAR1_SOLUTION)
    other = build_honest_proof(par_verifier, [[1, 0], [0, 1]])
    proofs["pi1"] = other["pi1"]
    est = estimate_acceptance(par_verifier, proofs, mode="sampled", trials=2000, seed=3, tests=["P8"])
    assert est.high < 0.9


def test_non_binary_answers_are_rejected(par_verifier):
    proofs = build_honest_proof(par_verifier, fixtures.PAR1_SOLUTION)
    d = par_verifier.describe("P2", SeededTape(0, 0))
    answers = query_answers(d, proofs)
    answers[0] = answers[0] + 2
    assert not d.accepts(answers)


def test_combined_verifier_shape(sat1):
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(sat1, 1)
    V = CombinedVerifier(G)
    weights = {}
    for w, v, t in V.branches():
        weights[v.name] = weights.get(v.name, 0) + w
    assert weights == {"A_L": Fraction(1, 2), "A_P": Fraction(1, 2)}
    p = Parameters()
    assert (p.queries, p.delta, p.epsilon, p.epsilon_gap) == (4, Fraction(1, 25), Fraction(1, 2400),
                                                            Fraction(1, 9600))
    sigma = sat2vec.lift_assignment(sat1, plan, perms, [1, 1, 1])
    est = estimate_acceptance(V, build_honest_proof(V, sigma), mode="sampled", trials=600, seed=5)
    assert est.successes == 600


def test_parameter_ranges():
    with pytest.raises(ValueError):
        Parameters(epsilon_linear=Fraction(1, 300))
    with pytest.raises(ValueError):
        Parameters(epsilon_parallel=Fraction(1, 500))


def test_all_linear_instance_in_combined_verifier(lin1):
    V = CombinedVerifier(lin1)
    proofs = build_honest_proof(V, fixtures.LIN1_SOLUTION)
    est = estimate_acceptance(V, proofs, mode="sampled", trials=300, seed=1,
                              tests=[t for _, v, t in V.branches() if v.name == "A_P"])
    assert est.successes == 300
    assert isinstance(verifier_for(lin1), LinearVerifier)


def test_auto_selection(par1, sat1):
    assert isinstance(verifier_for(par1), ParallelVerifier)
    G, _, _ = sat2vec.reduce_sat_to_veccsp(sat1, 1)
    assert isinstance(verifier_for(G), CombinedVerifier)
    with pytest.raises(ValueError):
        verifier_for(par1, "quantum")


def test_exhaustive_cap(par_verifier):
    proofs = build_honest_proof(par_verifier, fixtures.PAR1_SOLUTION)
    with pytest.raises(CapExceededError):
        estimate_acceptance(par_verifier, proofs, tests=["P2"])


def test_sampling_is_deterministic_and_logged(par_verifier):
    proofs = build_honest_proof(par_verifier, fixtures.PAR1_SOLUTION)
    logs = []
    for _ in range(2):
        buf = io.StringIO()
        estimate_acceptance(par_verifier, proofs, mode="sampled", trials=50, seed=21, log=buf)
        logs.append(buf.getvalue())
    assert logs[0] == logs[1]
    record = json.loads(logs[0].splitlines()[0])
    assert set(record) == {"verifier", "test", "randomness_index", "queries", "answers", "verdict"}


def test_descriptors_are_pure(lin_verifier):
    a = lin_verifier.describe("L3", IndexTape(77))
    b = lin_verifier.describe("L3", IndexTape(77))
    assert a.positions() == b.positions()
