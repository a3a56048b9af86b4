import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecpcpp import csp, fixtures, sat2vec
from vecpcpp.exceptions import DimacsParseError, NotASolutionError

COMPLETE = "p cnf 3 8\n" + "".join(
    f"{a} {b} {c} 0\n" for a in (1, -1) for b in (2, -2) for c in (3, -3))


def test_parse_examples():
    phi = sat2vec.parse_dimacs("p cnf 3 1\n1 2 3 0")
    assert phi.n == 3 and phi.clauses == ((1, 2, 3),)
    assert sat2vec.parse_dimacs("p cnf 4 2\n1 -2 3 0\n-1 2 4 0").m == 2


def test_parse_handles_comments_and_wrapped_clauses():
    phi = sat2vec.parse_dimacs("c hello\np cnf 4 2\n1 -2\n 3 0 -1 2 4 0\n%\n0\n")
    assert phi.clauses == ((1, -2, 3), (-1, 2, 4))


@pytest.mark.parametrize("text,needle", [
    ("1 1 2 0", "repeated variable"),
    ("p cnf 3 1\n1 2 0", "expected 3"),
    ("p cnf 3 1\n1 2 4 0", "out of range"),
    ("p cnf 3 2\n1 2 3 0", "declares 2 clauses"),
    ("p cnf 3 1\n1 2 x 0", "not an integer"),
    ("p cnf 3 1\n1 2 3", "not terminated"),
    ("p dnf 3 1\n1 2 3 0", "malformed"),
])
def test_parse_errors(text, needle):
    with pytest.raises(DimacsParseError, match=needle):
        sat2vec.parse_dimacs(text)


def test_parse_error_reports_line():
    with pytest.raises(DimacsParseError, match="line 3"):
        sat2vec.parse_dimacs("p cnf 3 2\n1 2 3 0\n1 1 2 0\n")


def test_structure_examples(sat1):
    assert sat2vec.check_structure(sat1)["max_occurrences"] == 1
    assert sat2vec.check_structure(sat1)["at_most_four"]
    report = sat2vec.check_structure(sat2vec.parse_dimacs(COMPLETE))
    assert report["max_occurrences"] == 8 and not report["at_most_four"]
    empty = sat2vec.Cnf3(0, ())
    assert sat2vec.check_structure(empty)["max_occurrences"] == 0
    assert sat2vec.check_structure(empty)["at_most_four"]


def test_brute_force_examples(sat1):
    assert sat2vec.brute_force_sat(sat1).tolist() == [True, False, False]
    assert sat2vec.brute_force_sat(sat2vec.parse_dimacs(COMPLETE)) is None
    assert sat2vec.brute_force_sat(sat2vec.Cnf3(2, ())).tolist() == [False, False]


def test_pi_examples():
    assert sat2vec.build_pi_jb(1, 0)[0b001, 1]
    for j in (1, 2, 3):
        for b in (0, 1):
            assert not sat2vec.build_pi_jb(j, b)[0].any()
            assert not sat2vec.build_pi_jb(j, b)[:, 2:].any()
    assert not sat2vec.build_pi_jb(2, 1)[0b010, 5]


def test_reduction_sizes(sat1):
    G, plan, _ = sat2vec.reduce_sat_to_veccsp(sat1, 1)
    assert (G.k, G.m, G.d, G.field.order) == (48, 72, 3, 8)
    G2, _, _ = sat2vec.reduce_sat_to_veccsp(sat1, 2)
    assert (G2.k, G2.m) == (192, 288)
    G8, plan8, _ = sat2vec.reduce_sat_to_veccsp(sat2vec.parse_dimacs(COMPLETE), 1)
    assert plan8.s_max == 8 and (G8.k, G8.m) == (96, 144)


def test_lift_examples(sat1):
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(sat1, 1)
    assert csp.evaluate(G, sat2vec.lift_assignment(sat1, plan, perms, [1, 1, 1])) == 1
    assert csp.evaluate(G, sat2vec.lift_assignment(sat1, plan, perms, [0, 0, 0])) < 1


def test_empty_formula_lifts_to_a_solution():
    phi = sat2vec.Cnf3(0, ())
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, 1)
    assert csp.evaluate(G, sat2vec.lift_assignment(phi, plan, perms, [])) == 1


def test_project_rejects_non_solutions(sat1):
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(sat1, 1)
    with pytest.raises(NotASolutionError):
        sat2vec.project_solution(G, plan, perms, sat2vec.lift_assignment(sat1, plan, perms, [0, 0, 0]))


def test_sidecar_round_trip(sat1):
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(sat1, 2)
    plan2, perms2 = sat2vec.sidecar_from_json(json.loads(json.dumps(sat2vec.sidecar_json(plan, perms))))
    values = np.array([1, 0, 1], dtype=bool)
    assert np.array_equal(sat2vec.lift_assignment(sat1, plan2, perms2, values),
                          sat2vec.lift_assignment(sat1, plan, perms, values))


def test_dimacs_round_trip(rng):
    for _ in range(10):
        phi = fixtures.random_cnf3(rng, 7, 5)
        assert sat2vec.parse_dimacs(phi.to_dimacs()) == phi


# -- properties ---------------------------------------------------------------

formulas = st.integers(3, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.lists(st.integers(1, n), min_size=3, max_size=3, unique=True),
                       st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3)),
             min_size=0, max_size=6),
    st.integers(1, 3)))


def build(spec):
    n, raw, ell = spec
    phi = sat2vec.Cnf3(n, tuple(tuple(x * s for x, s in zip(xs, signs)) for xs, signs in raw))
    return phi, ell


@given(formulas)
def test_counting_identities(spec):
    phi, ell = build(spec)
    G, plan, _ = sat2vec.reduce_sat_to_veccsp(phi, ell)
    L, P = csp.split_instance(G)
    s = plan.s_max
    assert (G.k, G.m) == (12 * s * ell * ell, 18 * s * ell * ell)
    assert (L.m, P.m) == (12 * s * ell * ell, 6 * s * ell * ell)
    assert csp.validate_veccsp(G) == []


@given(formulas)
def test_every_vertex_has_one_parallel_and_two_linear_edges(spec):
    phi, ell = build(spec)
    G, _, _ = sat2vec.reduce_sat_to_veccsp(phi, ell)
    par = np.zeros(G.k, dtype=int)
    lin = np.zeros(G.k, dtype=int)
    for c in G.constraints:
        target = lin if isinstance(c, csp.Linear) else par
        target[c.u] += 1
        target[c.v] += 1
    assert (par == 1).all() and (lin == 2).all()


@given(formulas)
def test_matchings_are_matchings_and_extend(spec):
    phi, ell = build(spec)
    _, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, ell)
    for key, pairs in perms.matchings.items():
        assert len({c for c, _ in pairs}) == len(pairs) == len({x for _, x in pairs})
        kappa = perms.kappa[key]
        assert sorted(kappa) == list(range(plan.d))
        assert all(kappa[c] == x for c, x in pairs)


@given(formulas)
def test_sat_iff_lift_satisfies(spec):
    phi, ell = build(spec)
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, ell)
    values = ((np.arange(1 << phi.n)[:, None] >> np.arange(phi.n)[None, :]) & 1).astype(bool)
    lifts = np.stack([sat2vec.lift_assignment(phi, plan, perms, v) for v in values])
    full = csp.satisfied_counts(G, lifts) == G.m
    for v, lifted, ok in zip(values, lifts, full):
        assert ok == phi.satisfied_by(v)
        if ok:
            projected = sat2vec.project_solution(G, plan, perms, lifted)
            assert np.array_equal(projected, v)
            assert phi.satisfied_by(projected)
