"""The acceptance suite: ten numbered checks, each returning a :class:`CriterionResult`.

Every check is deterministic. The time budget of a check is part of its
verdict, so a slow machine can fail a check that is otherwise correct; the
measured time is always reported.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import csp, fixtures, quadeq, sat2vec
from .gf import GF2, all_vectors, gf
from .hadamard import ExplicitWord, blr_pass_rate, distance_to_code
from .pcpp import (LinearVerifier, ParallelVerifier, build_honest_proof, enumerate_randomness,
                   estimate_acceptance)
from .pcpp.blocks import Dense, Rank1
from .pcpp.core import query_answers
from .pipeline import VirtualGapCsp, end_to_end, pcpp_to_csp
from .stats import wilson
from .tape import OverrideTape, SeededTape


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] criterion {self.number:>2} {self.title}: {self.detail} "
                f"({self.seconds:.2f}s of {self.budget:g}s)")

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _timed(number: int, title: str, budget: float, check) -> CriterionResult:
    start = time.perf_counter()
    ok, detail = check()
    seconds = time.perf_counter() - start
    return CriterionResult(number, title, bool(ok) and seconds < budget, detail, seconds, budget)


# -- 1. counting identities ------------------------------------------------------

def _counting():
    rng = np.random.default_rng(1)
    formulas = [fixtures.sat1(), fixtures.random_cnf3(rng, 9, 8, max_occurrences=4)]
    rows = []
    for phi in formulas:
        for ell in (1, 2, 3):
            G, plan, _ = sat2vec.reduce_sat_to_veccsp(phi, ell)
            G_L, G_P = csp.split_instance(G)
            got = (G.k, G.m, G_L.m, G_P.m)
            want = (48 * ell * ell, 72 * ell * ell, 48 * ell * ell, 24 * ell * ell)
            rows.append(plan.s_max == 4 and got == want and not csp.validate_veccsp(G))
    return all(rows), f"{sum(rows)}/{len(rows)} (formula, ell) pairs match 48l^2, 72l^2, 48l^2, 24l^2"


# -- 2. satisfiability is preserved by the lift ------------------------------------------

def sat_corpus(count: int = 50, seed: int = 2):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(3, 11))
        phi = fixtures.random_cnf3(rng, n, int(rng.integers(1, 9)))
        if i % 5 == 4:
            # every sign pattern on three variables: unsatisfiable
            xs = [int(x) + 1 for x in rng.choice(n, size=3, replace=False)]
            core = [tuple(x * s for x, s in zip(xs, signs))
                    for signs in itertools.product((1, -1), repeat=3)]
            phi = sat2vec.Cnf3(n, tuple(core) + phi.clauses[:2])
        out.append((phi, 1 + i % 3))
    return out


def _lift_equivalence():
    mismatches = projections = 0
    satisfiable = 0
    for phi, ell in sat_corpus():
        G, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, ell)
        values = ((np.arange(1 << phi.n)[:, None] >> np.arange(phi.n)[None, :]) & 1).astype(bool)
        lifts = np.stack([sat2vec.lift_assignment(phi, plan, perms, v) for v in values])
        full = csp.satisfied_counts(G, lifts) == G.m
        truth = np.array([phi.satisfied_by(v) for v in values])
        mismatches += int(np.count_nonzero(full != truth))
        satisfiable += bool(truth.any())
        for v, lifted in zip(values[truth], lifts[truth]):
            projections += not np.array_equal(sat2vec.project_solution(G, plan, perms, lifted), v)
    ok = mismatches == 0 and projections == 0
    return ok, (f"50 formulas ({satisfiable} satisfiable): {mismatches} SAT/lift mismatches, "
                f"{projections} failed projections")


# -- 3. BLR bound --------------------------------------------------------------------

def _blr_bound():
    worst = Fraction(0)
    bad = 0
    for table in itertools.product((0, 1), repeat=4):
        word = ExplicitWord(GF2, 2, [[x] for x in table])
        eps = 1 - blr_pass_rate(word)
        dist, _ = distance_to_code(word)
        bad += dist > 6 * eps
        if eps:
            worst = max(worst, dist / eps)
    return bad == 0, f"16 words, {bad} violations; largest distance/rejection ratio {worst}"


# -- 4. random subsum ---------------------------------------------------------------

def min_disagreement(F, rows: int, cols: int) -> Fraction:
    """Smallest ``Pr_x[x^T M1 != x^T M2]`` over distinct ``rows x cols`` matrices."""
    mats = all_vectors(F, rows * cols).reshape(-1, rows, cols)
    xs = all_vectors(F, rows)
    prod = F.mul_table[xs[None, :, :, None], mats[:, None, :, :]]
    images = np.bitwise_xor.reduce(prod, axis=2)             # (matrices, points, cols)
    weights = F.order ** np.arange(cols, dtype=np.int64)
    codes = (images.astype(np.int64) * weights).sum(axis=2)  # (matrices, points)
    n = codes.shape[0]
    best = codes.shape[1]
    for start in range(0, n, 128):
        block = codes[start:start + 128]
        agree = (block[:, None, :] == codes[None, :, :]).sum(axis=2)
        agree[np.arange(block.shape[0]), np.arange(start, start + block.shape[0])] = 0
        best = min(best, codes.shape[1] - int(agree.max()))
    return Fraction(best, codes.shape[1])


def _random_subsum():
    shapes = [(1, r, c) for r in (1, 2, 3) for c in (1, 2, 3)]
    shapes += [(t, r, c) for t in (2, 3) for r in (1, 2) for c in (1, 2)]
    bad = []
    for t, r, c in shapes:
        F = gf(t)
        if min_disagreement(F, r, c) < 1 - Fraction(1, F.order):
            bad.append((F.order, r, c))
    return not bad, f"{len(shapes)} (field, shape) families, violations: {bad or 'none'}"


# -- 5. circuits and quadratic equations ---------------------------------------------

def _quadeq_equivalence():
    rng = np.random.default_rng(5)
    mismatch = 0
    satisfiable = 0
    for _ in range(30):
        C = fixtures.random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(1, 11)))
        gamma = quadeq.circuit_to_quadeq(C)
        solutions = quadeq.quadeq_solutions(gamma)
        inputs = quadeq.lex_vectors(C.n_inputs, 0, 1 << C.n_inputs)
        accepted = [C.gate_values(x) for x in inputs if C.evaluate(x)]
        expected = np.array(accepted, dtype=np.uint8).reshape(-1, C.size)
        satisfiable += bool(len(accepted))
        same_sat = (quadeq.circuit_brute_force(C) is None) == (quadeq.quadeq_brute_force(gamma) is None)
        same_set = {r.tobytes() for r in solutions} == {r.tobytes() for r in expected}
        mismatch += not (same_sat and same_set and len(solutions) == len(expected))
    return mismatch == 0, f"30 circuits ({satisfiable} satisfiable), {mismatch} mismatches"


# -- 6. linear verifier on LIN-1 ---------------------------------------------------

def lin1_weighted_descriptors(verifier: LinearVerifier):
    out = []
    for w, v, t in verifier.branches():
        total, descs = enumerate_randomness(verifier, test=t)
        out.extend((w / total, d) for d in descs)
    return out


def _linear_micro():
    G = fixtures.lin1()
    V = LinearVerifier(G)
    descs = lin1_weighted_descriptors(V)
    counts = {t: n for (_, t), n in V.counts().items()}
    honest = estimate_acceptance(V, build_honest_proof(V, fixtures.LIN1_SOLUTION))
    codewords = {tuple(int(s[0] * b[0] ^ s[1] * b[1]) for b in all_vectors(GF2, 2))
                 for s in ([0, 0], [1, 1])}
    threshold = 1 - Fraction(1, 600)
    high = violations = 0
    for t1 in itertools.product((0, 1), repeat=4):
        pi1 = ExplicitWord(GF2, 2, [[x] for x in t1])
        for t2 in itertools.product((0, 1), repeat=4):
            proofs = {"pi1": pi1, "piL": ExplicitWord(GF2, 2, [[x] for x in t2])}
            acc = sum(w for w, d in descs if d.accepts(query_answers(d, proofs)))
            if acc >= threshold:
                high += 1
                violations += t1 not in codewords
    ok = (len(descs) == 192 and counts == {"L1": 16, "L2": 16, "L3": 128, "L4": 32}
          and honest == 1 and violations == 0)
    return ok, (f"{len(descs)} descriptors, honest acceptance {honest}; {high} of 256 pairs reach "
                f"{threshold}, {violations} of them off the code")


# -- 7. parallel completeness on PAR-1 ------------------------------------------------

PAR1_SAMPLES = 100_000


def _parallel_completeness(samples: int = PAR1_SAMPLES):
    G = fixtures.par1()
    V = ParallelVerifier(G)
    solutions = [s for s in csp.all_assignments(G) if csp.is_solution(G, s)]
    p1 = [estimate_acceptance(V, build_honest_proof(V, s), tests=["P1"]) for s in solutions]
    proofs = build_honest_proof(V, fixtures.PAR1_SOLUTION)
    est = estimate_acceptance(V, proofs, mode="sampled", trials=samples, seed=7, tests=V.tests[1:])
    rejections = est.trials - est.successes
    ok = all(a == 1 for a in p1) and rejections == 0
    return ok, (f"P1 exact on {len(solutions)} solutions: {sorted(set(map(str, p1)))}; "
                f"{rejections} rejections in {samples} P2-P8 samples")


# -- 8. parallel soundness probes ----------------------------------------------------

def p4_planted_rejection(samples: int = 10_000, seed: int = 8):
    """Plant a bit in the empty-set block of coordinate 0 of ``tau1``; P4 rejection estimate."""
    G = fixtures.par1()
    V = ParallelVerifier(G)
    proofs = build_honest_proof(V, fixtures.PAR1_SOLUTION)
    tau1 = proofs["tau1"].copy(provenance="planted")
    bit = np.zeros(V.c, dtype=np.uint8)
    bit[0] = 1
    tau1.add(0, 0, Dense(bit))
    proofs = {**proofs, "tau1": tau1}
    masks = list(itertools.product((0, 1), repeat=V.blocks))
    per_mask = samples // len(masks)
    rejected = 0
    for mi, mask in enumerate(masks):
        for i in range(per_mask):
            tape = OverrideTape(SeededTape(seed, mi * per_mask + i), {0: mask})
            d = V.describe("P4", tape)
            rejected += not d.accepts(query_answers(d, proofs))
    return wilson(rejected, per_mask * len(masks), seed)


def p6_tensor_rejection(cells, samples: int = 10_000, seed: int = 9):
    """Add ``sum e_a e_b^T`` over ``cells`` to coordinate 0 of ``tau2``; P6 rejection estimate."""
    G = fixtures.par1()
    V = ParallelVerifier(G)
    proofs = build_honest_proof(V, fixtures.PAR1_SOLUTION)
    tau2 = proofs["tau2"].copy(provenance="tensor")
    S = int(V.kappa_blocks[0])
    for a, b in cells:
        x, y = np.zeros(V.c, dtype=np.uint8), np.zeros(V.c, dtype=np.uint8)
        x[a], y[b] = 1, 1
        tau2.add(0, S, Rank1(x, y))
    proofs = {**proofs, "tau2": tau2}
    est = estimate_acceptance(V, proofs, mode="sampled", trials=samples, seed=seed, tests=["P6"])
    return wilson(est.trials - est.successes, est.trials, seed)


def p7_violation_rejection(seed: int = 10) -> Fraction:
    """Exact P7 rejection over every ``H`` for an honest-format proof of a non-solution."""
    G = fixtures.par1()
    V = ParallelVerifier(G)
    sigma = np.array([[1, 0], [1, 1]], dtype=np.uint8)  # coordinate 0 violates NAND
    proofs = build_honest_proof(V, sigma, require_solution=False)
    rejected = 0
    for h in range(1 << V.q):
        bits = [(h >> i) & 1 for i in range(V.q)]
        d = V.describe("P7", OverrideTape(SeededTape(seed, h), {0: bits}))
        rejected += not d.accepts(query_answers(d, proofs))
    return Fraction(rejected, 1 << V.q)


def _parallel_soundness():
    a = p4_planted_rejection()
    b1 = p6_tensor_rejection([(0, 1)])
    b2 = p6_tensor_rejection([(0, 1), (2, 3)])
    c = p7_violation_rejection()
    ok_a = a.value >= Fraction(1, 8) - 3 * a.radius
    ok_b = b1.value >= 0.25 - 3 * b1.radius and b2.value >= 0.25
    ok_c = c >= Fraction(1, 2)
    detail = (f"(a) P4 {a.value:.4f}+-{a.radius:.4f} vs 1/8; (b) P6 rank-1 {b1.value:.4f}+-{b1.radius:.4f}, "
              f"rank-2 {b2.value:.4f} vs 1/4; (c) P7 exact {c} vs 1/2")
    return ok_a and ok_b and ok_c, detail


# -- 9. gap CSP conversion -------------------------------------------------------------

def _gap_conversion():
    V = LinearVerifier(fixtures.lin1())
    gap = pcpp_to_csp(V)
    proofs = build_honest_proof(V, fixtures.LIN1_SOLUTION)
    value = csp.evaluate(gap, gap.honest_assignment(proofs))
    sizes = gap.sizes
    v1, f, g = (sizes[k]["exact"] for k in ("positions", "auxiliary", "supernodes"))
    counted = gap.num_variables == v1 + f + g == 4 + 4 + 192
    virtual = VirtualGapCsp(V)
    wrong = build_honest_proof(V, fixtures.LIN1_NON_SOLUTION, require_solution=False)
    sigma_h, sigma_w = gap.honest_assignment(proofs), gap.honest_assignment(wrong)
    by_supernode = {}
    for con in gap.constraints:
        by_supernode.setdefault(con.u, []).append(con)
    disagreements = r_global = 0
    for _, _, t in V.branches():
        for r in range(1 << V.randomness_bits(t)):
            z = gap.supernode_base + r_global
            mine = by_supernode[z]
            theirs = virtual.constraint(t, r)
            if [gap.position_index[pos] for pos, _ in theirs] != [c.v for c in mine]:
                disagreements += 1
            else:
                for (_, pred), con in zip(theirs, mine):
                    for sigma in (sigma_h, sigma_w):
                        if pred(sigma[z], sigma[con.v]) != con.predicate(sigma[z], sigma[con.v]):
                            disagreements += 1
            r_global += 1
    ok = value == 1 and counted and disagreements == 0 and len(gap.constraints) <= 4 * 192
    return ok, (f"val(G*, honest) = {value}; |V*| = {v1} + {f} + {g} = {gap.num_variables}; "
                f"|E*| = {len(gap.constraints)}; {disagreements} virtual/explicit disagreements")


# -- 10. end to end ----------------------------------------------------------------

def _end_to_end(trials: int = 10_000):
    _, report = end_to_end(fixtures.sat1(), 1, trials=trials, seed=11)
    vc, acc = report["veccsp"], report["acceptance"]
    ok = (vc["k"] == 48 and vc["d"] == 3 and report["constants"]["epsilon_gap"] == "1/9600"
          and acc["satisfied"] == trials)
    return ok, (f"k={vc['k']}, d={vc['d']}, {vc['alphabet']}, eps*={report['constants']['epsilon_gap']}; "
                f"{acc['satisfied']}/{trials} sampled G* constraints satisfied")


CRITERIA = {
    1: ("counting identities", 1.0, _counting),
    2: ("SAT/lift equivalence", 30.0, _lift_equivalence),
    3: ("BLR distance bound", 1.0, _blr_bound),
    4: ("random subsum", 10.0, _random_subsum),
    5: ("circuit/Quadeq equivalence", 5.0, _quadeq_equivalence),
    6: ("linear verifier on LIN-1", 10.0, _linear_micro),
    7: ("parallel completeness on PAR-1", 60.0, _parallel_completeness),
    8: ("parallel soundness probes", 120.0, _parallel_soundness),
    9: ("gap CSP conversion", 10.0, _gap_conversion),
    10: ("end-to-end smoke", 120.0, _end_to_end),
}


def run_criterion(number: int) -> CriterionResult:
    title, budget, check = CRITERIA[number]
    return _timed(number, title, budget, check)


def run_all(numbers=None) -> list:
    return [run_criterion(n) for n in (numbers or sorted(CRITERIA))]
