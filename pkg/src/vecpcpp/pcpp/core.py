"""Descriptors, randomness enumeration and acceptance measurement shared by all verifiers.

A verifier exposes a list of *branches* ``(weight, verifier, test)``; each test
reads its random choices from a tape of ``randomness_bits(test)`` bits. The
exact acceptance probability is the weighted average over branches of the
fraction of accepting tapes, which equals the behaviour of a verifier that
first picks a test (with the branch weight) and then a uniform tape.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..exceptions import CapExceededError
from ..stats import wilson
from ..tape import IndexTape, SeededTape, Tape

DEFAULT_ENUMERATION_CAP = 1 << 16
MAX_QUERIES = 4


@dataclass(eq=False)
class Descriptor:
    verifier: str
    test: str
    randomness: tuple
    queries: list           # [(block name, index)]
    predicate: Callable     # answers in query order -> bool
    elements: dict = field(default_factory=dict)
    binary_blocks: frozenset = frozenset()

    def positions(self, proofs=None) -> list:
        """Distinct ``(block, key)`` pairs queried, in first-query order."""
        seen = []
        for block, index in self.queries:
            key = (block, position_key(index))
            if key not in seen:
                seen.append(key)
        return seen

    def slot_of_query(self) -> list:
        keys = self.positions()
        return [keys.index((b, position_key(i))) for b, i in self.queries]

    def accepts(self, answers) -> bool:
        for (block, _), ans in zip(self.queries, answers):
            if block in self.binary_blocks and np.any(np.asarray(ans) > 1):
                return False
        return bool(self.predicate(answers))


def position_key(index):
    if isinstance(index, np.ndarray):
        return ("vec", index.tobytes())
    return index.key


def query_answers(descriptor: Descriptor, proofs: dict) -> list:
    return [np.asarray(proofs[block](index), dtype=np.uint8) for block, index in descriptor.queries]


def run_descriptor(descriptor: Descriptor, proofs: dict) -> bool:
    return descriptor.accepts(query_answers(descriptor, proofs))


class Verifier:
    name = "verifier"
    tests: tuple = ()

    def randomness_bits(self, test: str) -> int:
        raise NotImplementedError

    def describe(self, test: str, tape: Tape) -> Descriptor:
        raise NotImplementedError

    def branches(self) -> list:
        w = Fraction(1, len(self.tests))
        return [(w, self, t) for t in self.tests]

    def counts(self) -> dict:
        """Raw number of random tapes per test, keyed by ``(verifier, test)``."""
        return {(v.name, t): 1 << v.randomness_bits(t) for _, v, t in self.branches()}

    def randomness_log2(self) -> dict:
        return {(v.name, t): v.randomness_bits(t) for _, v, t in self.branches()}


def enumerate_randomness(verifier: Verifier, test: str | None = None, owner: Verifier | None = None,
                         cap: int = DEFAULT_ENUMERATION_CAP):
    """``(total, iterator)`` over canonical descriptors, test-major then tape index.

    ``test`` restricts to one test of ``owner`` (default: the verifier itself).
    """
    items = [(v, t) for _, v, t in verifier.branches()
             if test is None or (t == test and (owner is None or v is owner))]
    total = sum(1 << v.randomness_bits(t) for v, t in items)
    if total > cap:
        raise CapExceededError(f"{total} random tapes exceed the enumeration cap {cap}")

    def gen():
        for v, t in items:
            for r in range(1 << v.randomness_bits(t)):
                yield v.describe(t, IndexTape(r))

    return total, gen()


def pick_branch(branches: list, rng: np.random.Generator):
    denom = 1
    for w, _, _ in branches:
        denom = denom * w.denominator // np.gcd(denom, w.denominator)
    u = int(rng.integers(0, denom))
    acc = 0
    for w, v, t in branches:
        acc += int(w * denom)
        if u < acc:
            return v, t
    return branches[-1][1], branches[-1][2]


def sample_descriptor(verifier: Verifier, seed: int, sample: int, tests=None) -> Descriptor:
    """The ``sample``-th seeded descriptor; ``tests`` optionally restricts to a set of test ids."""
    branches = verifier.branches()
    if tests is not None:
        branches = [b for b in branches if b[2] in tests]
        total = sum(w for w, _, _ in branches)
        branches = [(w / total, v, t) for w, v, t in branches]
    rng = np.random.default_rng([seed & (2**63 - 1), sample])
    v, t = pick_branch(branches, rng)
    return v.describe(t, SeededTape(seed, sample))


def estimate_acceptance(verifier: Verifier, proofs: dict, mode: str = "exhaustive", trials: int = 10_000,
                        seed: int = 0, cap: int = DEFAULT_ENUMERATION_CAP, tests=None, log=None):
    """Exact acceptance (``Fraction``) or a seeded Wilson estimate.

    ``tests`` restricts measurement to a subset of test ids, renormalising
    their weights. ``log`` is an optional writable text stream for JSON lines.
    """
    branches = verifier.branches()
    if tests is not None:
        branches = [b for b in branches if b[2] in tests]
        if not branches:
            raise ValueError(f"no tests among {tests}")
    if mode == "exhaustive":
        total_w = sum(w for w, _, _ in branches)
        for _, v, t in branches:
            if (1 << v.randomness_bits(t)) > cap:
                raise CapExceededError(
                    f"test {v.name}/{t} has 2^{v.randomness_bits(t)} random tapes, above cap {cap}")
        result = Fraction(0)
        for w, v, t in branches:
            count = 1 << v.randomness_bits(t)
            accepted = 0
            for r in range(count):
                desc = v.describe(t, IndexTape(r))
                verdict, answers = _run_logged(desc, proofs)
                accepted += verdict
                if log is not None:
                    write_log(log, desc, answers, verdict)
            result += w * Fraction(accepted, count)
        return result / total_w
    if mode == "sampled":
        names = None if tests is None else set(tests)
        accepted = 0
        for i in range(trials):
            desc = sample_descriptor(verifier, seed, i, names)
            verdict, answers = _run_logged(desc, proofs)
            accepted += verdict
            if log is not None:
                write_log(log, desc, answers, verdict)
        return wilson(accepted, trials, seed)
    raise ValueError(f"unknown mode {mode!r}")


def _run_logged(desc, proofs):
    answers = query_answers(desc, proofs)
    return desc.accepts(answers), answers


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, bytes):
        return x.hex()
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def log_record(desc: Descriptor, answers, verdict: bool) -> dict:
    return {"verifier": desc.verifier, "test": desc.test, "randomness_index": _jsonable(desc.randomness),
            "queries": [[b, _jsonable(position_key(i) if not isinstance(i, np.ndarray) else i)]
                        for b, i in desc.queries],
            "answers": [_jsonable(a) for a in answers], "verdict": bool(verdict)}


def write_log(stream, desc, answers, verdict) -> None:
    stream.write(json.dumps(log_record(desc, answers, verdict), sort_keys=True) + "\n")
