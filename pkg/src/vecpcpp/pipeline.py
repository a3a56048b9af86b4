"""From a verifier to a gap CSP, the end-to-end chain, and adversarial proofs.

The gap CSP has one variable per proof position and one *supernode* per
random tape. The supernode's value is the list of answers at the positions
that tape queries, and each queried position gets a constraint that the
answers are accepting and agree with that position's own value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import csp, sat2vec
from .exceptions import CapExceededError
from .hadamard import OverlayWord, RandomWord, SeededWord, WordOracle, ZeroWord, word_from_json
from .pcpp import CombinedVerifier, LinearVerifier, ParallelVerifier, build_honest_proof
from .pcpp.blocks import RandomBlockWord, ZeroBlockWord
from .pcpp.core import (Descriptor, enumerate_randomness, position_key, query_answers,
                        sample_descriptor)
from .stats import wilson
from .tape import IndexTape

EXPLICIT_CAP = 1 << 16


def _log2_sum(exponents) -> float:
    exponents = list(exponents)
    if not exponents:
        return float("-inf")
    top = max(exponents)
    return top + math.log2(sum(2.0 ** (e - top) for e in exponents))


def _size(exponents) -> dict:
    exponents = sorted(exponents)
    out = {"log2": _log2_sum(exponents), "terms_log2": exponents}
    if exponents and max(exponents) <= 256:
        out["exact"] = sum(1 << e for e in exponents)
    return out


def _components(verifier):
    if isinstance(verifier, CombinedVerifier):
        return [verifier.linear, verifier.parallel]
    return [verifier]


def position_blocks(verifier) -> dict:
    """Log2 of the number of positions in each proof block, ``pi1`` first."""
    blocks = {}
    for v in _components(verifier):
        blocks["pi1"] = v.k * v.field.t
        if isinstance(v, LinearVerifier):
            blocks["piL"] = v.k * v.m * v.field.t
        elif isinstance(v, ParallelVerifier):
            blocks["tau1"] = v.blocks * v.c
            blocks["tau2"] = v.blocks * v.c * v.c
    return blocks


def gap_sizes(verifier) -> dict:
    """Sizes of the three variable groups: positions of ``pi1``, auxiliary positions, supernodes."""
    blocks = position_blocks(verifier)
    first = [blocks["pi1"]]
    aux = [e for b, e in blocks.items() if b != "pi1"]
    supers = list(verifier.randomness_log2().values())
    return {"positions": _size(first), "auxiliary": _size(aux), "supernodes": _size(supers),
            "total": _size(first + aux + supers),
            "field_order": verifier.instance.field.order, "k": verifier.instance.k}


def _accepting_and_consistent(desc: Descriptor, slots, slot: int):
    def predicate(config, value) -> bool:
        answers = [config[s] for s in slots]
        return desc.accepts(answers) and np.array_equal(np.asarray(config[slot]), np.asarray(value))
    return predicate


def constraints_for(desc: Descriptor):
    """The gap-CSP constraints contributed by one random tape: ``[(position, predicate)]``."""
    slots = desc.slot_of_query()
    return [(pos, _accepting_and_consistent(desc, slots, i)) for i, pos in enumerate(desc.positions())]


def supernode_config(desc: Descriptor, proofs: dict) -> tuple:
    """The honest supernode value: proof answers at each distinct queried position."""
    answers = query_answers(desc, proofs)
    slots = desc.slot_of_query()
    config = [None] * len(desc.positions())
    for s, a in zip(slots, answers):
        config[s] = a
    return tuple(config)


@dataclass(eq=False)
class ExplicitGapCsp(csp.GapCspInstance):
    position_index: dict = field(default_factory=dict)   # (block, key) -> variable
    positions: list = field(default_factory=list)        # variable -> (block, index)
    descriptors: list = field(default_factory=list)      # supernode number -> descriptor
    supernode_base: int = 0
    sizes: dict = field(default_factory=dict)

    def honest_assignment(self, proofs: dict) -> list:
        values = [np.asarray(proofs[b](i)) for b, i in self.positions]
        values += [supernode_config(d, proofs) for d in self.descriptors]
        return values


def _all_positions(verifier, block: str, log2_count: int):
    from .gf import all_vectors
    v = _components(verifier)[0]
    F = v.field
    arity = log2_count // F.t
    return [(block, x) for x in all_vectors(F, arity)]


def pcpp_to_csp(verifier, cap: int = EXPLICIT_CAP) -> ExplicitGapCsp:
    """Materialize the gap CSP of a verifier whose positions and tapes fit under ``cap``."""
    blocks = position_blocks(verifier)
    for b, e in blocks.items():
        if b in ("tau1", "tau2"):
            raise CapExceededError("binary proof blocks are too long to materialize; use the virtual mode")
        if (1 << e) > cap:
            raise CapExceededError(f"block {b} has 2^{e} positions, above cap {cap}")
    total, descs = enumerate_randomness(verifier, cap=cap)
    G = ExplicitGapCsp(alphabets=[], constraints=[], names=[])
    for b in blocks:
        for block, index in _all_positions(verifier, b, blocks[b]):
            G.position_index[(block, position_key(index))] = len(G.positions)
            G.positions.append((block, index))
            G.alphabets.append({"block": block, "values": f"F^{verifier.instance.d}"})
            G.names.append(f"{block}[{','.join(map(str, index.tolist()))}]")
    G.supernode_base = len(G.positions)
    for r, desc in enumerate(descs):
        z = G.supernode_base + r
        G.descriptors.append(desc)
        G.alphabets.append({"supernode": [desc.verifier, desc.test], "arity": len(desc.positions())})
        G.names.append(f"z[{desc.verifier}/{desc.test}/{r}]")
        for pos, predicate in constraints_for(desc):
            G.constraints.append(csp.GapConstraint(z, G.position_index[pos], predicate,
                                                   (desc.verifier, desc.test, r)))
    G.sizes = gap_sizes(verifier)
    return G


class VirtualGapCsp:
    """The gap CSP exposed as a sampler keyed by the randomness index.

    ``constraint(test, r)`` rebuilds the constraints of one supernode from its
    canonical tape, so it agrees with the explicit instance wherever both exist.
    """

    def __init__(self, verifier):
        self.verifier = verifier
        self.sizes = gap_sizes(verifier)

    def constraint(self, test: str, r: int):
        return constraints_for(self.verifier.describe(test, IndexTape(r)))

    def sample(self, seed: int, i: int):
        """The ``i``-th sampled constraint as ``(descriptor, slot)``: a tape, then a queried position."""
        desc = sample_descriptor(self.verifier, seed, i)
        rng = np.random.default_rng([seed & (2**63 - 1), i, 1])
        return desc, int(rng.integers(0, len(desc.positions())))

    def satisfied_by_proofs(self, desc: Descriptor, slot: int, proofs: dict) -> bool:
        """Check one constraint under the assignment read off ``proofs``."""
        slots = desc.slot_of_query()
        block, index = desc.queries[slots.index(slot)]
        predicate = _accepting_and_consistent(desc, slots, slot)
        return predicate(supernode_config(desc, proofs), proofs[block](index))

    def value_on_samples(self, proofs: dict, trials: int, seed: int):
        ok = sum(self.satisfied_by_proofs(*self.sample(seed, i), proofs) for i in range(trials))
        return wilson(ok, trials, seed)


def end_to_end(phi: sat2vec.Cnf3, ell: int, trials: int = 10_000, seed: int = 0) -> tuple:
    """Run the whole chain on a formula; returns the virtual gap CSP and a JSON report."""
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, ell)
    G_L, G_P = csp.split_instance(G)
    verifier = CombinedVerifier(G)
    gap = VirtualGapCsp(verifier)
    structure = sat2vec.check_structure(phi)
    report = {
        "stage": "end_to_end",
        "sat": {"n": phi.n, "m": phi.m, "max_occurrences": structure["max_occurrences"],
                "at_most_four": structure["at_most_four"]},
        "veccsp": {"k": G.k, "d": G.d, "constraints": G.m, "alphabet": f"GF({G.field.order})^{G.d}",
                   "s_max": plan.s_max, "linear": G_L.m, "parallel": G_P.m},
        "pcpp": {"c": verifier.parallel.c, "q": verifier.parallel.q, "blocks": verifier.parallel.blocks,
                 "randomness_log2": {f"{v}/{t}": b for (v, t), b in verifier.randomness_log2().items()}},
        "sizes": gap.sizes,
        "constants": {**verifier.parameters.to_json(),
                      "soundness_threshold": str(1 - verifier.parameters.epsilon_gap)},
        "acceptance": None,
    }
    values = sat2vec.brute_force_sat(phi)
    if values is not None:
        sigma = sat2vec.lift_assignment(phi, plan, perms, values)
        proofs = build_honest_proof(verifier, sigma)
        est = gap.value_on_samples(proofs, trials, seed)
        report["acceptance"] = {"estimate": est.value, "satisfied": est.successes,
                                "ci": [est.low, est.high], "seed": seed, "trials": trials}
    return gap, report


# -- adversarial proofs ---------------------------------------------------------

ATTACK_FAMILIES = ("wrong-assignment-honest", "overlay-corruption", "random-word", "zeroed-block")


def generate_attack(spec: dict, verifier, proofs: dict) -> dict:
    """Corrupted copy of ``proofs`` described by ``spec``; untouched blocks are shared."""
    family = spec.get("family")
    if family not in ATTACK_FAMILIES:
        raise ValueError(f"unknown attack family {family!r}")
    if family == "wrong-assignment-honest":
        return build_honest_proof(verifier, spec["assignment"], require_solution=False)
    block = spec.get("block")
    if block not in proofs:
        raise KeyError(f"unknown block id {block!r}; proof has {sorted(proofs)}")
    base = proofs[block]
    out = dict(proofs)
    explicit = isinstance(base, WordOracle)
    if family == "overlay-corruption":
        if not explicit:
            raise ValueError("overlay corruption needs an explicitly indexed block")
        if "patches" in spec:
            out[block] = OverlayWord(base, [tuple(p) for p in spec["patches"]])
        else:
            rate = float(spec.get("rate", 0.0))
            out[block] = base if rate == 0 else SeededWord(base, rate, int(spec.get("seed", 0)))
    elif family == "random-word":
        seed = int(spec.get("seed", 0))
        out[block] = (RandomWord(base.field, base.arity, base.d, seed) if explicit
                      else RandomBlockWord(base.d, base.blocks, base.length, seed))
    else:
        out[block] = (ZeroWord(base.field, base.arity, base.d) if explicit
                      else ZeroBlockWord(base.d, base.blocks, base.length, base.c))
    return out


def proofs_from_json(verifier, obj: dict) -> dict:
    """Proof oracles from a JSON description.

    ``assignment`` (optional) yields the honest blocks for that assignment,
    solution or not. ``blocks`` then overrides single blocks: explicit
    blocks take any serialized word, binary blocks take ``{"kind": "zero"}``
    or ``{"kind": "random", "seed": s}``.
    """
    proofs = {}
    if "assignment" in obj:
        proofs = build_honest_proof(verifier, obj["assignment"], require_solution=False)
    for block, spec in obj.get("blocks", {}).items():
        if block in ("tau1", "tau2"):
            v = verifier.parallel if isinstance(verifier, CombinedVerifier) else verifier
            if not isinstance(v, ParallelVerifier):
                raise KeyError(f"unknown block id {block!r} for this verifier")
            length = v.c if block == "tau1" else v.c * v.c
            if spec["kind"] == "zero":
                proofs[block] = ZeroBlockWord(v.d, v.blocks, length, v.c)
            elif spec["kind"] == "random":
                proofs[block] = RandomBlockWord(v.d, v.blocks, length, int(spec.get("seed", 0)))
            else:
                raise ValueError(f"binary block {block} must be zero or random, got {spec['kind']!r}")
        else:
            proofs[block] = word_from_json(spec)
    missing = _required_blocks(verifier) - set(proofs)
    if missing:
        raise KeyError(f"proof is missing blocks {sorted(missing)}")
    return proofs


def _required_blocks(verifier) -> set:
    return set(position_blocks(verifier))
