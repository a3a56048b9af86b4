"""Command line interface. Every subcommand prints one JSON document to stdout.

Exit codes: 0 success, 2 usage or input errors, 3 a size cap was exceeded,
4 an invariant failed (including a failing self-test).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import csp, pipeline, sat2vec, selftest
from .exceptions import CapExceededError, NotASolutionError
from .pcpp import build_honest_proof, estimate_acceptance, verifier_for
from .pcpp.core import DEFAULT_ENUMERATION_CAP

EXIT_USAGE, EXIT_CAP, EXIT_INVARIANT = 2, 3, 4


class InvariantError(RuntimeError):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _acceptance_json(result) -> dict:
    if hasattr(result, "to_json"):
        return result.to_json()
    return {"exact": f"{result.numerator}/{result.denominator}"}


def _mode(name: str) -> str:
    return "exhaustive" if name == "exhaustive" else "sampled"


def cmd_reduce(args) -> int:
    phi = sat2vec.parse_dimacs(Path(args.cnf).read_text())
    G, plan, perms = sat2vec.reduce_sat_to_veccsp(phi, args.ell)
    problems = csp.validate_veccsp(G)
    if problems:
        raise InvariantError("; ".join(problems))
    out = Path(args.out)
    _write_json(out / "instance.json", G.to_json())
    _write_json(out / "sidecar.json", sat2vec.sidecar_json(plan, perms))
    G_L, G_P = csp.split_instance(G)
    _emit({"stage": "reduce", "ell": args.ell, "s_max": plan.s_max,
           "sizes": {"variables": G.k, "constraints": G.m, "linear": G_L.m, "parallel": G_P.m,
                     "d": G.d, "alphabet": f"GF({G.field.order})^{G.d}"},
           "artifacts": [str(out / "instance.json"), str(out / "sidecar.json")]})
    return 0


def cmd_split(args) -> int:
    G = csp.VecCspInstance.from_json(_load_json(args.instance))
    G_L, G_P = csp.split_instance(G)
    report = {"stage": "split", "sizes": {"linear": G_L.m, "parallel": G_P.m}}
    if args.out:
        out = Path(args.out)
        _write_json(out / "linear.json", G_L.to_json())
        _write_json(out / "parallel.json", G_P.to_json())
        report["artifacts"] = [str(out / "linear.json"), str(out / "parallel.json")]
    _emit(report)
    return 0


def _measure(verifier, proofs, args, log=None):
    return estimate_acceptance(verifier, proofs, mode=_mode(args.mode), trials=args.trials, seed=args.seed,
                               cap=args.cap, tests=args.tests, log=log)


def cmd_verify(args) -> int:
    G = csp.VecCspInstance.from_json(_load_json(args.instance))
    verifier = verifier_for(G, args.verifier)
    proofs = pipeline.proofs_from_json(verifier, _load_json(args.proof))
    if args.log:
        with open(args.log, "w") as log:
            result = _measure(verifier, proofs, args, log)
    else:
        result = _measure(verifier, proofs, args)
    _emit({"stage": "verify", "verifier": verifier.name, "mode": args.mode,
           "randomness_log2": {f"{v}/{t}": b for (v, t), b in verifier.randomness_log2().items()},
           "acceptance": {**_acceptance_json(result), "seed": args.seed,
                          "trials": args.trials if args.mode == "sample" else None}})
    return 0


def cmd_gapify(args) -> int:
    G = csp.VecCspInstance.from_json(_load_json(args.instance))
    verifier = verifier_for(G, args.verifier)
    proofs = pipeline.proofs_from_json(verifier, _load_json(args.proof)) if args.proof else None
    if args.explicit:
        gap = pipeline.pcpp_to_csp(verifier, cap=args.cap)
        report = {"stage": "gapify", "mode": "explicit", "sizes": gap.sizes,
                  "variables": gap.num_variables, "constraints": len(gap.constraints)}
        if proofs is not None:
            report["acceptance"] = _acceptance_json(csp.evaluate(gap, gap.honest_assignment(proofs)))
        if args.out:
            edges = [{"supernode": c.u, "position": c.v, "label": list(c.label)} for c in gap.constraints]
            _write_json(Path(args.out), {"variables": gap.names, "alphabets": gap.alphabets,
                                         "constraints": edges})
    else:
        gap = pipeline.VirtualGapCsp(verifier)
        samples = []
        for i in range(args.samples):
            desc, slot = gap.sample(args.seed, i)
            samples.append({"test": f"{desc.verifier}/{desc.test}", "arity": len(desc.positions()),
                            "slot": slot, "block": desc.positions()[slot][0]})
        report = {"stage": "gapify", "mode": "virtual", "sizes": gap.sizes, "samples": samples}
        if proofs is not None:
            est = gap.value_on_samples(proofs, args.trials, args.seed)
            report["acceptance"] = est.to_json()
    _emit(report)
    return 0


def cmd_attack(args) -> int:
    spec_path = Path(args.spec)
    spec = _load_json(spec_path)
    instance = spec["instance"]
    if isinstance(instance, str):
        instance = _load_json(spec_path.parent / instance)
    G = csp.VecCspInstance.from_json(instance)
    verifier = verifier_for(G, spec.get("verifier", "auto"))
    honest = build_honest_proof(verifier, spec["assignment"], require_solution=False)
    proofs = pipeline.generate_attack(spec["attack"], verifier, honest)
    args.mode = spec.get("mode", "sample")
    args.trials = int(spec.get("trials", 10_000))
    args.seed = int(spec.get("seed", 0))
    args.tests = spec.get("tests")
    args.cap = int(spec.get("cap", DEFAULT_ENUMERATION_CAP))
    result = _measure(verifier, proofs, args)
    _emit({"stage": "attack", "attack": spec["attack"], "verifier": verifier.name, "mode": args.mode,
           "acceptance": {**_acceptance_json(result), "seed": args.seed}})
    return 0


def cmd_selftest(args) -> int:
    results = selftest.run_all(args.criteria)
    for r in results:
        print(r.line(), file=sys.stderr)
    _emit({"stage": "selftest", "passed": all(r.passed for r in results),
           "criteria": [r.to_json() for r in results]})
    return 0 if all(r.passed for r in results) else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vecpcpp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    reduce = sub.add_parser("reduce", help="run a reduction")
    rsub = reduce.add_subparsers(dest="reduction", required=True)
    r = rsub.add_parser("sat2vec", help="structured 3SAT to a vector-valued CSP")
    r.add_argument("cnf")
    r.add_argument("--ell", type=int, required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("split", help="separate linear and parallel constraints")
    s.add_argument("instance")
    s.add_argument("--out")
    s.set_defaults(func=cmd_split)

    def measuring(p):
        p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)

    v = sub.add_parser("verify", help="measure verifier acceptance on a proof")
    v.add_argument("--instance", required=True)
    v.add_argument("--proof", required=True)
    v.add_argument("--verifier", choices=("auto", "linear", "parallel", "combined"), default="auto")
    v.add_argument("--tests", nargs="+")
    v.add_argument("--log", help="write one JSON line per descriptor")
    measuring(v)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gapify", help="turn a verifier into a gap CSP")
    g.add_argument("--instance", required=True)
    mode = g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--explicit", action="store_true")
    mode.add_argument("--virtual", action="store_true")
    g.add_argument("--verifier", choices=("auto", "linear", "parallel", "combined"), default="auto")
    g.add_argument("--proof", help="evaluate the assignment read off this proof")
    g.add_argument("--samples", type=int, default=8, help="sampled constraints to list (virtual)")
    g.add_argument("--out", help="write the explicit constraint graph here")
    measuring(g)
    g.set_defaults(func=cmd_gapify)

    a = sub.add_parser("attack", help="measure acceptance of a corrupted proof")
    a.add_argument("--spec", required=True)
    a.set_defaults(func=cmd_attack)

    t = sub.add_parser("selftest", help="run the acceptance criteria")
    t.add_argument("--criteria", type=int, nargs="+", choices=sorted(selftest.CRITERIA))
    t.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvariantError, NotASolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
