"""Command-line entry point: ``elimvote <command> ...``.

Exit status is 0 on success, 1 when a requested manipulation is infeasible
(or a reduction check fails), and 2 on usage errors or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction

from . import reductions as red
from .experiments import ExperimentConfig, emit_outputs, run_experiment, summary_text
from .generators import GeneratorSpec, generate
from .manipulation import HEURISTICS, ManipulationInstance, minimize_manipulators, _FIT
from .oracles import brute_force_optimal_unweighted, brute_force_weighted, nanson_weighted_3cand
from .profile import ProfileError, format_ranking, parse_profile, serialize_profile
from .rules import FIXED, RULES, TieBreak, elect

OK, INFEASIBLE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_profile(path: str):
    try:
        return parse_profile(_read(path))
    except ProfileError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _candidate(profile, name):
    try:
        return profile.index(name)
    except ProfileError as exc:
        raise UsageError(str(exc)) from None


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def cmd_eval(args) -> int:
    profile = _load_profile(args.profile)
    policy = TieBreak(_candidate(profile, args.favor)) if args.favor else FIXED
    winner, trace = elect(args.rule, profile, policy)
    if args.json:
        print(trace.to_json(indent=2))
    else:
        print(profile.candidates[winner])
        print(trace.to_json())
    return OK


def _emit_result(result, args, profile):
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print("success" if result.success else "failure", result.manipulators_used)
        for b in result.ballots:
            print(format_ranking(profile.candidates, b))


def cmd_manipulate(args) -> int:
    profile = _load_profile(args.profile)
    c = _candidate(profile, args.prefer)
    inst = ManipulationInstance(args.rule, profile, c, args.k)
    if args.heuristic in _FIT and args.k is not None:
        result = _FIT[args.heuristic](inst, args.k)
    else:
        result = minimize_manipulators(inst, args.heuristic)
    _emit_result(result, args, profile)
    return OK if result.success else INFEASIBLE


def cmd_optimal(args) -> int:
    profile = _load_profile(args.profile)
    c = _candidate(profile, args.prefer)
    if args.weights:
        try:
            weights = tuple(Fraction(w) for w in args.weights.split(","))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad --weights {args.weights!r}") from None
        inst = ManipulationInstance(args.rule, profile, c, weights)
        if args.method == "nanson3":
            ok, result = nanson_weighted_3cand(inst)
        else:
            ok, result = brute_force_weighted(inst, timeout=args.timeout)
        if not ok:
            print(json.dumps({"success": False, "rule": args.rule}) if args.json else "infeasible")
            return INFEASIBLE
    else:
        if args.k_max is None:
            raise UsageError("--k-max is required for unweighted search")
        inst = ManipulationInstance(args.rule, profile, c)
        result = brute_force_optimal_unweighted(inst, args.k_max, timeout=args.timeout)
        if result is None:
            print(json.dumps({"success": False, "rule": args.rule, "k_max": args.k_max})
                  if args.json else f"no manipulation with at most {args.k_max} voters")
            return INFEASIBLE
    _emit_result(result, args, profile)
    return OK


def _load_json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg})") from None


def cmd_reduce(args) -> int:
    witness = None
    try:
        if args.kind == "x3c":
            if not args.input:
                raise UsageError("reduce x3c needs --input")
            x3c = red.X3CInstance.from_dict(_load_json(args.input))
            inst = red.x3c_to_baldwin(x3c)
            ids = red.x3c_identities(inst, x3c)
            cover = red.x3c_solve_small(x3c) if x3c.t <= args.solve_limit else None
            witness = [red.x3c_witness_vote(x3c, cover)] if cover is not None else None
        elif args.kind == "partition":
            if not args.input:
                raise UsageError("reduce partition needs --input")
            data = _load_json(args.input)
            part = red.PartitionInstance(tuple(data["values"] if isinstance(data, dict) else data))
            inst = red.partition_to_nanson(part)
            ids = red.partition_identities(inst, part)
            half = red.partition_solve(part) if len(part.values) <= args.solve_limit else None
            witness = red.partition_witness(part, half) if half is not None else None
        else:
            if args.n is None:
                raise UsageError("reduce pathology needs --n")
            inst = red.reverse_pathology_instance(args.n)
            ids = red.pathology_identities(inst, args.n)
            witness = [(6, 0, 1, 2, 3, 4, 5)] * (18 * args.n)
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad reduction input: {exc}") from None

    names = inst.base.candidates
    identities = {k: {"value": str(v), "expected": str(e), "ok": v == e} for k, (v, e) in ids.items()}
    sidecar = {
        "kind": args.kind,
        "rule": inst.rule,
        "preferred": names[inst.preferred],
        "budget": [str(w) for w in inst.budget] if inst.weighted else inst.budget,
        "identities": identities,
        "witness_available": witness is not None,
        "witness": [format_ranking(names, b) for b in witness] if witness else None,
    }
    all_ok = all(v["ok"] for v in identities.values())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize_profile(inst.base))
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2)
            fh.write("\n")
    if args.check:
        if args.json:
            print(json.dumps({"identities": identities, "all_hold": all_ok}, indent=2))
        else:
            for key, v in identities.items():
                print(f"{'ok  ' if v['ok'] else 'FAIL'} {key} = {v['value']} (expected {v['expected']})")
        return OK if all_ok else INFEASIBLE
    if not args.out:
        print(json.dumps(sidecar, indent=2) if args.json else serialize_profile(inst.base), end="" if not args.json else "\n")
    return OK


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.model, args.candidates, args.voters, _seed(args), args.urn_a)
    text = serialize_profile(generate(spec))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_experiment(args) -> int:
    kw = dict(protocol=args.protocol, model=args.model, elections=args.elections, seed=_seed(args),
              workers=args.workers, oracle_timeout=args.timeout, urn_a=args.urn_a)
    if args.rule:
        kw["rules"] = tuple(args.rule)
    if args.heuristics:
        kw["heuristics"] = tuple(args.heuristics.split(","))
    if args.sizes:
        kw["sizes"] = tuple(int(s) for s in args.sizes.split(","))
    if args.candidates:
        kw["m"] = args.candidates
    if args.voters:
        kw["n"] = args.voters
    if args.preferred is not None:
        kw["preferred"] = args.preferred if args.preferred == "random" else int(args.preferred)
    config = ExperimentConfig(**kw)
    records, summary = run_experiment(config)
    emit_outputs(records, summary, config, args.out)
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        sys.stdout.write(summary_text(summary, config.heuristics))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elimvote", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    e = sub.add_parser("eval", help="winner and elimination trace")
    e.add_argument("--rule", choices=RULES, required=True)
    e.add_argument("--profile", required=True)
    e.add_argument("--favor", help="candidate that wins all ties")
    common(e)
    e.set_defaults(fn=cmd_eval)

    m = sub.add_parser("manipulate", help="run a manipulation heuristic")
    m.add_argument("--rule", choices=RULES, required=True)
    m.add_argument("--heuristic", choices=HEURISTICS, required=True)
    m.add_argument("--profile", required=True)
    m.add_argument("--prefer", required=True)
    m.add_argument("--k", type=int, help="fixed manipulator count (default: minimise)")
    common(m)
    m.set_defaults(fn=cmd_manipulate)

    o = sub.add_parser("optimal", help="exact brute-force manipulation")
    o.add_argument("--rule", choices=RULES, required=True)
    o.add_argument("--profile", required=True)
    o.add_argument("--prefer", required=True)
    o.add_argument("--k-max", type=int)
    o.add_argument("--weights", help="comma-separated manipulator weights (weighted problem)")
    o.add_argument("--method", choices=("brute", "nanson3"), default="brute")
    o.add_argument("--timeout", type=float)
    common(o)
    o.set_defaults(fn=cmd_optimal)

    r = sub.add_parser("reduce", help="build a reduction instance")
    r.add_argument("kind", choices=("x3c", "partition", "pathology"))
    r.add_argument("--input")
    r.add_argument("--n", type=int)
    r.add_argument("--out", help="write the profile here and the sidecar to OUT.json")
    r.add_argument("--check", action="store_true", help="report the score identities")
    r.add_argument("--solve-limit", type=int, default=20)
    common(r)
    r.set_defaults(fn=cmd_reduce)

    g = sub.add_parser("generate", help="random profile")
    g.add_argument("--model", choices=("uniform", "urn"), required=True)
    g.add_argument("--candidates", type=int, required=True)
    g.add_argument("--voters", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--urn-a", type=int)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_generate)

    x = sub.add_parser("experiment", help="run an experiment protocol")
    x.add_argument("--protocol", choices=("small", "small-optimal", "scaling"), required=True)
    x.add_argument("--rule", choices=RULES, action="append")
    x.add_argument("--heuristics", help=f"comma-separated subset of {','.join(HEURISTICS)}")
    x.add_argument("--model", choices=("uniform", "urn"), default="uniform")
    x.add_argument("--elections", type=int, required=True)
    x.add_argument("--seed", type=int)
    x.add_argument("--sizes", help="comma-separated candidate counts (scaling)")
    x.add_argument("--candidates", type=int)
    x.add_argument("--voters", type=int)
    x.add_argument("--urn-a", type=int)
    x.add_argument("--preferred", help="'random' or a fixed candidate index")
    x.add_argument("--workers", type=int, default=1)
    x.add_argument("--timeout", type=float, default=60.0, help="oracle seconds per instance")
    x.add_argument("--out", required=True)
    common(x)
    x.set_defaults(fn=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else USAGE
    if not hasattr(args, "json"):
        args.json = False
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"elimvote: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        print(f"elimvote: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
