# app.py
"""
injekt command line.

    python app.py construct --family wps_phi1 --weights 1,6,10,15 --out phi1.json
    python app.py verify --morphism phi1.json --trials 10000
    python app.py suite --only graphgadget

Exit codes: 0 clean, 1 a check found a violation, 2 invalid input.
"""
import argparse
import json
import logging
import sys
import traceback

from config import REPORT_FORMATS, ConfigError, RunConfig, load_settings
from constructions import FAMILIES, build, family_table
from data_loader import (load_curve, load_invariant_set, load_json, load_morphism, load_tensor, save_morphism,
                         write_report)
from debug_logging import get_run_logger, log_report_summary
from decoders import decode
from exactalg import InjektError, QQ
from excel_generator import create_suite_workbook, create_verification_workbook
from graphgadget import annihilation_report, build_gadget, check_theorem_samples, flattening_sweep
from morphism import verify
from sepinv import (CyclicAction, cone_projective_consistency, default_primes, falsify_subsets,
                    separates_over_primes, z6_example_sets)
from suite import ACCEPTANCE_TRIALS, SECTIONS, run_suite
from tensors import (MODE_MODULAR, MODE_RATIONAL, Tensor222n, point_on_secant, quintic_curve, rank_decision,
                     twisted_cubic)
from utils import format_vector, parse_int_list, parse_scalar_list, trial_rng

logger = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
# unexpected failures share the input code; the log tells them apart
EXIT_INTERNAL = EXIT_INPUT

GADGET_CHECKS = ("dims", "flattening", "samples", "annihilation", "all")
BUILTIN_CURVES = {"quintic": quintic_curve, "twisted-cubic": twisted_cubic}
FAMILY_PARAMS = ("weights", "k", "n", "d", "m", "dvec", "dims", "degrees")
LIST_PARAMS = ("weights", "dvec", "dims", "degrees")


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _int_list(text):
    try:
        return parse_int_list(text)
    except InjektError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_family_params(parser):
    parser.add_argument("--family", choices=sorted(FAMILIES), help="construction family")
    for name in FAMILY_PARAMS:
        kind = _int_list if name in LIST_PARAMS else int
        parser.add_argument(f"--{name}", type=kind, default=None)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="run seed (default INJEKT_SEED or 0)")
    common.add_argument("--format", choices=REPORT_FORMATS, default="json", help="report format")
    common.add_argument("--report", default=None, help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp and timings")

    parser = argparse.ArgumentParser(prog="injekt", description="Explicit injective morphisms, checked exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a family member and write its JSON")
    _add_family_params(p)
    p.add_argument("--out", default=None, help="morphism JSON path")
    p.add_argument("--list", action="store_true", help="print the family table")

    p = sub.add_parser("verify", parents=[common], help="collision search and decoder round trips")
    p.add_argument("--morphism", default=None, help="morphism JSON path")
    _add_family_params(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--xlsx", default=None, help="also write a workbook")

    p = sub.add_parser("decode", parents=[common], help="decode one image point")
    p.add_argument("--morphism", required=True)
    p.add_argument("--image", required=True, help="comma-separated coordinates, e.g. 1,1,2,2,1")

    p = sub.add_parser("rank2", parents=[common], help="rank decision for a 2x2x(m+1) tensor")
    p.add_argument("--tensor", required=True, help="tensor JSON path")

    p = sub.add_parser("secant-curve", parents=[common], help="secant test for a rational space curve")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--curve", help="curve JSON path")
    group.add_argument("--builtin", choices=sorted(BUILTIN_CURVES))
    p.add_argument("--point", action="append", default=[], help="a,b,c,d (repeatable)")
    p.add_argument("--random", type=int, default=0, help="also test this many random rational points")
    p.add_argument("--height", type=int, default=50)
    p.add_argument("--mode", choices=(MODE_RATIONAL, MODE_MODULAR), default=MODE_RATIONAL)

    p = sub.add_parser("gadget", parents=[common], help="graph gadget checks")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--check", choices=GADGET_CHECKS, default="all")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--subspace", default=None, help="JSON list of tensors replacing W (negative controls)")

    p = sub.add_parser("sepinv", parents=[common], help="separating invariants over F_p")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--weights", type=_int_list, required=True)
    p.add_argument("--set", dest="invariant_set", default=None,
                   help="invariant set JSON (default: the six-element Z6 set for k=6, weights 2,2,3,3)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--primes", type=_int_list, default=None)
    p.add_argument("--falsify", type=int, default=None, metavar="SIZE", help="test every SIZE-subset")
    p.add_argument("--cone", action="store_true", help="also compare affine and projective verdicts")

    p = sub.add_parser("suite", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", nargs="+", choices=SECTIONS, default=None)
    p.add_argument("--morphism", action="append", default=[],
                   help="morphism JSON used in place of the family member with the same label")
    p.add_argument("--trials", type=int, default=None, help="cap every trial count")
    p.add_argument("--xlsx", default=None)
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _family_kwargs(args):
    return {name: getattr(args, name) for name in FAMILY_PARAMS if getattr(args, name) is not None}


def _morphism_from_args(args):
    if getattr(args, "morphism", None):
        return load_morphism(args.morphism), None
    if not args.family:
        raise InjektError("give --morphism FILE or --family with its parameters")
    return build(args.family, **_family_kwargs(args)), FAMILIES[args.family].claim


def cmd_construct(args, run):
    if args.list:
        return {"families": family_table()}, EXIT_CLEAN
    if not args.family:
        raise InjektError("construct needs --family (or --list)")
    m = build(args.family, **_family_kwargs(args))
    if args.out:
        save_morphism(m, args.out)
    logger.info(f"{m.label}: {m.source.label} -> P^{m.ambient_dimension} ({len(m.sections)} sections)")
    logger.info(f"Claim: {FAMILIES[args.family].claim}")
    report = {"claim": FAMILIES[args.family].claim, "ambient_dimension": m.ambient_dimension,
              "morphism": m.to_json()}
    return report, EXIT_CLEAN


def cmd_verify(args, run):
    m, claim = _morphism_from_args(args)
    report = verify(m, run.trials, run.seed, run.height, run.workers)
    if claim:
        report.claim = claim
    log_report_summary(logger, report)
    if args.xlsx:
        create_verification_workbook(report, args.xlsx)
    return report.to_json(include_timing=not args.no_timestamp), EXIT_CLEAN if report.clean else EXIT_VIOLATION


def cmd_decode(args, run):
    m = load_morphism(args.morphism)
    image = [m.field(x) for x in parse_scalar_list(args.image)]
    point = decode(m, image)
    logger.info(f"Decoded {format_vector(image)} to {point}")
    return {"image": args.image, "decoded": point.to_json(), "point": str(point), "decoder": m.decoder}, EXIT_CLEAN


def cmd_rank2(args, run):
    t = load_tensor(args.tensor)
    decision = rank_decision(t)
    logger.info(f"Rank decision: {decision.kind} (flattening rank {decision.flattening_rank})")
    return {"claim": "rank decision for 2x2x(m+1) tensors", "tensor": t.to_json(), **decision.to_json()}, EXIT_CLEAN


def cmd_secant_curve(args, run):
    curve = load_curve(args.curve) if args.curve else BUILTIN_CURVES[args.builtin]()
    points = [tuple(parse_scalar_list(p)) for p in args.point]
    for i in range(args.random):
        rng = trial_rng(run.seed, "secant-cli", i)
        p = [QQ(rng.randint(-args.height, args.height)) for _ in range(4)]
        if not any(p):
            p[-1] = QQ.one
        points.append(tuple(p))
    if not points:
        raise InjektError("give at least one --point or --random N")
    results = []
    for p in points:
        result = point_on_secant(curve, p, args.mode)
        logger.info(f"{format_vector(p)}: {result.verdict}")
        results.append({"point": [str(x) for x in p], **result.to_json()})
    counts = {}
    for r in results:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    return {"claim": "points on secant lines of a rational space curve", "curve": curve.to_json(),
            "mode": args.mode, "counts": dict(sorted(counts.items())), "results": results}, EXIT_CLEAN


def cmd_gadget(args, run):
    m = args.m
    checks = GADGET_CHECKS[:-1] if args.check == "all" else (args.check,)
    report = {"m": m, "claim": FAMILIES["p1p1pm_graph"].claim, "checks": {}}
    clean = True
    if "dims" in checks:
        _, gadget = build_gadget(m)
        d1, d2, d = gadget.dims
        ok = d == 2 * m - 1 and gadget.is_direct()
        report["checks"]["dims"] = {"dim_W1": d1, "dim_W2": d2, "dim_W": d, "ok": ok}
        clean &= ok
    if "flattening" in checks:
        failures = flattening_sweep(m, run.trials, run.seed)
        report["checks"]["flattening"] = {"trials": run.trials, "failures": failures, "ok": not failures}
        clean &= not failures
    if "samples" in checks:
        subspace = None
        if args.subspace:
            subspace = [Tensor222n.from_json(t) for t in load_json(args.subspace)]
        samples = check_theorem_samples(m, run.trials, run.seed, subspace, workers=run.workers)
        log_report_summary(logger, samples)
        report["checks"]["samples"] = samples.to_json(include_timing=not args.no_timestamp)
        clean &= samples.clean
    if "annihilation" in checks:
        annihilation = annihilation_report(m)
        report["checks"]["annihilation"] = annihilation
        clean &= annihilation["ok"]
    report["clean"] = bool(clean)
    return report, EXIT_CLEAN if clean else EXIT_VIOLATION


def cmd_sepinv(args, run):
    weights = tuple(args.weights)
    if args.invariant_set:
        invariants = load_invariant_set(args.invariant_set, args.k, weights)
    elif args.k == 6 and weights == (2, 2, 3, 3):
        invariants = z6_example_sets()[1]
    else:
        raise InjektError("--set is required unless --k 6 --weights 2,2,3,3")
    primes = list(run.primes) if run.primes else default_primes(args.k)
    reports = separates_over_primes(args.k, weights, invariants, run.trials, run.seed, primes, run.workers,
                                    label=",".join(invariants.names))
    for r in reports:
        log_report_summary(logger, r)
    timing = not args.no_timestamp
    report = {
        "claim": "the invariant set separates orbits of the cyclic action",
        "invariants": invariants.to_json(),
        "primes": primes,
        "separation": [r.to_json(include_timing=timing) for r in reports],
    }
    clean = all(r.clean for r in reports)
    if args.falsify is not None:
        report["falsification"] = falsify_subsets(CyclicAction(args.k, weights, primes[0]), invariants,
                                                  args.falsify, run.trials, run.seed)
    if args.cone:
        cone = cone_projective_consistency(weights, None, list(invariants.polys), run.trials, run.seed,
                                           primes=primes)
        report["cone_consistency"] = cone.to_json(include_timing=timing)
        clean &= cone.clean
    report["clean"] = bool(clean)
    return report, EXIT_CLEAN if clean else EXIT_VIOLATION


def cmd_suite(args, run):
    overrides = {}
    for path in args.morphism:
        m = load_morphism(path)
        overrides[m.label] = m
    trials = None
    if args.trials is not None:
        trials = {key: min(value, args.trials) for key, value in ACCEPTANCE_TRIALS.items()}
    result = run_suite(run.seed, args.only, trials, run.workers, overrides, include_timing=not args.no_timestamp)
    if args.xlsx:
        create_suite_workbook(result["rows"], args.xlsx)
    return result, EXIT_CLEAN if result["clean"] else EXIT_VIOLATION


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "decode": cmd_decode,
    "rank2": cmd_rank2,
    "secant-curve": cmd_secant_curve,
    "gadget": cmd_gadget,
    "sepinv": cmd_sepinv,
    "suite": cmd_suite,
}


def main(argv=None):
    """Parse, run one subcommand, write its report; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    get_run_logger(log_dir=settings.log_dir, level=settings.log_level)

    try:
        run = RunConfig.from_args(args, settings)
        report, code = COMMANDS[args.command](args, run)
    except (InjektError, OSError, json.JSONDecodeError) as exc:
        logger.error(f"{args.command}: {exc}")
        return EXIT_INPUT
    except Exception as exc:
        logger.error(f"{args.command}: internal error: {exc}")
        logger.error(traceback.format_exc())
        print(f"{args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    report["run"] = run.to_json()
    text = write_report(report, args.report, run.report_format, include_timestamp=not args.no_timestamp)
    if not args.report:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
