# suite.py
"""
The acceptance suite: every checked claim becomes one row of a pass/fail table.

Rows are plain dicts (claim, section, check, passed, trials, evidence, detail,
elapsed) so they serialize straight into the JSON report and the workbook.
A check that crashes fails its own row and never stops the others.
"""
import logging
import time
import traceback

from binary_forms import BinaryForm, binary_form_rank
from constructions import FAMILIES, HypothesisViolation, build, build_p1p1pm_graph
from exactalg import QQ, Polynomial, prime_field
from graphgadget import annihilation_report, build_gadget, check_theorem_samples, flattening_sweep
from morphism import EVIDENCE_DECODER, EVIDENCE_SAMPLED, collision_search, roundtrip_check
from sepinv import (EVIDENCE_NOTE, CyclicAction, InvariantSet, cone_projective_consistency, separates,
                    separates_over_primes, z6_example_sets)
from tensors import (MODE_MODULAR, NOT_ON_SECANT, ON_CURVE, ON_HONEST_SECANT, oracle_comparison, point_on_secant,
                     quintic_curve, secant_sweep, tangential_p2p2_secant_samples, twisted_cubic,
                     wps2233_point_outside_secant)
from utils import trial_rng

logger = logging.getLogger(__name__)

SECTIONS = ("constructions", "collision", "roundtrip", "graphgadget", "rank_oracle", "secant", "sepinv")

ACCEPTANCE_TRIALS = {
    "collision": 10 ** 4,
    "roundtrip": 10 ** 3,
    "flattening": 10 ** 4,
    "gadget": 10 ** 3,
    "rank_oracle": 10 ** 4,
    "secant": 100,
    "sepinv": 10 ** 5,
    "cone": 10 ** 3,
}

GADGET_RANGE = range(1, 11)

# (family, params, expected ambient dimension)
CONSTRUCTION_TABLE = [
    ("wps_phi1", {"weights": (1, 6, 10, 15)}, 4),
    ("wps_phik", {"weights": (1, 6, 10, 15), "k": 2}, 6),
    ("wps_phik", {"weights": (1, 2, 3), "k": 3}, 4),
    ("pn_duf", {"n": 3, "k": 2}, 4),
    ("pn_duf", {"n": 4, "k": 3}, 6),
    ("p1pn", {"n": 2, "d": 2}, 6),
    ("p1pn", {"n": 3, "d": 2}, 8),
    ("p1p1pm_graph", {"m": 1}, 6),
    ("p1p1pm_graph", {"m": 4}, 12),
    ("tangential_p1p1", {}, 3),
    ("tangential_p2p2", {}, 8),
    ("p1p1_deg_d", {"d": 3}, 4),
    ("segre_p1p1p1_projection", {}, 6),
    ("quintic_plane_curve", {}, 2),
]

COLLISION_TABLE = [(family, params) for family, params, _ in CONSTRUCTION_TABLE]

ROUNDTRIP_TABLE = (
    [("wps_phi1", {"weights": w}) for w in ((1, 6, 10, 15), (1, 2, 3), (1, 5, 5))]
    + [("wps_phik", {"weights": w, "k": k}) for w in ((1, 6, 10, 15), (1, 2, 3), (1, 5, 5)) for k in (2, 3)]
    + [("p1pn", {"n": n, "d": d}) for n in (1, 2, 3) for d in (1, 2, 3)]
    + [("p1p1_deg_d", {"d": d}) for d in (3, 4, 5)]
    + [("chow_veronese", {"m": 1, "dvec": dvec}) for dvec in ((1, 2), (1, 2, 4))]
    + [("segre_p1p1p1_projection", {})]
)


def _row(section, claim, check, passed, trials=0, evidence="", detail=None, elapsed=0.0):
    return {
        "section": section,
        "claim": claim,
        "check": check,
        "passed": bool(passed),
        "trials": trials,
        "evidence": evidence,
        "detail": detail,
        "elapsed": round(elapsed, 3),
    }


def _guarded(section, claim, check, fn):
    """Run fn() -> (passed, trials, evidence, detail); a crash fails this row only."""
    started = time.perf_counter()
    try:
        passed, trials, evidence, detail = fn()
    except Exception as exc:
        logger.error(f"Suite check '{check}' crashed: {exc}")
        logger.error(traceback.format_exc())
        passed, trials, evidence, detail = False, 0, "", {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = time.perf_counter() - started
    logger.info(f"[{'PASS' if passed else 'FAIL'}] {section}: {check}")
    return _row(section, claim, check, passed, trials, evidence, detail, elapsed)


def _label(family, params):
    if not params:
        return family
    return f"{family}(" + "; ".join(f"{k}={','.join(map(str, v)) if isinstance(v, tuple) else v}"
                                    for k, v in sorted(params.items())) + ")"


def _morphism(family, params, overrides):
    """The family member, or a loaded morphism carrying the same label."""
    m = build(family, **params)
    if m.label in overrides:
        logger.warning(f"Using the supplied morphism for {m.label}")
        return overrides[m.label]
    return m


def _witness_summary(report):
    data = report.to_json(include_timing=False)
    witnesses = (data["collisions"] + data["base_locus_hits"] + data["roundtrip_failures"]
                 + data["equivariance_failures"])
    return {"violations": report.violations, "first": witnesses[:3], "notes": data["notes"]}


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

def construction_rows(overrides):
    rows = []
    for family, params, expected in CONSTRUCTION_TABLE:
        def check(family=family, params=params, expected=expected):
            m = _morphism(family, params, overrides)
            return m.ambient_dimension == expected, 0, "exact", {
                "ambient": m.ambient_dimension, "expected": expected, "sections": len(m.sections)}
        rows.append(_guarded("constructions", FAMILIES[family].claim,
                             f"{_label(family, params)} lands in P^{expected}", check))

    def clash():
        try:
            build("chow_veronese", m=1, dvec=(1, 1))
        except HypothesisViolation as exc:
            return True, 0, "exact", {"rejected": str(exc)}
        return False, 0, "exact", {"rejected": None}
    rows.append(_guarded("constructions", FAMILIES["chow_veronese"].claim,
                         "chow_veronese(dvec=1,1) is rejected for equal subset sums", clash))
    return rows


def collision_rows(overrides, seed, trials, workers):
    rows = []
    for family, params in COLLISION_TABLE:
        def check(family=family, params=params):
            m = _morphism(family, params, overrides)
            report = collision_search(m, trials, seed, workers=workers)
            return report.clean, trials, EVIDENCE_SAMPLED, _witness_summary(report)
        rows.append(_guarded("collision", FAMILIES[family].claim,
                             f"no collisions or base-locus hits for {_label(family, params)}", check))
    return rows


def roundtrip_rows(overrides, seed, trials, workers):
    rows = []
    for family, params in ROUNDTRIP_TABLE:
        def check(family=family, params=params):
            m = _morphism(family, params, overrides)
            report = roundtrip_check(m, trials, seed, workers=workers)
            return report.clean, trials, EVIDENCE_DECODER, _witness_summary(report)
        rows.append(_guarded("roundtrip", FAMILIES[family].claim,
                             f"decoder inverts {_label(family, params)}", check))
    return rows


def graphgadget_rows(seed, flattening_trials, gadget_trials, workers):
    claim = FAMILIES["p1p1pm_graph"].claim
    rows = []
    for m in GADGET_RANGE:
        def dims(m=m):
            _, gadget = build_gadget(m)
            d1, d2, d = gadget.dims
            return d == 2 * m - 1 and gadget.is_direct(), 0, "exact", {"dim_W1": d1, "dim_W2": d2, "dim_W": d}

        def flattening(m=m):
            failures = flattening_sweep(m, flattening_trials, seed)
            return not failures, flattening_trials, EVIDENCE_SAMPLED, {"failures": failures[:3]}

        def samples(m=m):
            report = check_theorem_samples(m, gadget_trials, seed, workers=workers)
            return report.clean, gadget_trials, EVIDENCE_SAMPLED, {
                "branches": report.branches, "violations": report.violations[:3], "notes": report.notes}

        def annihilation(m=m):
            report = annihilation_report(m, build_p1p1pm_graph(m))
            return report["ok"], 0, "exact", report

        rows.append(_guarded("graphgadget", claim, f"m={m}: dim W = 2m-1 and W1 ∩ W2 = 0", dims))
        rows.append(_guarded("graphgadget", claim, f"m={m}: flattening rank matches vertex statistics", flattening))
        rows.append(_guarded("graphgadget", claim, f"m={m}: sampled secant consequences hold", samples))
        rows.append(_guarded("graphgadget", claim, f"m={m}: sections annihilate W", annihilation))
    return rows


def rank_oracle_rows(seed, trials):
    claim = "rank-at-most-two decisions for 2x2xn tensors match brute force"

    def exhaustive():
        result = oracle_comparison(1, prime_field(3), None, seed)
        return result["clean"], result["checked"], "exhaustive", result

    def sampled():
        result = oracle_comparison(2, prime_field(5), trials, seed)
        return result["clean"], result["checked"], EVIDENCE_SAMPLED, result

    return [
        _guarded("rank_oracle", claim, "every 2x2x2 tensor over F_3", exhaustive),
        _guarded("rank_oracle", claim, "sampled 2x2x3 tensors over F_5", sampled),
    ]


def _random_rational_points(count, seed, height=50):
    points = []
    for i in range(count):
        rng = trial_rng(seed, "suite-secant", i)
        p = [QQ(rng.randint(-height, height)) for _ in range(4)]
        if not any(p):
            p[0] = QQ.one
        points.append(tuple(p))
    return points


def secant_rows(seed, trials):
    rows = []

    def quintic():
        counts, results = secant_sweep(quintic_curve(), _random_rational_points(trials, seed), MODE_MODULAR)
        misses = [r.to_json() for r in results if r.verdict not in (ON_HONEST_SECANT, ON_CURVE)]
        return not misses, trials, MODE_MODULAR, {"counts": counts, "misses": misses[:3]}
    rows.append(_guarded("secant", FAMILIES["quintic_space_curve"].claim,
                         "random rational points lie on secants of the quintic", quintic))

    def twisted():
        result = point_on_secant(twisted_cubic(), (0, 1, 0, 0), MODE_MODULAR)
        rank = binary_form_rank(BinaryForm([0, 1, 0, 0]))
        return result.verdict == NOT_ON_SECANT and rank == 3, 1, MODE_MODULAR, {
            "verdict": result.to_json(), "rank_s0^2s1": rank}
    rows.append(_guarded("secant", "[0:1:0:0] is off the secant variety of the twisted cubic",
                         "twisted cubic tangent point and cubic rank", twisted))

    def wps2233():
        return wps2233_point_outside_secant(), 0, "exact", None
    rows.append(_guarded("secant", "the projection centre for P(2,2,3,3) misses the secant locus",
                         "v1 v2^2 has Waring rank 3", wps2233))

    def tangential():
        result = tangential_p2p2_secant_samples(trials, seed)
        return result["clean"], trials, EVIDENCE_SAMPLED, {"violations": result["violations"][:3]}
    rows.append(_guarded("secant", FAMILIES["tangential_p2p2"].claim,
                         "the projection centre misses sampled secants of the tangential variety", tangential))
    return rows


def sepinv_rows(seed, trials, cone_trials, workers, primes=None):
    full, small = z6_example_sets()
    rows = []
    claim = "a six-element set of invariants separates Z6 orbits on C^4"
    for name, invariants in (("six-element set E", small), ("all seven generators", full)):
        def check(invariants=invariants, name=name):
            reports = separates_over_primes(6, (2, 2, 3, 3), invariants, trials, seed, primes, workers, name)
            violations = sum(len(r.separation_violations) + len(r.invariance_violations) for r in reports)
            return violations == 0, trials * len(reports), EVIDENCE_SAMPLED, {
                "primes": [r.action["p"] for r in reports], "violations": violations, "note": EVIDENCE_NOTE}
        rows.append(_guarded("sepinv", claim, f"{name} separates over three primes", check))

    def negative_control():
        x = Polynomial.variables((2,))[0]
        action = CyclicAction(3, (1, 2))
        report = separates(action, InvariantSet([x[0] ** 3], 3, (1, 2)), 100, seed, label="x0^3")
        witness = report.separation_violations[:1]
        return bool(witness), 100, EVIDENCE_SAMPLED, {"witness": witness}
    rows.append(_guarded("sepinv", "an invariant blind to one coordinate does not separate",
                         "{x0^3} for Z3 acting with weights (1,2) is falsified", negative_control))

    cone_cases = [
        ("Veronese conic", (1, 1), 2, lambda x: [x[0] ** 2, x[0] * x[1], x[1] ** 2], (2,)),
        ("squares on P1", (1, 1), 2, lambda x: [x[0] ** 2, x[1] ** 2], (2,)),
    ]
    for name, weights, k, make, shape in cone_cases:
        def cone(weights=weights, k=k, make=make, shape=shape):
            sections = make(Polynomial.variables(shape)[0])
            report = cone_projective_consistency(weights, k, sections, cone_trials, seed)
            return report.clean, cone_trials, EVIDENCE_SAMPLED, report.to_json(include_timing=False)
        rows.append(_guarded("sepinv", "affine cone and projective verdicts agree",
                             f"cone/projective consistency: {name}", cone))

    def cone_phi1():
        m = build("wps_phi1", weights=(1, 6, 10, 15))
        report = cone_projective_consistency(None, 1, m, cone_trials, seed)
        return report.clean, cone_trials, EVIDENCE_SAMPLED, report.to_json(include_timing=False)
    rows.append(_guarded("sepinv", "affine cone and projective verdicts agree",
                         "cone/projective consistency: wps_phi1(1,6,10,15)", cone_phi1))
    return rows


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def run_suite(seed=0, only=None, trials=None, workers=1, overrides=None, include_timing=True):
    """
    Run the acceptance suite.

    Args:
        seed (int): run seed shared by every check
        only (list): section names to run (default: all)
        trials (dict): overrides for ACCEPTANCE_TRIALS entries
        workers (int): worker cap for partitioned checks
        overrides (dict): family label -> Morphism used instead of building it
        include_timing (bool): keep elapsed seconds in rows and totals

    Returns:
        dict: rows plus pass/fail totals
    """
    sections = list(only) if only else list(SECTIONS)
    unknown = [s for s in sections if s not in SECTIONS]
    if unknown:
        raise ValueError(f"unknown suite section(s) {', '.join(unknown)}; known: {', '.join(SECTIONS)}")
    counts = dict(ACCEPTANCE_TRIALS)
    counts.update(trials or {})
    overrides = overrides or {}
    logger.info(f"Acceptance suite: sections {', '.join(sections)}, seed {seed}")
    started = time.perf_counter()

    runners = {
        "constructions": lambda: construction_rows(overrides),
        "collision": lambda: collision_rows(overrides, seed, counts["collision"], workers),
        "roundtrip": lambda: roundtrip_rows(overrides, seed, counts["roundtrip"], workers),
        "graphgadget": lambda: graphgadget_rows(seed, counts["flattening"], counts["gadget"], workers),
        "rank_oracle": lambda: rank_oracle_rows(seed, counts["rank_oracle"]),
        "secant": lambda: secant_rows(seed, counts["secant"]),
        "sepinv": lambda: sepinv_rows(seed, counts["sepinv"], counts["cone"], workers),
    }
    rows = []
    for section in SECTIONS:
        if section in sections:
            rows.extend(runners[section]())

    if not include_timing:
        for r in rows:
            r.pop("elapsed", None)
    failed = [r for r in rows if not r["passed"]]
    logger.info("======== Acceptance Suite Summary ========")
    logger.info(f"Rows: {len(rows)}, passed: {len(rows) - len(failed)}, failed: {len(failed)}")
    for r in failed:
        logger.info(f"Failed: {r['section']}: {r['check']}")
    logger.info("=====================================")
    result = {
        "seed": seed,
        "sections": sections,
        "trials": counts,
        "rows": rows,
        "passed": len(rows) - len(failed),
        "failed": len(failed),
        "clean": not failed,
    }
    if include_timing:
        result["elapsed"] = round(time.perf_counter() - started, 3)
    return result
