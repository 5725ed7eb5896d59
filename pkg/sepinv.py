# sepinv.py
"""
Separating invariants for diagonal cyclic actions, checked over prime fields.

Everything runs over F_p with p ≡ 1 (mod k) so the k-th roots of unity are in
the field and orbits can be enumerated. A clean report is evidence for
separation over C on F_p-points, not a proof; a violation is an exact witness.
"""
import logging
import time
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd, lcm

from binary_forms import BinaryForm, binary_rational_roots, interpolate
from exactalg import InjektError, Polynomial, ShapeMismatch, multidegree, prime_field, primes_above, scalar_to_json
from morphism import Morphism
from spaces import ProjectivePoint, SpaceDescriptor, equivalent_points, proportional, rescale
from utils import run_partitioned, trial_rng

logger = logging.getLogger(__name__)

PRIME_FLOOR = 10 ** 6
DEFAULT_PRIME_COUNT = 3

SEPARATION_STRATEGIES = ("random", "near-collision", "orbit-twin")
CONE_STRATEGIES = ("random", "sign-flip", "rescaled", "orbit-twin")

EVIDENCE_NOTE = "separation checked on F_p-points only; a clean run is evidence, not a proof"


class InvariantViolation(InjektError):
    def __init__(self, message, index=None, term=None):
        super().__init__(message)
        self.index = index
        self.term = term


def default_primes(k, count=DEFAULT_PRIME_COUNT):
    """The smallest primes above 10^6 congruent to 1 mod k."""
    return primes_above(PRIME_FLOOR, count, modulus=k, residue=1)


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

class CyclicAction:
    """Z_k acting on F_p^(n+1) by ξ·x = (ξ^q0 x0, ..., ξ^qn xn) through a fixed primitive root ζ."""

    def __init__(self, k, weights, p=None, zeta=None):
        k = int(k)
        if k < 1:
            raise InjektError(f"group order must be positive, got {k}")
        self.k = k
        self.weights = tuple(int(q) for q in weights)
        if not self.weights:
            raise ShapeMismatch("an action needs at least one weight")
        p = int(p) if p is not None else default_primes(k, 1)[0]
        if (p - 1) % k:
            raise InjektError(f"p = {p} is not 1 mod {k}")
        self.field = prime_field(p)
        self.p = p
        self.zeta = self.field(zeta) if zeta is not None else self.field.primitive_root_of_unity(k)
        if any(self.zeta ** (k // r) == 1 for r in range(2, k + 1) if k % r == 0) or self.zeta ** k != 1:
            raise InjektError(f"{self.zeta} does not have exact order {k} in F_{p}")
        self._powers = [[self.zeta ** (j * q) for q in self.weights] for j in range(k)]

    @property
    def nvars(self):
        return len(self.weights)

    def act(self, j, v):
        scale = self._powers[j % self.k]
        return tuple(s * self.field(x) for s, x in zip(scale, v))

    def orbit(self, v):
        return [self.act(j, v) for j in range(self.k)]

    def random_vector(self, rng, nonzero=True):
        while True:
            v = tuple(self.field.random_element(rng) for _ in self.weights)
            if any(v) or not nonzero:
                return v

    def to_json(self):
        return {"k": self.k, "weights": list(self.weights), "p": self.p, "zeta": scalar_to_json(self.zeta)}


def same_orbit(action, v, w):
    w = tuple(action.field(x) for x in w)
    return any(action.act(j, v) == w for j in range(action.k))


# ---------------------------------------------------------------------------
# Invariant sets
# ---------------------------------------------------------------------------

class InvariantSet:
    """
    Polynomials in x0..xn whose every term has Σ q_i e_i ≡ 0 (mod k).

    Coefficients are kept as given (usually over QQ) and reduced to each
    action's prime on demand.
    """

    def __init__(self, polys, k, weights, names=None):
        self.polys = tuple(polys)
        self.k = int(k)
        self.weights = tuple(int(q) for q in weights)
        self.names = tuple(names) if names else tuple(f"f{i}" for i in range(len(self.polys)))
        self._reduced = {}
        for idx, f in enumerate(self.polys):
            if f.shape != (len(self.weights),):
                raise ShapeMismatch(f"{self.names[idx]} has shape {f.shape}, expected ({len(self.weights)},)")
            for exps in f.terms:
                total = sum(q * e for q, e in zip(self.weights, exps[0]))
                if total % self.k:
                    raise InvariantViolation(
                        f"{self.names[idx]}: term {exps[0]} has weight {total}, not divisible by {self.k}",
                        index=idx, term=exps[0],
                    )

    def __len__(self):
        return len(self.polys)

    def subset(self, indices):
        return InvariantSet([self.polys[i] for i in indices], self.k, self.weights, [self.names[i] for i in indices])

    def over(self, action):
        if action.k != self.k or action.weights != self.weights:
            raise InjektError("invariant set and action disagree on the group")
        if action.p not in self._reduced:
            self._reduced[action.p] = [f.map_coefficients(action.field) for f in self.polys]
        return self._reduced[action.p]

    def values(self, action, v):
        return tuple(f.evaluate((tuple(v),)) for f in self.over(action))

    def to_json(self):
        return {"k": self.k, "weights": list(self.weights), "names": list(self.names),
                "polynomials": [f.to_json() for f in self.polys]}


def z6_example_sets():
    """
    Z6 acting by diag(ξ², ξ², ξ³, ξ³): the seven generating invariants
    f_i = x0^i x1^(3-i), g_j = x2^j x3^(2-j) and the six-element set
    {f0, f1, f2 + f3, g0, g1, g2}.
    """
    shape = (4,)
    x = Polynomial.variables(shape)[0]
    f = [x[0] ** i * x[1] ** (3 - i) for i in range(4)]
    g = [x[2] ** j * x[3] ** (2 - j) for j in range(3)]
    weights = (2, 2, 3, 3)
    full = InvariantSet(f + g, 6, weights, ["f0", "f1", "f2", "f3", "g0", "g1", "g2"])
    small = InvariantSet([f[0], f[1], f[2] + f[3], g[0], g[1], g[2]], 6, weights,
                         ["f0", "f1", "f2+f3", "g0", "g1", "g2"])
    return full, small


# ---------------------------------------------------------------------------
# Separation checks
# ---------------------------------------------------------------------------

@dataclass
class SeparationReport:
    label: str = ""
    action: dict = field(default_factory=dict)
    trials: int = 0
    seed: int = 0
    strategies: dict = field(default_factory=dict)
    separation_violations: list = field(default_factory=list)
    invariance_violations: list = field(default_factory=list)
    notes: list = field(default_factory=lambda: [EVIDENCE_NOTE])
    elapsed: float = 0.0

    @property
    def clean(self):
        return not self.separation_violations and not self.invariance_violations

    def merge(self, other):
        strategies = dict(self.strategies)
        for k, v in other.strategies.items():
            strategies[k] = strategies.get(k, 0) + v
        return SeparationReport(
            label=self.label or other.label,
            action=self.action or other.action,
            trials=self.trials + other.trials,
            seed=self.seed,
            strategies=dict(sorted(strategies.items())),
            separation_violations=sorted(self.separation_violations + other.separation_violations,
                                         key=lambda w: w["trial"]),
            invariance_violations=sorted(self.invariance_violations + other.invariance_violations,
                                         key=lambda w: w["trial"]),
            notes=list(self.notes) + [n for n in other.notes if n not in self.notes],
            elapsed=self.elapsed + other.elapsed,
        )

    def to_json(self, include_timing=True):
        data = {
            "label": self.label,
            "action": self.action,
            "trials": self.trials,
            "seed": self.seed,
            "strategies": self.strategies,
            "separation_violations": self.separation_violations,
            "invariance_violations": self.invariance_violations,
            "notes": self.notes,
            "clean": self.clean,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


def _vec_json(v):
    return [scalar_to_json(x) for x in v]


def _univariate_roots(coeffs, fld):
    """Roots in F_p of Σ coeffs[i] x^i, for a polynomial that is not identically zero."""
    form = BinaryForm(coeffs, fld)
    return [b / a for (a, b), _ in binary_rational_roots(form).roots if a]


def near_collision_partner(action, invariants, v, rng):
    """
    Resample one coordinate of v, then re-solve the first invariant that
    involves it so that invariant takes the same value at both points.
    """
    fld = action.field
    c = rng.randrange(action.nvars)
    w = list(v)
    w[c] = fld.random_element(rng)
    polys = invariants.over(action)
    target = next((f for f in polys if any(exps[0][c] for exps in f.terms)), None)
    if target is None:
        return tuple(w)
    degree = max(exps[0][c] for exps in target.terms)
    if degree >= action.p:
        return tuple(w)
    goal = target.evaluate((tuple(v),))
    xs, ys = [], []
    for x in range(degree + 1):
        w[c] = fld(x)
        xs.append(fld(x))
        ys.append(target.evaluate((tuple(w),)) - goal)
    coeffs = list(interpolate(xs, ys, fld))
    coeffs += [fld.zero] * (degree + 1 - len(coeffs))
    if not any(coeffs):
        w[c] = fld.random_element(rng)
        return tuple(w)
    roots = _univariate_roots(coeffs, fld)
    w[c] = rng.choice(roots) if roots else fld.random_element(rng)
    return tuple(w)


def _sample_separation_pair(action, invariants, strategy, rng):
    v = action.random_vector(rng)
    if strategy == "random":
        return v, action.random_vector(rng)
    if strategy == "near-collision":
        return v, near_collision_partner(action, invariants, v, rng)
    if strategy == "orbit-twin":
        return v, action.act(rng.randrange(action.k), v)
    raise InjektError(f"unknown separation strategy {strategy!r}")


def separates(action, invariants, trials, seed=0, workers=1, label=""):
    """
    Look for pairs the invariants fail to tell apart, and for in-orbit pairs
    they do tell apart.

    Strategies cycle by trial: uniform random pairs, near-collision pairs built
    by solving for one coordinate, and orbit twins v, ζ^j·v.

    Returns:
        SeparationReport: witnesses of separation and invariance violations
    """
    if trials < 1:
        raise InjektError("separates needs at least one trial")
    invariants.over(action)
    logger.info(f"Separation check{' ' + label if label else ''} over F_{action.p}: {trials} trials, seed {seed}")
    started = time.perf_counter()

    def chunk(start, stop):
        report = SeparationReport(label=label, action=action.to_json(), seed=seed)
        for i in range(start, stop):
            rng = trial_rng(seed, f"sepinv-{action.p}", i)
            strategy = SEPARATION_STRATEGIES[i % len(SEPARATION_STRATEGIES)]
            report.strategies[strategy] = report.strategies.get(strategy, 0) + 1
            v, w = _sample_separation_pair(action, invariants, strategy, rng)
            equal = invariants.values(action, v) == invariants.values(action, w)
            orbit = same_orbit(action, v, w)
            if equal and not orbit:
                report.separation_violations.append(
                    {"trial": i, "strategy": strategy, "v": _vec_json(v), "w": _vec_json(w)})
            elif orbit and not equal:
                report.invariance_violations.append(
                    {"trial": i, "strategy": strategy, "v": _vec_json(v), "w": _vec_json(w)})
        report.trials = stop - start
        return report

    report = SeparationReport(label=label, action=action.to_json(), seed=seed)
    for part in run_partitioned(chunk, trials, workers):
        report = report.merge(part)
    report.elapsed = time.perf_counter() - started
    if report.invariance_violations:
        logger.error(f"{len(report.invariance_violations)} invariance violations: the set is not invariant")
    logger.info(f"Separation check finished: {len(report.separation_violations)} separation violations")
    return report


def separates_over_primes(k, weights, invariants, trials, seed=0, primes=None, workers=1, label=""):
    """separates once per prime; results should agree across primes."""
    primes = primes or default_primes(k)
    return [separates(CyclicAction(k, weights, p), invariants, trials, seed, workers, label) for p in primes]


def falsify_subsets(action, invariants, size, trials, seed=0):
    """
    Run separates on every `size`-element subset.

    Returns:
        dict: falsified subsets with one witness each, and the survivors
        (which are not certified)
    """
    if not 1 <= size <= len(invariants):
        raise InjektError(f"subset size {size} outside 1..{len(invariants)}")
    falsified, survived = [], []
    for indices in combinations(range(len(invariants)), size):
        sub = invariants.subset(indices)
        report = separates(action, sub, trials, seed, label=",".join(sub.names))
        if report.separation_violations:
            falsified.append({"subset": list(sub.names), "witness": report.separation_violations[0]})
        else:
            survived.append(list(sub.names))
    logger.info(f"Subsets of size {size}: {len(falsified)} falsified, {len(survived)} survived")
    return {"size": size, "prime": action.p, "falsified": falsified, "survived": survived,
            "note": "surviving subsets are not certified to separate"}


# ---------------------------------------------------------------------------
# Affine cones versus weighted projective points
# ---------------------------------------------------------------------------

def baby_steps(generator, fld):
    """Lookup table for discrete logs to `generator`: (step size, value -> exponent)."""
    m = int((fld.p - 1) ** 0.5) + 1
    table = {}
    e = fld.one
    for j in range(m):
        table.setdefault(e.value, j)
        e = e * generator
    return m, table


def _discrete_log(target, generator, fld, steps=None):
    """Baby-step giant-step for generator^x = target in F_p^*."""
    m, table = steps or baby_steps(generator, fld)
    factor = generator ** (-m)
    gamma = fld(target)
    for i in range(m):
        if gamma.value in table:
            return i * m + table[gamma.value]
        gamma = gamma * factor
    raise InjektError(f"{target} is not a power of {generator} in F_{fld.p}")


def nth_root(value, e, fld, generator=None, steps=None):
    """Some t in F_p with t^e = value, or None when value is not an e-th power."""
    value = fld(value)
    if not value:
        return fld.zero
    g = generator or fld.primitive_root_of_unity(fld.p - 1)
    x = _discrete_log(value, g, fld, steps)
    step = gcd(e, fld.p - 1)
    if x % step:
        return None
    # e·y ≡ x (mod p-1) is solvable since gcd(e, p-1) | x
    n = fld.p - 1
    y = (x // step) * pow(e // step, -1, n // step) % (n // step)
    return g ** y


@dataclass
class ConsistencyReport:
    weights: tuple
    degree: int
    trials: int = 0
    seed: int = 0
    primes: list = field(default_factory=list)
    projective_collisions: int = 0
    affine_violations: int = 0
    unliftable: int = 0
    base_locus: int = 0
    discrepancies: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def clean(self):
        return not self.discrepancies

    def to_json(self, include_timing=True):
        data = {
            "weights": list(self.weights),
            "degree": self.degree,
            "trials": self.trials,
            "seed": self.seed,
            "primes": self.primes,
            "projective_collisions": self.projective_collisions,
            "affine_violations": self.affine_violations,
            "unliftable": self.unliftable,
            "base_locus": self.base_locus,
            "discrepancies": self.discrepancies,
            "witnesses": self.witnesses,
            "clean": self.clean,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


def _sections_and_weights(weights, sections):
    if isinstance(sections, Morphism):
        if sections.source.kind != "weighted":
            raise InjektError("cone consistency needs a weighted source")
        return tuple(sections.source.weights), list(sections.sections)
    if weights is None:
        raise InjektError("weights are required when sections are given as polynomials")
    return tuple(int(q) for q in weights), list(sections)


def _cone_pair(action, strategy, rng):
    v = action.random_vector(rng)
    fld = action.field
    if strategy == "random":
        return v, action.random_vector(rng)
    if strategy == "sign-flip":
        idx = [i for i, x in enumerate(v) if x]
        w = list(v)
        i = rng.choice(idx)
        w[i] = -w[i]
        return v, tuple(w)
    if strategy == "rescaled":
        t = fld.random_element(rng) or fld.one
        return v, tuple(t ** q * x for q, x in zip(action.weights, v))
    if strategy == "orbit-twin":
        return v, action.act(rng.randrange(action.k), v)
    raise InjektError(f"unknown cone strategy {strategy!r}")


def cone_projective_consistency(weights, k, sections, trials, seed=0, primes=None):
    """
    Compare the projective morphism on P(weights) with the affine cone map
    v ↦ (f(v)) modulo the group of e-th roots of unity, e the weighted degree.

    A projective collision f(w) = λ f(v) with λ = t^e lifts to the affine pair
    (t·v, w); the two verdicts must agree on every liftable pair, and an
    affine violation must always be a projective collision.

    Args:
        weights (tuple): source weights (taken from the morphism when one is given)
        k (int): multiplier with e = k·lcm(weights); None skips that check
        sections: a Morphism on a weighted space or a list of Polynomials

    Returns:
        ConsistencyReport: counts on both sides, discrepancies and witnesses
    """
    weights, polys = _sections_and_weights(weights, sections)
    degrees = {multidegree(f, SpaceDescriptor.weighted(*weights)) for f in polys}
    if len(degrees) != 1:
        raise InjektError(f"sections have weighted degrees {sorted(degrees)}")
    e = degrees.pop()
    if k is not None and e != int(k) * lcm(*weights):
        raise InjektError(f"sections have degree {e}, expected {k} * lcm{weights} = {int(k) * lcm(*weights)}")
    space = SpaceDescriptor.weighted(*weights)
    invariants = InvariantSet(polys, e, weights)
    primes = primes or default_primes(e)
    report = ConsistencyReport(weights=weights, degree=e, trials=trials, seed=seed, primes=list(primes))
    logger.info(f"Cone/projective consistency on P{weights}, degree {e}: {trials} trials over {len(primes)} primes")
    started = time.perf_counter()
    for p in primes:
        action = CyclicAction(e, weights, p)
        fld = action.field
        generator = fld.primitive_root_of_unity(p - 1)
        steps = baby_steps(generator, fld)
        for i in range(trials):
            rng = trial_rng(seed, f"cone-{p}", i)
            strategy = CONE_STRATEGIES[i % len(CONE_STRATEGIES)]
            v, w = _cone_pair(action, strategy, rng)
            fv, fw = invariants.values(action, v), invariants.values(action, w)
            if not any(fv) or not any(fw):
                report.base_locus += 1
                continue
            x, y = ProjectivePoint((v,)), ProjectivePoint((w,))
            projective = proportional(fv, fw) and not equivalent_points(space, x, y)
            affine_raw = fv == fw and not same_orbit(action, v, w)
            report.projective_collisions += projective
            report.affine_violations += affine_raw
            witness = {"prime": p, "trial": i, "strategy": strategy, "v": _vec_json(v), "w": _vec_json(w)}
            if affine_raw and not projective:
                report.discrepancies.append({**witness, "kind": "affine violation without projective collision"})
                continue
            if proportional(fv, fw):
                j = next(idx for idx, val in enumerate(fv) if val)
                t = nth_root(fw[j] / fv[j], e, fld, generator, steps)
                if t is None:
                    report.unliftable += 1
                    continue
                lifted = rescale(space, x, t).blocks[0]
                affine = invariants.values(action, lifted) == fw and not same_orbit(action, lifted, w)
                if affine != projective:
                    report.discrepancies.append({**witness, "kind": "lifted verdicts differ"})
                elif projective and len(report.witnesses) < 10:
                    report.witnesses.append(witness)
    report.elapsed = time.perf_counter() - started
    logger.info(f"Cone/projective consistency finished: {report.projective_collisions} projective collisions, "
                f"{len(report.discrepancies)} discrepancies")
    return report
