# morphism.py
"""
Morphisms to projective space given by sections of one multidegree.

Verification is sampling based: `collision_search` looks for two inequivalent
source points with proportional images, `roundtrip_check` pushes samples
through the morphism's decoder. Neither proves injectivity; the report labels
its evidence level.
"""
import logging
import time
from dataclasses import dataclass, field

from decoders import resolve_decoder
from exactalg import FieldMismatch, InjektError, NotHomogeneous, Polynomial, ShapeMismatch
from exactalg import multidegree as section_multidegree
from spaces import (
    DEFAULT_HEIGHT,
    ProjectivePoint,
    SpaceDescriptor,
    canonical_block,
    default_strata,
    equivalent_points,
    proportional,
    random_scalar,
    rescale,
    sample_point,
)
from utils import run_partitioned, trial_rng

logger = logging.getLogger(__name__)

EVIDENCE_DECODER = "decoder-certified"
EVIDENCE_SAMPLED = "sampled"

PAIR_STRATEGIES = ("unconstrained", "same-stratum", "cross-strata", "sign-flip", "small-grid", "rescaled")


class BaseLocusHit(InjektError):
    def __init__(self, point):
        super().__init__(f"all sections vanish at {point}")
        self.point = point


def _normalize_degree(value):
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return int(value)


@dataclass(frozen=True)
class Morphism:
    """
    A source space with a nonempty list of sections of a common multidegree.

    The multidegree is a tuple for product sources and an int (the weighted
    degree) for weighted ones. It is computed from the sections and, when given,
    must agree with them.
    """

    source: SpaceDescriptor
    sections: tuple
    label: str = ""
    decoder: str = None
    multidegree: object = None

    def __post_init__(self):
        sections = tuple(self.sections)
        if not sections:
            raise InjektError("a morphism needs at least one section")
        fields = {s.field for s in sections}
        if len(fields) > 1:
            raise FieldMismatch(f"sections over several fields: {sorted(map(str, fields))}")
        degree, first = None, None
        for index, s in enumerate(sections):
            if s.shape != self.source.shape:
                raise ShapeMismatch(f"section {index} has block shape {s.shape}, source is {self.source.shape}")
            if s.is_zero():
                raise InjektError(f"section {index} is zero")
            d = section_multidegree(s, self.source)
            if degree is None:
                degree, first = d, s
            elif d != degree:
                raise NotHomogeneous(
                    f"section {index} has degree {d}, section 0 has degree {degree}",
                    terms=(next(iter(first.terms)), next(iter(s.terms))),
                )
        if self.multidegree is not None and _normalize_degree(self.multidegree) != degree:
            raise NotHomogeneous(f"declared multidegree {self.multidegree} but sections have degree {degree}")
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "multidegree", degree)

    @property
    def field(self):
        return self.sections[0].field

    @property
    def ambient_dimension(self):
        return len(self.sections) - 1

    def within_dimension_bound(self):
        """Target dimension at most 2·dim(source) + 1."""
        return self.ambient_dimension <= 2 * self.source.dimension + 1

    def evaluate(self, x):
        return evaluate(self, x)

    def to_json(self):
        degree = list(self.multidegree) if isinstance(self.multidegree, tuple) else self.multidegree
        return {
            "source": self.source.to_json(),
            "multidegree": degree,
            "sections": [s.to_json() for s in self.sections],
            "label": self.label,
            "decoder": self.decoder,
        }

    @classmethod
    def from_json(cls, data):
        try:
            source = SpaceDescriptor.from_json(data["source"])
            sections = [Polynomial.from_json(s) for s in data["sections"]]
            return cls(
                source=source,
                sections=tuple(sections),
                label=data.get("label", ""),
                decoder=data.get("decoder"),
                multidegree=data.get("multidegree"),
            )
        except (KeyError, TypeError) as exc:
            raise InjektError(f"malformed morphism JSON: {exc}") from exc


def evaluate(m, x):
    """Image of x as a point of P^s; raises BaseLocusHit when every section vanishes."""
    x.check(m.source)
    values = tuple(s.evaluate(x.blocks) for s in m.sections)
    if not any(values):
        raise BaseLocusHit(x)
    return ProjectivePoint((values,))


def image_key(image):
    return canonical_block(image.blocks[0])


def same_image(a, b):
    return proportional(a.blocks[0], b.blocks[0])


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _witness_key(w):
    return (w.get("trial", -1), w.get("other_trial", -1), w.get("strategy", ""), str(w.get("x")))


@dataclass
class VerificationReport:
    label: str = ""
    trials: int = 0
    strata: tuple = ()
    collisions: list = field(default_factory=list)
    base_locus_hits: list = field(default_factory=list)
    roundtrip_failures: list = field(default_factory=list)
    equivariance_failures: list = field(default_factory=list)
    seed: int = 0
    elapsed: float = 0.0
    evidence: str = EVIDENCE_SAMPLED
    notes: list = field(default_factory=list)
    claim: str = ""

    @property
    def violations(self):
        return (len(self.collisions) + len(self.base_locus_hits) + len(self.roundtrip_failures)
                + len(self.equivariance_failures))

    @property
    def clean(self):
        return self.violations == 0

    def merge(self, other):
        """Combine two partial reports; witness order depends only on trial numbers."""
        notes = list(self.notes) + [n for n in other.notes if n not in self.notes]
        return VerificationReport(
            label=self.label or other.label,
            trials=self.trials + other.trials,
            strata=tuple(sorted(set(self.strata) | set(other.strata))),
            collisions=sorted(self.collisions + other.collisions, key=_witness_key),
            base_locus_hits=sorted(self.base_locus_hits + other.base_locus_hits, key=_witness_key),
            roundtrip_failures=sorted(self.roundtrip_failures + other.roundtrip_failures, key=_witness_key),
            equivariance_failures=sorted(self.equivariance_failures + other.equivariance_failures, key=_witness_key),
            seed=self.seed,
            elapsed=self.elapsed + other.elapsed,
            evidence=self.evidence if self.evidence == other.evidence else EVIDENCE_SAMPLED,
            notes=notes,
            claim=self.claim or other.claim,
        )

    def to_json(self, include_timing=True):
        data = {
            "label": self.label,
            "claim": self.claim,
            "trials": self.trials,
            "strata": list(self.strata),
            "collisions": self.collisions,
            "base_locus_hits": self.base_locus_hits,
            "roundtrip_failures": self.roundtrip_failures,
            "equivariance_failures": self.equivariance_failures,
            "seed": self.seed,
            "evidence": self.evidence,
            "notes": self.notes,
            "clean": self.clean,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


def _witness(trial, strategy, x, y=None, image=None, **extra):
    w = {"trial": trial, "strategy": strategy, "x": x.to_json()}
    if y is not None:
        w["y"] = y.to_json()
    if image is not None:
        w["image"] = image.to_json()[0]
    w.update(extra)
    return w


def _hash_pass(m, seen, report):
    """Report every pair of sampled points with equal images but inequivalent sources."""
    buckets = {}
    for trial, key, point in sorted(seen, key=lambda item: item[0]):
        reps = buckets.setdefault(key, [])
        if any(equivalent_points(m.source, rep, point) for _, rep in reps):
            continue
        for rep_trial, rep in reps:
            if rep_trial != trial:
                report.collisions.append(
                    {"trial": trial, "other_trial": rep_trial, "strategy": "image-hash",
                     "x": rep.to_json(), "y": point.to_json()}
                )
                break
        reps.append((trial, point))


# ---------------------------------------------------------------------------
# Collision search
# ---------------------------------------------------------------------------

def _random_scalars(m, rng, height):
    if m.source.kind == "product":
        return [random_scalar(rng, height, m.field, nonzero=True) for _ in m.source.dims]
    return random_scalar(rng, height, m.field, nonzero=True)


def _sign_flip(point, rng):
    coords = [(b, i) for b, block in enumerate(point.blocks) for i, c in enumerate(block) if c]
    b, i = rng.choice(coords)
    blocks = [list(block) for block in point.blocks]
    blocks[b][i] = -blocks[b][i]
    return ProjectivePoint(tuple(tuple(block) for block in blocks))


def sample_pair(m, strategy, rng, height, strata):
    """Two source points chosen by one of the pair strategies, with their stratum names."""
    space, fld = m.source, m.field
    if strategy == "unconstrained":
        return sample_point(space, height, None, rng, fld), sample_point(space, height, None, rng, fld), ("generic", "generic")
    if strategy == "same-stratum":
        s = rng.choice(strata)
        return sample_point(space, height, s.mask, rng, fld), sample_point(space, height, s.mask, rng, fld), (s.name, s.name)
    if strategy == "cross-strata":
        s, t = rng.sample(strata, 2)
        return sample_point(space, height, s.mask, rng, fld), sample_point(space, height, t.mask, rng, fld), (s.name, t.name)
    if strategy == "sign-flip":
        s = rng.choice(strata)
        x = sample_point(space, height, s.mask, rng, fld)
        return x, _sign_flip(x, rng), (s.name, s.name)
    if strategy == "small-grid":
        s, t = rng.choice(strata), rng.choice(strata)
        return sample_point(space, 2, s.mask, rng, fld), sample_point(space, 2, t.mask, rng, fld), (s.name, t.name)
    if strategy == "rescaled":
        s = rng.choice(strata)
        x = sample_point(space, height, s.mask, rng, fld)
        return x, rescale(space, x, _random_scalars(m, rng, height)), (s.name, s.name)
    raise InjektError(f"unknown pair strategy {strategy!r}")


def check_pair(m, x, y, trial=0, strategy="explicit", report=None):
    """Compare one pair; findings are appended to `report` (a fresh one when omitted)."""
    report = report or VerificationReport(label=m.label)
    images = []
    for p in (x, y):
        try:
            images.append(evaluate(m, p))
        except BaseLocusHit:
            report.base_locus_hits.append(_witness(trial, strategy, p))
            images.append(None)
    ix, iy = images
    if ix is not None and iy is not None:
        equal_images = same_image(ix, iy)
        if strategy == "rescaled":
            if not equal_images:
                report.equivariance_failures.append(_witness(trial, strategy, x, y, ix))
        elif equal_images and not equivalent_points(m.source, x, y):
            report.collisions.append(_witness(trial, strategy, x, y, ix))
    return report, images


def collision_search(m, trials, seed=0, height=DEFAULT_HEIGHT, workers=1, strata=None):
    """
    Sample pairs of source points and record inequivalent pairs with equal images.

    Pair strategies cycle by trial number: unconstrained, same stratum, two
    different strata, sign-flipped twins, height-2 grid points, and rescaled
    copies (which check multihomogeneity instead). Every sampled image is also
    hashed so collisions between different trials are found too.
    """
    if trials < 1:
        raise InjektError("collision_search needs at least one trial")
    strata = strata or default_strata(m.source)
    logger.info(f"Collision search on {m.label or m.source.label}: {trials} trials, seed {seed}")
    started = time.perf_counter()

    def chunk(start, stop):
        report = VerificationReport(label=m.label, seed=seed)
        seen, names = [], set()
        for i in range(start, stop):
            rng = trial_rng(seed, "collision", i)
            strategy = PAIR_STRATEGIES[i % len(PAIR_STRATEGIES)]
            x, y, pair_names = sample_pair(m, strategy, rng, height, strata)
            names.update(pair_names)
            _, images = check_pair(m, x, y, i, strategy, report)
            for p, img in zip((x, y), images):
                if img is not None:
                    seen.append((i, image_key(img), p))
        report.trials = stop - start
        report.strata = tuple(sorted(names))
        return report, seen

    results = run_partitioned(chunk, trials, workers)
    report = VerificationReport(label=m.label, seed=seed)
    seen = []
    for part, part_seen in results:
        report = report.merge(part)
        seen.extend(part_seen)
    _hash_pass(m, seen, report)
    report.collisions.sort(key=_witness_key)
    report.elapsed = time.perf_counter() - started
    report.evidence = EVIDENCE_SAMPLED
    logger.info(f"Collision search finished: {len(report.collisions)} collisions, "
                f"{len(report.base_locus_hits)} base-locus hits")
    return report


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------

def roundtrip_check(m, trials, seed=0, height=DEFAULT_HEIGHT, workers=1):
    """Decode the image of sampled points, cycling through every default stratum."""
    decode = resolve_decoder(m.decoder)
    strata = default_strata(m.source)
    logger.info(f"Round-trip check on {m.label or m.source.label} with {m.decoder}: {trials} trials")
    started = time.perf_counter()

    def chunk(start, stop):
        report = VerificationReport(label=m.label, seed=seed, evidence=EVIDENCE_DECODER)
        seen, names = [], set()
        for i in range(start, stop):
            rng = trial_rng(seed, "roundtrip", i)
            stratum = strata[i % len(strata)]
            names.add(stratum.name)
            x = sample_point(m.source, height, stratum.mask, rng, m.field)
            try:
                image = evaluate(m, x)
            except BaseLocusHit:
                report.base_locus_hits.append(_witness(i, stratum.name, x))
                continue
            seen.append((i, image_key(image), x))
            try:
                decoded = decode(m, image.blocks[0])
            except (InjektError, ZeroDivisionError) as exc:
                report.roundtrip_failures.append(_witness(i, stratum.name, x, image=image, error=str(exc)))
                continue
            if not equivalent_points(m.source, decoded, x):
                report.roundtrip_failures.append(_witness(i, stratum.name, x, decoded, image))
        report.trials = stop - start
        report.strata = tuple(sorted(names))
        return report, seen

    results = run_partitioned(chunk, trials, workers)
    report = VerificationReport(label=m.label, seed=seed, evidence=EVIDENCE_DECODER)
    seen = []
    for part, part_seen in results:
        report = report.merge(part)
        seen.extend(part_seen)
    _hash_pass(m, seen, report)
    if report.collisions and not report.roundtrip_failures:
        report.notes.append("collision among round-trip samples although every decode succeeded")
    report.elapsed = time.perf_counter() - started
    logger.info(f"Round-trip check finished: {len(report.roundtrip_failures)} failures")
    return report


def verify(m, trials, seed=0, height=DEFAULT_HEIGHT, workers=1):
    """Collision search, plus a round-trip check when the morphism has a decoder."""
    report = collision_search(m, trials, seed, height, workers)
    if m.decoder:
        rt = roundtrip_check(m, trials, seed, height, workers)
        report = report.merge(rt)
        report.trials = trials
        report.evidence = EVIDENCE_DECODER if rt.clean else EVIDENCE_SAMPLED
    if not m.within_dimension_bound():
        report.notes.append(f"target P^{m.ambient_dimension} exceeds 2*dim+1 = {2 * m.source.dimension + 1}")
    return report

