# graphgadget.py
"""
The graph gadget behind the P1xP1xPm injection.

Vertices 0..m carry two directed paths: E1 walks 0 → 1 → ... → m, E2 zigzags
0 → m → 1 → m-1 → ... and misses the middle vertex. A weight on each edge
gives a tensor in C²⊗C²⊗C^(m+1) through the basis tensors u (E1) and v (E2);
the span of the per-vertex in/out weight totals has the same dimension as the
span of the tensor's slices.
"""
import logging
import time
from dataclasses import dataclass, field
from itertools import combinations

from constructions import build_p1p1pm_graph, graph_edges
from exactalg import QQ, InjektError, Matrix, ShapeMismatch, matrix_rank, scalar_to_json
from tensors import BORDER2_RANK3, Tensor222n, flattening_rank, rank_decision, secant_span_meets_subspace, span_rank
from utils import run_partitioned, trial_rng

logger = logging.getLogger(__name__)

E1 = "E1"
E2 = "E2"
DEFAULT_WEIGHT_HEIGHT = 50

BRANCH_MIXED = "mixed-support"
BRANCH_SINGLE = "single-support"
BRANCH_SECANT = "secant-span"
BRANCH_POINT = "rank-one-point"
BRANCHES = (BRANCH_MIXED, BRANCH_SINGLE, BRANCH_SECANT, BRANCH_POINT)

SECANT_STRATEGIES = ("random", "share-one", "share-two", "coordinate")

# slice c in terms of (in E1, out E1, in E2, out E2) at vertex c
_SLICE_FROM_PSI = ((1, 0, 0, 1), (0, 1, 0, 0), (0, 1, 1, 0), (0, 0, 0, 1))

CODIMENSION_NOTE = ("dim W = 2m-1, so the annihilator of W has dimension 2m+5, matching the target P^(2m+4); "
                    "a codimension of 2m+3 for the linear section is not asserted")


# ---------------------------------------------------------------------------
# Graph and subspace
# ---------------------------------------------------------------------------

def _is_path(edges):
    """Consecutive edges chain head to tail and no vertex repeats."""
    for (_, b), (c, _) in zip(edges, edges[1:]):
        if b != c:
            return False
    vertices = [edges[0][0]] + [b for _, b in edges] if edges else []
    return len(vertices) == len(set(vertices))


@dataclass(frozen=True)
class GadgetGraph:
    m: int
    e1: tuple
    e2: tuple

    def __post_init__(self):
        if len(self.e1) != self.m or len(self.e2) != self.m - 1:
            raise ShapeMismatch(f"gadget graph for m = {self.m} has |E1| = {len(self.e1)}, |E2| = {len(self.e2)}")
        if not (_is_path(list(self.e1)) and _is_path(list(self.e2))):
            raise InjektError(f"gadget edges for m = {self.m} do not form two directed paths")

    @classmethod
    def of(cls, m):
        e1, e2 = graph_edges(m)
        return cls(m, tuple(e1), tuple(e2))

    @property
    def edge_keys(self):
        return tuple((E1, i, j) for i, j in self.e1) + tuple((E2, i, j) for i, j in self.e2)

    @property
    def special_vertex(self):
        return (self.m + 1) // 2

    def to_json(self):
        return {"m": self.m, "E1": [list(e) for e in self.e1], "E2": [list(e) for e in self.e2]}


class EdgeWeighting:
    """A scalar on every edge of E1 ⊔ E2, keyed by ("E1", i, j) or ("E2", i, j)."""

    def __init__(self, graph, values, field=QQ):
        keys = set(graph.edge_keys)
        values = {tuple(k): field(v) for k, v in values.items()}
        if set(values) != keys:
            missing = sorted(keys - set(values))
            extra = sorted(set(values) - keys)
            raise ShapeMismatch(f"weighting domain mismatch: missing {missing}, extra {extra}")
        self.graph = graph
        self.values = values
        self.field = field

    @classmethod
    def zeros(cls, graph, field=QQ):
        return cls(graph, {k: 0 for k in graph.edge_keys}, field)

    @classmethod
    def indicator(cls, graph, key, field=QQ):
        key = tuple(key)
        if key not in graph.edge_keys:
            raise InjektError(f"{key} is not an edge of the gadget graph for m = {graph.m}")
        return cls(graph, {k: 1 if k == key else 0 for k in graph.edge_keys}, field)

    @classmethod
    def random(cls, graph, rng, height=DEFAULT_WEIGHT_HEIGHT, support=None):
        """Random integer weights; with `support` E1 or E2 the other path gets zeros and the support is nonzero."""
        values = {}
        for key in graph.edge_keys:
            values[key] = rng.randint(-height, height) if support in (None, key[0]) else 0
        chosen = [k for k in graph.edge_keys if support in (None, k[0])]
        if chosen and not any(values[k] for k in chosen):
            values[rng.choice(chosen)] = rng.randint(1, height)
        return cls(graph, values)

    def part(self, path):
        return {k: v for k, v in self.values.items() if k[0] == path}

    def is_zero(self):
        return not any(self.values.values())

    def to_json(self):
        return {f"{k[0]}:{k[1]}->{k[2]}": scalar_to_json(v) for k, v in self.values.items()}


def _unit(m, a, b, c):
    return Tensor222n.unit(a, b, c, m)


def u_tensor(m, i, j):
    """e0⊗e0⊗e_j + e0⊗e1⊗e_i + e1⊗e0⊗e_i"""
    return _unit(m, 0, 0, j) + _unit(m, 0, 1, i) + _unit(m, 1, 0, i)


def v_tensor(m, i, j):
    """e1⊗e0⊗e_j + e1⊗e1⊗e_i + e0⊗e0⊗e_i"""
    return _unit(m, 1, 0, j) + _unit(m, 1, 1, i) + _unit(m, 0, 0, i)


@dataclass(frozen=True)
class GadgetSubspace:
    u: tuple
    v: tuple

    @property
    def basis(self):
        return self.u + self.v

    @property
    def dims(self):
        """(dim W1, dim W2, dim W)"""
        return span_rank(list(self.u)), span_rank(list(self.v)), span_rank(list(self.basis))

    def is_direct(self):
        d1, d2, d = self.dims
        return d == d1 + d2


def build_gadget(m):
    graph = GadgetGraph.of(m)
    subspace = GadgetSubspace(
        tuple(u_tensor(m, i, j) for i, j in graph.e1),
        tuple(v_tensor(m, i, j) for i, j in graph.e2),
    )
    logger.debug(f"Gadget for m = {m}: |E1| = {len(graph.e1)}, |E2| = {len(graph.e2)}")
    return graph, subspace


# ---------------------------------------------------------------------------
# Vertex statistics and the weighting map
# ---------------------------------------------------------------------------

def psi(k, w):
    """(total in-weight on E1, out on E1, in on E2, out on E2) at vertex k."""
    if not 0 <= k <= w.graph.m:
        raise InjektError(f"vertex {k} outside 0..{w.graph.m}")
    fld = w.field
    totals = [fld.zero] * 4
    for (path, i, j), value in w.values.items():
        offset = 0 if path == E1 else 2
        if j == k:
            totals[offset] += value
        if i == k:
            totals[offset + 1] += value
    return tuple(totals)


def psi_matrix(w):
    return Matrix([list(psi(k, w)) for k in range(w.graph.m + 1)], w.field, 4)


def dim_Zw(w):
    return matrix_rank(psi_matrix(w))


def phi(w):
    """Σ_E1 w·u + Σ_E2 w·v"""
    m = w.graph.m
    total = Tensor222n.zeros(m, w.field)
    for (path, i, j), value in w.values.items():
        if value:
            basis = u_tensor(m, i, j) if path == E1 else v_tensor(m, i, j)
            total = total + basis.map_field(w.field) * value
    return total


def check_flattening_correspondence(w):
    """
    Compare dim Z_w with the flattening rank of phi(w).

    Slice c of phi(w) is a fixed invertible image of psi(c, w), so the two
    spans have equal dimension; the slice identity is checked entry by entry.
    """
    t = phi(w)
    for c, sl in enumerate(t.slices):
        p = psi(c, w)
        expected = [sum((coef * x for coef, x in zip(row, p)), w.field.zero) for row in _SLICE_FROM_PSI]
        if [sl[0][0], sl[0][1], sl[1][0], sl[1][1]] != expected:
            logger.error(f"Slice {c} of phi(w) does not match psi({c}, w)")
            return False
    return dim_Zw(w) == flattening_rank(t)


def flattening_sweep(m, trials, seed=0, height=DEFAULT_WEIGHT_HEIGHT):
    """check_flattening_correspondence on random weightings; returns failing weightings."""
    graph = GadgetGraph.of(m)
    failures = []
    for i in range(trials):
        rng = trial_rng(seed, "gadget-flattening", i)
        support = (None, E1, E2)[i % 3] if graph.e2 else (None, E1)[i % 2]
        w = EdgeWeighting.random(graph, rng, height, support)
        if not check_flattening_correspondence(w):
            failures.append({"trial": i, "weighting": w.to_json()})
    logger.info(f"Flattening correspondence for m = {m}: {trials} weightings, {len(failures)} failures")
    return failures


# ---------------------------------------------------------------------------
# Sampled consequences of the construction
# ---------------------------------------------------------------------------

@dataclass
class GadgetReport:
    m: int
    trials: int = 0
    seed: int = 0
    branches: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    elapsed: float = 0.0
    claim: str = ""

    @property
    def clean(self):
        return not self.violations

    def merge(self, other):
        branches = dict(self.branches)
        for k, v in other.branches.items():
            branches[k] = branches.get(k, 0) + v
        return GadgetReport(
            m=self.m,
            trials=self.trials + other.trials,
            seed=self.seed,
            branches=dict(sorted(branches.items())),
            violations=sorted(self.violations + other.violations, key=lambda v: (v["branch"], v["trial"])),
            notes=list(self.notes) + [n for n in other.notes if n not in self.notes],
            elapsed=self.elapsed + other.elapsed,
            claim=self.claim or other.claim,
        )

    def to_json(self, include_timing=True):
        data = {
            "m": self.m,
            "claim": self.claim,
            "trials": self.trials,
            "seed": self.seed,
            "branches": self.branches,
            "violations": self.violations,
            "notes": self.notes,
            "clean": self.clean,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


def _nonzero_vector(rng, n, height):
    vec = [rng.randint(-height, height) for _ in range(n)]
    if not any(vec):
        vec[rng.randrange(n)] = 1
    return vec


def _coordinate_pairs(m):
    units = [(a, b, c) for a in range(2) for b in range(2) for c in range(m + 1)]
    return list(combinations(units, 2))


def sample_rank_one_pair(m, strategy, rng, index, height=DEFAULT_WEIGHT_HEIGHT):
    """Two rank-one tensors; share-one/share-two reuse Segre factors, coordinate walks unit tensors in order."""
    if strategy == "coordinate":
        pairs = _coordinate_pairs(m)
        left, right = pairs[index % len(pairs)]
        return _unit(m, *left), _unit(m, *right)
    u, v, w = _nonzero_vector(rng, 2, height), _nonzero_vector(rng, 2, height), _nonzero_vector(rng, m + 1, height)
    if strategy == "random":
        other = (_nonzero_vector(rng, 2, height), _nonzero_vector(rng, 2, height), _nonzero_vector(rng, m + 1, height))
    elif strategy == "share-one":
        other = (u, _nonzero_vector(rng, 2, height), _nonzero_vector(rng, m + 1, height))
    elif strategy == "share-two":
        other = (u, v, _nonzero_vector(rng, m + 1, height))
    else:
        raise InjektError(f"unknown secant strategy {strategy!r}")
    return Tensor222n.rank_one(u, v, w), Tensor222n.rank_one(*other)


def _violation(branch, trial, **data):
    return {"branch": branch, "trial": trial, **data}


def _check_branch(branch, i, graph, basis, seed, height, report):
    rng = trial_rng(seed, f"gadget-{branch}", i)
    m = graph.m
    if branch == BRANCH_MIXED:
        w1 = EdgeWeighting.random(graph, rng, height, E1)
        w2 = EdgeWeighting.random(graph, rng, height, E2)
        w = EdgeWeighting(graph, {**w1.part(E1), **w2.part(E2)})
        fr = flattening_rank(phi(w))
        if fr < 3:
            report.violations.append(_violation(branch, i, weighting=w.to_json(), flattening_rank=fr))
    elif branch == BRANCH_SINGLE:
        w = EdgeWeighting.random(graph, rng, height, (E1, E2)[i % 2] if graph.e2 else E1)
        decision = rank_decision(phi(w))
        if decision.kind != BORDER2_RANK3:
            report.violations.append(_violation(branch, i, weighting=w.to_json(), decision=decision.kind))
    elif branch == BRANCH_SECANT:
        strategy = SECANT_STRATEGIES[i % len(SECANT_STRATEGIES)]
        p, q = sample_rank_one_pair(m, strategy, rng, i // len(SECANT_STRATEGIES), height)
        if span_rank([p, q]) == 2 and secant_span_meets_subspace(p, q, basis):
            report.violations.append(_violation(branch, i, strategy=strategy, p=p.to_json(), q=q.to_json()))
    else:
        t = Tensor222n.rank_one(_nonzero_vector(rng, 2, height), _nonzero_vector(rng, 2, height),
                                _nonzero_vector(rng, m + 1, height))
        if span_rank(list(basis) + [t]) == span_rank(list(basis)):
            report.violations.append(_violation(branch, i, tensor=t.to_json()))


def check_theorem_samples(m, trials, seed=0, subspace=None, height=DEFAULT_WEIGHT_HEIGHT, workers=1):
    """
    Sampled consequences of W missing the secant locus of the Segre variety.

    Each of the four branches runs `trials` times:
      mixed-support: weightings nonzero on both paths have flattening rank ≥ 3;
      single-support: weightings on one path are Border2Rank3;
      secant-span: no line through two rank-one tensors meets span W;
      rank-one-point: no rank-one tensor lies in span W.

    Args:
        subspace (list): tensors replacing W in the last two branches (negative controls)

    Returns:
        GadgetReport: branch counts and violations with witnesses
    """
    if trials < 1:
        raise InjektError("check_theorem_samples needs at least one trial")
    graph, gadget = build_gadget(m)
    basis = list(subspace) if subspace is not None else list(gadget.basis)
    logger.info(f"Gadget checks for m = {m}: {trials} trials per branch, seed {seed}")
    started = time.perf_counter()
    branches = [b for b in BRANCHES if subspace is None or b in (BRANCH_SECANT, BRANCH_POINT)]
    if not graph.e2:
        branches = [b for b in branches if b != BRANCH_MIXED]

    def chunk(start, stop):
        report = GadgetReport(m=m, seed=seed)
        for branch in branches:
            for i in range(start, stop):
                _check_branch(branch, i, graph, basis, seed, height, report)
            report.branches[branch] = stop - start
        report.trials = stop - start
        return report

    report = GadgetReport(m=m, seed=seed, claim=f"W misses the secant locus of P1xP1xP{m}")
    for part in run_partitioned(chunk, trials, workers):
        report = report.merge(part)
    if not graph.e2:
        report.notes.append("m = 1 has no E2 edges; the mixed-support branch is vacuous")
    if subspace is not None:
        report.notes.append("custom subspace: only the secant-span and rank-one-point branches ran")
    report.elapsed = time.perf_counter() - started
    logger.info(f"Gadget checks for m = {m} finished: {len(report.violations)} violations")
    return report


# ---------------------------------------------------------------------------
# Sections as functionals on the tensor space
# ---------------------------------------------------------------------------

def section_functional(section, m):
    """Coefficient vector of a trilinear section on C²⊗C²⊗C^(m+1), indexed like Tensor222n.data."""
    if section.shape != (2, 2, m + 1):
        raise ShapeMismatch(f"section shape {section.shape} does not match P1xP1xP{m}")
    vec = [QQ.zero] * (4 * (m + 1))
    for (ex, ey, ez), coeff in section.terms.items():
        if sum(ex) != 1 or sum(ey) != 1 or sum(ez) != 1:
            raise ShapeMismatch("sections must be trilinear")
        a, b, c = ex.index(1), ey.index(1), ez.index(1)
        vec[(2 * a + b) * (m + 1) + c] += coeff
    return vec


def annihilation_report(m, morphism=None):
    """
    Each section annihilates every u and v, and the sections are independent.

    Returns:
        dict: counts, the rank, and the (section, tensor) pairs that fail
    """
    morphism = morphism or build_p1p1pm_graph(m)
    graph, gadget = build_gadget(m)
    functionals = [section_functional(s, m) for s in morphism.sections]
    failures = []
    for si, f in enumerate(functionals):
        for name, edges, tensors in (("u", graph.e1, gadget.u), ("v", graph.e2, gadget.v)):
            for (i, j), t in zip(edges, tensors):
                value = sum((a * b for a, b in zip(f, t.data)), QQ.zero)
                if value:
                    failures.append({"section": si, "tensor": f"{name}({i},{j})", "value": scalar_to_json(value)})
    rank = matrix_rank(Matrix(functionals, QQ, 4 * (m + 1)))
    expected = 4 * (m + 1) - (2 * m - 1)
    ok = not failures and rank == len(functionals) == expected
    if not ok:
        logger.warning(f"Annihilation check for m = {m} failed: rank {rank}, {len(failures)} nonzero pairings")
    return {
        "m": m,
        "sections": len(functionals),
        "rank": rank,
        "expected": expected,
        "failures": failures,
        "ok": ok,
        "note": CODIMENSION_NOTE,
    }


def check_corollary_annihilation(m, morphism=None):
    return annihilation_report(m, morphism)["ok"]
