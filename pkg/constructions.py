# constructions.py
"""
Builders for every explicit morphism family, plus the family table used by
`construct --list`.

Each builder validates its hypotheses, assembles the sections as exact
polynomials and checks the ambient dimension it promises before returning.
"""
import logging
from dataclasses import dataclass
from itertools import product
from math import comb, factorial, lcm

from decoders import BUILTIN_PREFIX, wps_phik_section_terms
from exactalg import QQ, InjektError, Polynomial
from morphism import Morphism
from spaces import SpaceDescriptor

logger = logging.getLogger(__name__)

MAX_SUBSET_SUM_FACTORS = 20


class HypothesisViolation(InjektError):
    def __init__(self, message, params=None, triple=None):
        super().__init__(message)
        self.params = params
        self.triple = triple


class SubsetSumClash(HypothesisViolation):
    def __init__(self, dvec, subsets):
        i, j = subsets
        super().__init__(
            f"degrees {tuple(dvec)}: subsets {set(i)} and {set(j)} have the same sum",
            params={"dvec": list(dvec)},
        )
        self.subsets = subsets


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def exponents_of_degree(nvars, degree):
    """All exponent tuples of total degree `degree`, lex descending (x0^degree first)."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in exponents_of_degree(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def _multinomial(exps):
    value = factorial(sum(exps))
    for e in exps:
        value //= factorial(e)
    return value


def _monomial(shape, *blocks, coeff=1):
    return Polynomial.monomial(shape, blocks, coeff)


def _finish(source, sections, label, decoder, expected_ambient):
    m = Morphism(source, tuple(sections), label, BUILTIN_PREFIX + decoder if decoder else None)
    if m.ambient_dimension != expected_ambient:
        raise InjektError(f"{label}: built P^{m.ambient_dimension}, expected P^{expected_ambient}")
    logger.debug(f"Built {label}: {len(m.sections)} sections of degree {m.multidegree}")
    return m


def _require(condition, message, **params):
    if not condition:
        raise HypothesisViolation(message, params=params)


# ---------------------------------------------------------------------------
# Subset sums
# ---------------------------------------------------------------------------

def find_subset_sum_clash(dvec):
    """
    First pair of disjoint nonempty index sets with equal sums, 1-indexed.

    Subsets are enumerated by bitmask; the first repeated sum gives two sets
    whose symmetric difference parts are returned.
    """
    dvec = tuple(int(d) for d in dvec)
    if any(d < 1 for d in dvec):
        raise HypothesisViolation(f"degrees must be positive, got {dvec}", params={"dvec": list(dvec)})
    if len(dvec) > MAX_SUBSET_SUM_FACTORS:
        raise InjektError(f"subset-sum check supports at most {MAX_SUBSET_SUM_FACTORS} factors")
    seen = {}
    for mask in range(1 << len(dvec)):
        total = sum(d for i, d in enumerate(dvec) if mask >> i & 1)
        if total in seen:
            other = seen[total]
            left = other & ~mask
            right = mask & ~other
            return (
                tuple(i + 1 for i in range(len(dvec)) if left >> i & 1),
                tuple(i + 1 for i in range(len(dvec)) if right >> i & 1),
            )
        seen[total] = mask
    return None


def distinct_subset_sums(dvec):
    return find_subset_sum_clash(dvec) is None


# ---------------------------------------------------------------------------
# Products of projective spaces
# ---------------------------------------------------------------------------

def build_segre_veronese(dims, degrees):
    dims, degrees = tuple(dims), tuple(degrees)
    _require(len(dims) == len(degrees) and dims, "need one degree per factor", dims=dims, degrees=degrees)
    _require(all(n >= 1 for n in dims) and all(d >= 1 for d in degrees),
             "dims and degrees must be positive", dims=dims, degrees=degrees)
    source = SpaceDescriptor.product(*dims)
    shape = source.shape
    per_block = [exponents_of_degree(n + 1, d) for n, d in zip(dims, degrees)]
    sections = [_monomial(shape, *choice) for choice in product(*per_block)]
    expected = 1
    for n, d in zip(dims, degrees):
        expected *= comb(n + d, d)
    decoder = "segre" if all(d == 1 for d in degrees) else None
    label = f"segre_veronese(dims={','.join(map(str, dims))}; degrees={','.join(map(str, degrees))})"
    return _finish(source, sections, label, decoder, expected - 1)


def chow_veronese_sections(m, dvec, field=QQ):
    """Coefficients of Π_i (Σ_j x_ij T_j)^(d_i), keyed by T-exponent."""
    shape = (m + 1,) * len(dvec)
    total = {(0,) * (m + 1): Polynomial.constant(shape, 1, field)}
    for i, d in enumerate(dvec):
        factor = {}
        for alpha in exponents_of_degree(m + 1, d):
            blocks = [(0,) * (m + 1)] * len(dvec)
            blocks[i] = alpha
            factor[alpha] = Polynomial.monomial(shape, blocks, _multinomial(alpha), field)
        combined = {}
        for t1, p1 in total.items():
            for t2, p2 in factor.items():
                key = tuple(a + b for a, b in zip(t1, t2))
                combined[key] = combined[key] + p1 * p2 if key in combined else p1 * p2
        total = combined
    return total


def build_chow_veronese(m, dvec):
    dvec = tuple(int(d) for d in dvec)
    _require(m >= 1 and dvec, "need m >= 1 and at least one factor", m=m, dvec=dvec)
    clash = find_subset_sum_clash(dvec)
    if clash is not None:
        raise SubsetSumClash(dvec, clash)
    source = SpaceDescriptor.product(*([m] * len(dvec)))
    big_d = sum(dvec)
    coefficients = chow_veronese_sections(m, dvec)
    sections = [coefficients[t] for t in exponents_of_degree(m + 1, big_d)]
    decoder = "chow_veronese" if m == 1 else None
    label = f"chow_veronese(m={m}; dvec={','.join(map(str, dvec))})"
    return _finish(source, sections, label, decoder, comb(m + big_d, big_d) - 1)


def build_tangential_p1p1():
    source = SpaceDescriptor.product(1, 1)
    (x0, x1), (y0, y1) = Polynomial.variables(source.shape)
    sections = [
        x0 * y0 ** 2,
        x1 * y0 ** 2 + 2 * x0 * y0 * y1,
        2 * x1 * y0 * y1 + x0 * y1 ** 2,
        x1 * y1 ** 2,
    ]
    return _finish(source, sections, "tangential_p1p1", "chow_veronese", 3)


def build_tangential_p2p2():
    source = SpaceDescriptor.product(2, 2)
    (x0, x1, x2), (y0, y1, y2) = Polynomial.variables(source.shape)
    sections = [
        x0 * y0 ** 2,
        x1 * y1 ** 2,
        x2 * y2 ** 2,
        x0 * y1 ** 2 + 2 * x1 * y0 * y1,
        x1 * y2 ** 2 + 2 * x2 * y1 * y2,
        x2 * y0 ** 2 + 2 * x0 * y0 * y2,
        2 * x0 * y1 * y2 + 2 * x1 * y0 * y2 + 2 * x2 * y0 * y1,
        x1 * y0 ** 2 - x2 * y1 ** 2 + 2 * x0 * y0 * y1 - 2 * x1 * y1 * y2,
        x1 * y0 ** 2 - x0 * y2 ** 2 + 2 * x0 * y0 * y1 - 2 * x2 * y0 * y2,
    ]
    return _finish(source, sections, "tangential_p2p2", None, 8)


def build_p1p1_deg_d(d):
    _require(d >= 3, f"p1p1_deg_d needs d >= 3, got {d}", d=d)
    source = SpaceDescriptor.product(1, 1)
    (x0, x1), (y0, y1) = Polynomial.variables(source.shape)
    sections = [
        x0 * y0 ** d,
        d * x0 * y0 ** (d - 1) * y1 + x1 * y0 ** d,
        comb(d, 2) * x0 * y0 ** (d - 2) * y1 ** 2 + d * x1 * y0 ** (d - 1) * y1,
        x0 * y1 ** d + d * x1 * y0 * y1 ** (d - 1),
        x1 * y1 ** d,
    ]
    return _finish(source, sections, f"p1p1_deg_d(d={d})", "p1p1_deg_d", 4)


def build_p1pn(n, d):
    _require(n >= 1 and d >= 1, f"p1pn needs n, d >= 1, got n={n}, d={d}", n=n, d=d)
    source = SpaceDescriptor.product(1, n)
    (x0, x1), y = Polynomial.variables(source.shape)
    sections = [x0 ** d * y[i] for i in range(n + 1)]
    sections.append(x1 ** d * y[n])
    sections.append(d * x0 * x1 ** (d - 1) * y[0])
    for i in range(n):
        sections.append(x1 ** d * y[i] + d * x0 * x1 ** (d - 1) * y[i + 1])
    return _finish(source, sections, f"p1pn(n={n}; d={d})", "p1pn", 2 * (n + 1))


def graph_edges(m):
    """
    Edge lists of the gadget graph on vertices 0..m.

    Returns:
        tuple: (E1, E2) where E1 is the path 0 → 1 → ... → m and E2 zigzags
        0 → m → 1 → m-1 → ... inwards, missing the middle vertex ⌈m/2⌉.
    """
    if m < 1:
        raise HypothesisViolation(f"the gadget needs m >= 1, got {m}", params={"m": m})
    e1 = [(c, c + 1) for c in range(m)]
    zigzag = [m - k // 2 if k % 2 else k // 2 for k in range(m)]
    e2 = list(zip(zigzag, zigzag[1:]))
    return e1, e2


def build_p1p1pm_graph(m):
    """
    Trilinear sections spanning the annihilator of the gadget subspace, one
    per coordinate left free by the relations u_(i,j) and v_(i,j).
    """
    _require(m >= 1, f"p1p1pm_graph needs m >= 1, got {m}", m=m)
    e1, e2 = graph_edges(m)
    source = SpaceDescriptor.product(1, 1, m)
    (x0, x1), (y0, y1), z = Polynomial.variables(source.shape)
    starts = {a: b for a, b in e2}
    ends = {}
    for a, b in e2:
        ends.setdefault(b, []).append(a)
    sections = [x0 * y1 * z[m]]
    sections += [x1 * y1 * z[c] for c in range(m + 1) if c not in starts]
    for c in range(m + 1):
        s = x0 * y0 * z[c]
        if c >= 1:
            s = s - x0 * y1 * z[c - 1]
        if c in starts:
            s = s - x1 * y1 * z[c]
        sections.append(s)
    for c in range(m + 1):
        s = x1 * y0 * z[c]
        if c < m:
            s = s - x0 * y1 * z[c]
        for a in ends.get(c, ()):
            s = s - x1 * y1 * z[a]
        sections.append(s)
    return _finish(source, sections, f"p1p1pm_graph(m={m})", None, 2 * (m + 2))


def build_segre_p1p1p1_projection():
    """Projection of the Segre cube from (x0y0z1)* + (x0y1z0)* + (x1y0z0)*."""
    source = SpaceDescriptor.product(1, 1, 1)
    (x0, x1), (y0, y1), (z0, z1) = Polynomial.variables(source.shape)
    sections = [
        x0 * y0 * z0,
        x0 * y0 * z1 - x0 * y1 * z0,
        x0 * y0 * z1 - x1 * y0 * z0,
        x0 * y1 * z1,
        x1 * y0 * z1,
        x1 * y1 * z0,
        x1 * y1 * z1,
    ]
    return _finish(source, sections, "segre_p1p1p1_projection", "segre_projection", 6)


# ---------------------------------------------------------------------------
# Weighted projective spaces
# ---------------------------------------------------------------------------

def check_weight_hypotheses(weights):
    """q_0 = 1 and every three distinct weights have lcm equal to the lcm of q_1..q_n."""
    weights = tuple(int(q) for q in weights)
    if len(weights) < 2 or any(q < 1 for q in weights):
        raise HypothesisViolation(f"need at least two positive weights, got {weights}", params={"weights": weights})
    if weights[0] != 1:
        raise HypothesisViolation(f"the first weight must be 1, got {weights[0]}", params={"weights": weights})
    d = lcm(*weights[1:])
    n = len(weights)
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                if lcm(weights[i], weights[j], weights[l]) != d:
                    raise HypothesisViolation(
                        f"lcm of weights at {(i, j, l)} is {lcm(weights[i], weights[j], weights[l])}, expected {d}",
                        params={"weights": weights},
                        triple=(i, j, l),
                    )
    return weights, d


def build_wps_phi1(weights):
    weights, d = check_weight_hypotheses(weights)
    n = len(weights) - 1
    a = [d // q for q in weights]
    source = SpaceDescriptor.weighted(*weights)
    x = Polynomial.variables(source.shape)[0]
    sections = [x[0] ** d, x[0] ** (d - weights[1]) * x[1]]
    for i in range(2, n + 1):
        sections.append(x[0] ** (d - weights[i]) * x[i] + x[i - 1] ** a[i - 1])
    sections.append(x[n] ** a[n])
    label = f"wps_phi1({','.join(map(str, weights))})"
    return _finish(source, sections, label, "wps_phi1", n + 1)


def build_wps_phik(weights, k):
    weights, d = check_weight_hypotheses(weights)
    _require(k >= 2, f"wps_phik needs k >= 2, got {k}", k=k)
    n = len(weights) - 1
    source = SpaceDescriptor.weighted(*weights)
    x = Polynomial.variables(source.shape)[0]
    sections = [Polynomial.zero(source.shape) for _ in range(2 * n + 1)]
    for ell, i, j, ei, ej in wps_phik_section_terms(weights, k):
        if ei < 0 or ej < 0:
            raise InjektError(f"negative exponent in section {ell}: {ei}, {ej}")
        sections[ell] = sections[ell] + x[i] ** ei * x[j] ** ej
    label = f"wps_phik({','.join(map(str, weights))}; k={k})"
    return _finish(source, sections, label, "wps_phik", 2 * n)


def build_pn_duf(n, k):
    """P^(n-1) → P^(2n-2) by [Σ_{i+j=ℓ, i≤j} x_i^(k-1) x_j | ℓ = 2..2n], variables 1-based."""
    _require(n >= 2 and k >= 2, f"pn_duf needs n >= 2 and k >= 2, got n={n}, k={k}", n=n, k=k)
    source = SpaceDescriptor.product(n - 1)
    x = Polynomial.variables(source.shape)[0]
    sections = []
    for ell in range(2, 2 * n + 1):
        s = Polynomial.zero(source.shape)
        for i in range(max(1, ell - n), ell // 2 + 1):
            s = s + x[i - 1] ** (k - 1) * x[ell - i - 1]
        sections.append(s)
    return _finish(source, sections, f"pn_duf(n={n}; k={k})", "pn_duf", 2 * (n - 1))


# ---------------------------------------------------------------------------
# Curves and the identity
# ---------------------------------------------------------------------------

QUINTIC_FORMS = (
    {(5, 0): 1},
    {(4, 1): 1, (3, 2): 1},
    {(2, 3): 1, (1, 4): 1},
    {(0, 5): 1},
)


def _curve_sections(forms):
    shape = (2,)
    return [Polynomial(shape, {(e,): c for e, c in form.items()}) for form in forms]


def build_quintic_plane_curve():
    sections = _curve_sections([{(5, 0): 1}, {(4, 1): 1}, {(0, 5): 1}])
    return _finish(SpaceDescriptor.product(1), sections, "quintic_plane_curve", "p1_curve", 2)


def build_quintic_space_curve():
    return _finish(SpaceDescriptor.product(1), _curve_sections(QUINTIC_FORMS), "quintic_space_curve", "p1_curve", 3)


def build_identity(n):
    _require(n >= 1, f"identity needs n >= 1, got {n}", n=n)
    source = SpaceDescriptor.product(n)
    return _finish(source, Polynomial.variables(source.shape)[0], f"identity(n={n})", "identity", n)


# ---------------------------------------------------------------------------
# Family table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family:
    name: str
    builder: object
    params: tuple
    ambient: str
    decoder: str
    claim: str

    def to_json(self):
        return {
            "family": self.name,
            "params": list(self.params),
            "ambient": self.ambient,
            "decoder": self.decoder or "",
            "claim": self.claim,
        }


FAMILIES = {
    f.name: f
    for f in (
        Family("segre_veronese", build_segre_veronese, ("dims", "degrees"), "prod C(n_i+d_i, d_i) - 1",
               "segre (all degrees 1)", "Segre-Veronese embedding by all monomials of one multidegree"),
        Family("chow_veronese", build_chow_veronese, ("m", "dvec"), "C(m+D, D) - 1", "chow_veronese (m = 1)",
               "product of powers of linear forms is injective when subset sums of the degrees are distinct"),
        Family("tangential_p1p1", build_tangential_p1p1, (), "3", "chow_veronese",
               "P1xP1 injects into P3 by sections of O(1,2)"),
        Family("tangential_p2p2", build_tangential_p2p2, (), "8", None,
               "P2xP2 injects into P8 by sections of O(1,2)"),
        Family("p1p1_deg_d", build_p1p1_deg_d, ("d",), "4", "p1p1_deg_d",
               "P1xP1 injects into P4 by sections of O(1,d), d >= 3"),
        Family("wps_phi1", build_wps_phi1, ("weights",), "n + 1", "wps_phi1",
               "P(1,q_1..q_n) injects into P^(n+1) by sections of O(d), d = lcm(q_i)"),
        Family("wps_phik", build_wps_phik, ("weights", "k"), "2n", "wps_phik",
               "P(1,q_1..q_n) injects into P^(2n) by sections of O(kd), k >= 2"),
        Family("p1pn", build_p1pn, ("n", "d"), "2(n + 1)", "p1pn",
               "P1xPn injects into P^(2(n+1)) by sections of O(d,1)"),
        Family("p1p1pm_graph", build_p1p1pm_graph, ("m",), "2(m + 2)", None,
               "P1xP1xPm injects into P^(2(m+2)) by trilinear forms annihilating the gadget subspace"),
        Family("pn_duf", build_pn_duf, ("n", "k"), "2(n - 1)", "pn_duf",
               "P^(n-1) injects into P^(2(n-1)) by sections of O(k)"),
        Family("segre_p1p1p1_projection", build_segre_p1p1p1_projection, (), "6", "segre_projection",
               "P1xP1xP1 injects into P6 by projecting the Segre cube from a point off its secant locus"),
        Family("quintic_plane_curve", build_quintic_plane_curve, (), "2", "p1_curve",
               "P1 injects into P2 by quintic forms"),
        Family("quintic_space_curve", build_quintic_space_curve, (), "3", "p1_curve",
               "rational quintic space curve, every point of P3 on a secant line"),
        Family("identity", build_identity, ("n",), "n", "identity", "identity of P^n"),
    )
}


def build(family, **params):
    """
    Build a family member from keyword parameters.

    Args:
        family (str): a key of FAMILIES
        **params: exactly the family's parameter names; extra None values are ignored

    Returns:
        Morphism: the validated morphism
    """
    if family not in FAMILIES:
        raise InjektError(f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}")
    entry = FAMILIES[family]
    given = {k: v for k, v in params.items() if v is not None}
    missing = [p for p in entry.params if p not in given]
    if missing:
        raise HypothesisViolation(f"{family} needs parameter(s) {', '.join(missing)}", params=given)
    extra = sorted(set(given) - set(entry.params))
    if extra:
        logger.warning(f"Ignoring parameters {extra} for family {family}")
    m = entry.builder(*(given[p] for p in entry.params))
    logger.info(f"Constructed {m.label}: {m.source.label} -> P^{m.ambient_dimension}")
    return m


def family_table():
    return [FAMILIES[name].to_json() for name in sorted(FAMILIES)]
