# decoders.py
"""
Inverse maps for the constructions, registered as "builtin:<name>".

A decoder takes the morphism and the image coordinates (a tuple of field
elements) and returns a source point. All parameters are read back from the
morphism's source and multidegree.
"""
import logging
from itertools import combinations, product
from math import lcm, prod

from binary_forms import BinaryForm, binary_gcd, binary_rational_roots, udivmod, uderiv, ugcd
from exactalg import InjektError, Matrix, nullspace, solve
from spaces import ProjectivePoint

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

_REGISTRY = {}


class DecodeError(InjektError):
    pass


def register(name):
    def wrap(fn):
        _REGISTRY[name] = fn
        return fn
    return wrap


def available_decoders():
    return sorted(_REGISTRY)


def resolve_decoder(handle):
    """Look up a "builtin:<name>" handle."""
    if not handle:
        raise InjektError("morphism has no decoder")
    if not handle.startswith(BUILTIN_PREFIX):
        raise InjektError(f"decoder handle {handle!r} must start with {BUILTIN_PREFIX!r}")
    name = handle[len(BUILTIN_PREFIX):]
    if name not in _REGISTRY:
        raise InjektError(f"unknown decoder {handle!r}; known: {', '.join(available_decoders())}")
    return _REGISTRY[name]


def decode(m, image):
    """Decode an image point (ProjectivePoint or coordinate sequence) with the morphism's decoder."""
    values = image.blocks[0] if isinstance(image, ProjectivePoint) else tuple(m.field(v) for v in image)
    if len(values) != len(m.sections):
        raise DecodeError(f"image has {len(values)} coordinates, morphism has {len(m.sections)} sections")
    if not any(values):
        raise DecodeError("the zero vector is not a point")
    return resolve_decoder(m.decoder)(m, tuple(values))


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------

def solve_auxiliary_system(a, b, c, d):
    """
    Invert (x, y) ↦ (1/x + d/y, x + d·y, x² + d·y²) on pairs of nonzero scalars.

    Returns:
        tuple: the unique (x, y)
    """
    if a * b == (d + 1) ** 2:
        x = (d + 1) / a
        return x, x
    # (d(d+1) - ab)·x + (d+1 - ab)·y + a·c = 0 together with x = b - d·y
    p, q = d * (d + 1) - a * b, d + 1 - a * b
    denom = q - d * p
    if not denom:
        raise DecodeError("auxiliary system is singular")
    y = -(a * c + p * b) / denom
    return b - d * y, y


def duf_decode(values, n, k, field):
    """
    Invert [x_1 : ... : x_n] ↦ [Σ_{i+j=ℓ, i≤j} x_i^(k-1) x_j | ℓ = 2..2n].

    The first nonzero coordinate sits at ℓ = 2i* for the first nonzero x_i*;
    with x_i* = 1 every later x_j is linear in coordinate i* + j.
    """
    values = list(values)
    if len(values) != 2 * n - 1:
        raise DecodeError(f"expected {2 * n - 1} coordinates, got {len(values)}")
    first = next((i for i, v in enumerate(values) if v), None)
    if first is None or first % 2:
        raise DecodeError("zero pattern does not come from any point")
    start = first // 2 + 1
    w = [v / values[first] for v in values]
    x = [field.zero] * (n + 1)
    x[start] = field.one
    for j in range(start + 1, n + 1):
        ell = start + j
        known = field.zero
        for i in range(start + 1, j):
            jj = ell - i
            if i <= jj < j:
                known = known + x[i] ** (k - 1) * x[jj]
        x[j] = w[ell - 2] - known
    return x[1:]


def _root_exponents(a):
    """CRT exponents γ_j ≡ -1 (mod a_j), γ_j ≡ 0 (mod a_i) for i ≠ j."""
    total = prod(a)
    gammas = []
    for aj in a:
        rest = total // aj
        try:
            gammas.append(rest * ((-pow(rest, -1, aj)) % aj) % total if aj > 1 else 0)
        except ValueError as exc:
            raise DecodeError(f"exponents {a} are not pairwise coprime") from exc
    return gammas


def invert_powers(u, a, field):
    """
    A point y of P(q_1, ..., q_n) with y_i^(a_i) ∝ u_i in the weighted sense.

    The a_i must be pairwise coprime on the support of u.
    """
    support = [i for i, v in enumerate(u) if v]
    gammas = _root_exponents([a[i] for i in support])
    y = [field.zero] * len(u)
    for i in support:
        value = field.one
        for j, g in zip(support, gammas):
            e = g + (1 if i == j else 0)
            value = value * u[j] ** (e // a[i])
        y[i] = value
    return y


def _weighted_data(m):
    weights = m.source.weights
    if m.source.kind != "weighted" or weights[0] != 1:
        raise DecodeError("weighted decoders need a source P(1, q_1, ..., q_n)")
    d = lcm(*weights[1:])
    return weights, d, [d // q for q in weights]


# ---------------------------------------------------------------------------
# Registered decoders
# ---------------------------------------------------------------------------

@register("identity")
def decode_linear(m, z):
    """Sections linear in one block of variables: solve the linear system."""
    if m.source.kind != "product" or len(m.source.dims) != 1 or m.multidegree != (1,):
        raise DecodeError("linear decoding needs degree-1 sections on a single projective space")
    n = m.source.shape[0]
    rows = []
    for s in m.sections:
        row = [m.field.zero] * n
        for exps, c in s.terms.items():
            row[exps[0].index(1)] = c
        rows.append(row)
    x = solve(Matrix(rows, m.field, n), z)
    if x is None or not any(x):
        raise DecodeError("image is not in the span of the sections")
    return ProjectivePoint((tuple(x),))


@register("segre")
def decode_segre(m, z):
    """Monomial sections of multidegree (1, ..., 1): read each block off one slice."""
    positions = {}
    for index, s in enumerate(m.sections):
        if len(s.terms) != 1:
            raise DecodeError("segre decoding needs monomial sections")
        exps = next(iter(s.terms))
        positions[tuple(b.index(1) for b in exps)] = index
    anchor = next(key for key, index in positions.items() if z[index])
    blocks = []
    for b, size in enumerate(m.source.shape):
        block = []
        for j in range(size):
            key = anchor[:b] + (j,) + anchor[b + 1:]
            block.append(z[positions[key]])
        blocks.append(tuple(block))
    return ProjectivePoint(tuple(blocks))


def match_multiplicities(roots, dvec):
    """Assign each root to the unique index subset whose degrees sum to its multiplicity."""
    remaining = set(range(len(dvec)))
    assignment = {}
    for root, mult in roots:
        hits = [
            set(sub)
            for size in range(1, len(remaining) + 1)
            for sub in combinations(sorted(remaining), size)
            if sum(dvec[i] for i in sub) == mult
        ]
        if len(hits) != 1:
            raise DecodeError(f"multiplicity {mult} matches {len(hits)} index subsets")
        for i in hits[0]:
            assignment[i] = root
        remaining -= hits[0]
    if remaining:
        raise DecodeError(f"factors {sorted(remaining)} were not recovered")
    return assignment


@register("chow_veronese")
def decode_chow_veronese(m, z):
    """
    Factor the binary form with coefficients z into rational linear factors and
    hand each root to the factors whose degrees sum to its multiplicity.
    """
    if m.source.kind != "product" or any(n != 1 for n in m.source.dims):
        raise DecodeError("chow_veronese decoding is limited to factors P^1")
    dvec = m.multidegree
    roots = binary_rational_roots(BinaryForm(z, m.field))
    if roots.residual.degree:
        raise DecodeError("the fiber does not split over the base field")
    assignment = match_multiplicities(roots.roots, dvec)
    # a root [a:b] of the form comes from the linear factor b·T0 - a·T1
    blocks = []
    for i in range(len(dvec)):
        a, b = assignment[i]
        blocks.append((b, -a))
    return ProjectivePoint(tuple(blocks))


@register("p1p1_deg_d")
def decode_p1p1_deg_d(m, z):
    fld = m.field
    d = m.multidegree[1]
    z0, z1, z2, z3, z4 = z
    if z0:
        z1, z2, z3, z4 = (v / z0 for v in (z1, z2, z3, z4))
        if z4:
            a, b, c = z3 / z4, z1, z1 * z1 - 2 * z2
            v, u = solve_auxiliary_system(a, b, c, fld(d))
        elif z2:
            v, u = fld.zero, z1 / fld(d)
        else:
            v, u = z1, fld.zero
        return ProjectivePoint(((fld.one, v), (fld.one, u)))
    if z1:
        u = z2 / (fld(d) * z1)
        return ProjectivePoint(((fld.zero, fld.one), (fld.one, u)))
    if z3 or z4:
        return ProjectivePoint(((z3, z4), (fld.zero, fld.one)))
    raise DecodeError(f"zero pattern of {z} does not occur on P1xP1")


@register("wps_phi1")
def decode_wps_phi1(m, z):
    """Triangular back-substitution on D(x0); on V(x0) solve for u_i = x_i^(a_i) and take roots."""
    fld = m.field
    weights, d, a = _weighted_data(m)
    n = len(weights) - 1
    if m.multidegree != d or len(z) != n + 2:
        raise DecodeError("morphism does not have the degree-d shape of phi_1")
    if z[0]:
        w = [v / z[0] for v in z]
        x = [fld.one, w[1]]
        for i in range(2, n + 1):
            x.append(w[i] - x[i - 1] ** a[i - 1])
        return ProjectivePoint((tuple(x),))
    linear = [a[i] == 1 for i in range(n + 1)]
    u = [fld.zero] * (n + 1)
    u[n] = z[n + 1]
    for i in range(n, 1, -1):
        u[i - 1] = z[i] - (u[i] if linear[i] else fld.zero)
    if z[1] != (u[1] if linear[1] else fld.zero):
        raise DecodeError("image is inconsistent on V(x0)")
    y = invert_powers(u[1:], a[1:], fld)
    return ProjectivePoint(((fld.zero, *y),))


def wps_phik_section_terms(weights, k):
    """(ℓ, i, j, exponent of x_i, exponent of x_j) for every term of phi_k."""
    d = lcm(*weights[1:])
    n = len(weights) - 1
    terms = []
    for ell in range(2 * n + 1):
        for i in range(max(0, ell - n), ell // 2 + 1):
            j = ell - i
            b_ij = lcm(weights[i], weights[j]) // weights[i]
            b_ji = lcm(weights[i], weights[j]) // weights[j]
            terms.append((ell, i, j, k * (d // weights[i]) - b_ij, b_ji))
    return terms


@register("wps_phik")
def decode_wps_phik(m, z):
    fld = m.field
    weights, d, a = _weighted_data(m)
    n = len(weights) - 1
    if m.multidegree % d or len(z) != 2 * n + 1:
        raise DecodeError("morphism does not have the shape of phi_k")
    k = m.multidegree // d
    if z[0]:
        w = [v / z[0] for v in z]
        x = [fld.one] + [fld.zero] * n
        terms = wps_phik_section_terms(weights, k)
        for ell in range(1, n + 1):
            known = fld.zero
            for t_ell, i, j, ei, ej in terms:
                if t_ell == ell and i > 0:
                    known = known + x[i] ** ei * x[j] ** ej
            x[ell] = w[ell] - known
        return ProjectivePoint((tuple(x),))
    if z[1]:
        raise DecodeError("image is inconsistent on V(x0)")
    if n == 1:
        return ProjectivePoint(((fld.zero, fld.one),))
    u = duf_decode(z[2:], n, k, fld)
    y = invert_powers(u, a[1:], fld)
    return ProjectivePoint(((fld.zero, *y),))


@register("pn_duf")
def decode_pn_duf(m, z):
    n = m.source.shape[0]
    k = m.multidegree[0]
    return ProjectivePoint((tuple(duf_decode(z, n, k, m.field)),))


@register("p1pn")
def decode_p1pn(m, z):
    """
    On x0 = 0 the tail coordinates give y directly. Otherwise y is the first
    block of coordinates and x1 follows from the ratios at its first and last
    nonzero entries.
    """
    fld = m.field
    d = m.multidegree[0]
    n = m.source.dims[1]
    head = z[: n + 1]
    if not any(head):
        y = tuple(z[n + 3: 2 * n + 3]) + (z[n + 1],)
        return ProjectivePoint(((fld.zero, fld.one), y))
    first = next(i for i, v in enumerate(head) if v)
    last = max(i for i, v in enumerate(head) if v)
    numer = z[n + 1] if last == n else z[n + 3 + last]
    denom = z[n + 2] if first == 0 else z[n + 2 + first]
    x1 = fld.zero if not denom else fld(d) * (head[first] / head[last]) * (numer / denom)
    return ProjectivePoint(((fld.one, x1), tuple(head)))


def _flattening_minors(entries, shape, field):
    """2×2 minors of every flattening; entries maps multi-index to (constant, slope) in λ."""
    minors = []
    for b, size in enumerate(shape):
        others = [range(s) for j, s in enumerate(shape) if j != b]
        cols = list(product(*others))

        def at(r, col):
            return entries[col[:b] + (r,) + col[b:]]

        for r1, r2 in combinations(range(size), 2):
            for c1, c2 in combinations(cols, 2):
                (a0, a1), (b0, b1) = at(r1, c1), at(r1, c2)
                (c0_, c1_), (d0, d1) = at(r2, c1), at(r2, c2)
                minors.append([
                    a0 * d0 - b0 * c0_,
                    a0 * d1 + a1 * d0 - b0 * c1_ - b1 * c0_,
                    a1 * d1 - b1 * c1_,
                ])
    return minors


@register("segre_projection")
def decode_segre_projection(m, z):
    """
    Sections are multilinear and cut out one point p of the Segre ambient space.
    Lift z to a tensor T0 and find the unique λ with T0 + λ·p of rank one.
    """
    fld = m.field
    shape = m.source.shape
    if m.multidegree != (1,) * len(shape):
        raise DecodeError("segre projection decoding needs multilinear sections")
    indices = list(product(*(range(s) for s in shape)))
    column = {idx: c for c, idx in enumerate(indices)}
    rows = []
    for s in m.sections:
        row = [fld.zero] * len(indices)
        for exps, c in s.terms.items():
            row[column[tuple(b.index(1) for b in exps)]] = c
        rows.append(row)
    matrix = Matrix(rows, fld, len(indices))
    kernel = nullspace(matrix)
    if len(kernel) != 1:
        raise DecodeError(f"projection centre has dimension {len(kernel)}, expected a point")
    p = kernel[0]
    t0 = solve(matrix, z)
    if t0 is None:
        raise DecodeError("image is not in the span of the sections")
    entries = {idx: (t0[column[idx]], p[column[idx]]) for idx in indices}
    g = []
    for minor in _flattening_minors(entries, shape, fld):
        g = ugcd(g, minor, fld)
    # double root when the line through the centre is tangent to the Segre variety
    if len(g) > 2:
        g = udivmod(g, ugcd(g, uderiv(g, fld), fld), fld)[0]
    if len(g) != 2:
        raise DecodeError(f"rank-one condition has {max(len(g) - 1, 0)} degrees of freedom, expected one root")
    lam = -g[0] / g[1]
    tensor = {idx: t0[column[idx]] + lam * p[column[idx]] for idx in indices}
    anchor = next(idx for idx in indices if tensor[idx])
    blocks = []
    for b, size in enumerate(shape):
        blocks.append(tuple(tensor[anchor[:b] + (j,) + anchor[b + 1:]] for j in range(size)))
    return ProjectivePoint(tuple(blocks))


@register("p1_curve")
def decode_p1_curve(m, z):
    """The source parameter is the common root of z_j·f_i - z_i·f_j."""
    if m.source.kind != "product" or m.source.dims != (1,):
        raise DecodeError("curve decoding needs the source P^1")
    forms = [BinaryForm.from_polynomial(s) for s in m.sections]
    g = None
    for i, j in combinations(range(len(forms)), 2):
        minor = forms[i] * z[j] - forms[j] * z[i]
        if minor.is_zero():
            continue
        g = minor if g is None else binary_gcd(g, minor)
    if g is None:
        raise DecodeError("every minor vanishes identically")
    roots = binary_rational_roots(g)
    if len(roots.roots) != 1 or roots.residual.degree:
        raise DecodeError(f"expected one parameter, found {len(roots.roots)} rational roots")
    (a, b), _ = roots.roots[0]
    return ProjectivePoint(((a, b),))

