# tensors.py
"""
Exact rank decisions for 2×2×(m+1) tensors, secant-span tests, and secant
lines of rational curves in P^3.

A tensor stores its entries t[a][b][c] flat, c fastest. Slice c is the 2×2
matrix (t[a][b][c])_{a,b}; the flattening along the last factor is the
4×(m+1) matrix with row index (a, b).
"""
import logging
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product

from binary_forms import (
    BinaryForm,
    binary_form_rank,
    binary_gcd,
    binary_rational_roots,
    binary_resultant,
    interpolate,
)
from constructions import QUINTIC_FORMS, build_tangential_p2p2, chow_veronese_sections, exponents_of_degree
from exactalg import (
    QQ,
    FieldMismatch,
    Fp2Element,
    InjektError,
    Matrix,
    QuadraticExtensionField,
    ShapeMismatch,
    field_from_name,
    matrix_rank,
    row_echelon,
    nullspace,
    primes_above,
    prime_field,
    scalar_from_json,
    scalar_to_json,
    solve,
)
from utils import trial_rng

logger = logging.getLogger(__name__)

ZERO = "Zero"
RANK_ONE = "RankOne"
RANK_TWO = "RankTwo"
BORDER2_RANK3 = "Border2Rank3"
BORDER_AT_LEAST3 = "BorderAtLeast3"
HONEST_RANK_AT_MOST_TWO = (ZERO, RANK_ONE, RANK_TWO)

# where rank-two summands live
WITNESS_BASE = "base"
WITNESS_EXTENSION = "extension"
WITNESS_COMPLEX = "complex-only"

EVIDENCE_PRIME_START = 10 ** 4
DEFAULT_EVIDENCE_PRIMES = 3
MAX_EVIDENCE_PRIMES = 30

ON_CURVE = "OnCurve"
ON_HONEST_SECANT = "OnHonestSecant"
NO_SECANT_FOUND = "NoSecantFound"
NOT_ON_SECANT = "NotOnSecant"

MODE_RATIONAL = "rational-certificate"
MODE_MODULAR = "modular-evidence"


class DegenerateCurve(InjektError):
    pass


# ---------------------------------------------------------------------------
# Tensors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tensor222n:
    m: int
    data: tuple
    field: object = QQ

    def __post_init__(self):
        if self.m < 0:
            raise ShapeMismatch(f"m must be nonnegative, got {self.m}")
        data = tuple(self.field(x) for x in self.data)
        if len(data) != 4 * (self.m + 1):
            raise ShapeMismatch(f"a 2x2x{self.m + 1} tensor has {4 * (self.m + 1)} entries, got {len(data)}")
        object.__setattr__(self, "data", data)

    def index(self, a, b, c):
        return (2 * a + b) * (self.m + 1) + c

    def entry(self, a, b, c):
        return self.data[self.index(a, b, c)]

    @property
    def slices(self):
        return tuple(
            ((self.entry(0, 0, c), self.entry(0, 1, c)), (self.entry(1, 0, c), self.entry(1, 1, c)))
            for c in range(self.m + 1)
        )

    @classmethod
    def zeros(cls, m, field=QQ):
        return cls(m, (0,) * (4 * (m + 1)), field)

    @classmethod
    def unit(cls, a, b, c, m, field=QQ):
        """e_a ⊗ e_b ⊗ e_c"""
        data = [0] * (4 * (m + 1))
        data[(2 * a + b) * (m + 1) + c] = 1
        return cls(m, tuple(data), field)

    @classmethod
    def rank_one(cls, u, v, w, field=QQ):
        u, v, w = [field(x) for x in u], [field(x) for x in v], [field(x) for x in w]
        return cls(len(w) - 1, tuple(u[a] * v[b] * w[c] for a in range(2) for b in range(2) for c in range(len(w))), field)

    @classmethod
    def from_slices(cls, slices, field=QQ):
        m = len(slices) - 1
        data = [0] * (4 * (m + 1))
        for c, sl in enumerate(slices):
            for a in range(2):
                for b in range(2):
                    data[(2 * a + b) * (m + 1) + c] = sl[a][b]
        return cls(m, tuple(data), field)

    def _check(self, other):
        if other.m != self.m:
            raise ShapeMismatch(f"tensors with m = {self.m} and m = {other.m}")
        if other.field != self.field:
            raise FieldMismatch(f"tensors over {self.field} and {other.field}")

    def __add__(self, other):
        self._check(other)
        return Tensor222n(self.m, tuple(x + y for x, y in zip(self.data, other.data)), self.field)

    def __neg__(self):
        return Tensor222n(self.m, tuple(-x for x in self.data), self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        c = self.field(scalar)
        return Tensor222n(self.m, tuple(x * c for x in self.data), self.field)

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.data)

    def map_field(self, field):
        return Tensor222n(self.m, tuple(field(x) for x in self.data), field)

    def to_json(self):
        data = {"m": self.m, "slices": [[[scalar_to_json(x) for x in row] for row in sl] for sl in self.slices]}
        if self.field != QQ:
            data["field"] = self.field.name
        return data

    @classmethod
    def from_json(cls, data):
        try:
            fld = field_from_name(data.get("field"))
            slices = [[[scalar_from_json(x, fld) for x in row] for row in sl] for sl in data["slices"]]
            t = cls.from_slices(slices, fld)
        except (KeyError, TypeError, IndexError) as exc:
            raise InjektError(f"malformed tensor JSON: {exc}") from exc
        if "m" in data and data["m"] != t.m:
            raise ShapeMismatch(f"tensor declares m = {data['m']} but has {t.m + 1} slices")
        return t


def flattening_matrix(t):
    return Matrix([[t.entry(a, b, c) for c in range(t.m + 1)] for a in range(2) for b in range(2)], t.field, t.m + 1)


def flattening_rank(t):
    """Rank of ℓ ↦ (id ⊗ id ⊗ ℓ)(t), the dimension of the span of the slices."""
    return matrix_rank(flattening_matrix(t))


# ---------------------------------------------------------------------------
# Rank decisions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankDecision:
    kind: str
    flattening_rank: int
    summands: tuple = None
    witness_field: str = WITNESS_BASE
    discriminant: object = None

    @property
    def honest_rank_at_most_two(self):
        return self.kind in HONEST_RANK_AT_MOST_TWO

    def to_json(self):
        data = {"decision": self.kind, "flattening_rank": self.flattening_rank}
        if self.summands is not None:
            data["summands"] = [[[scalar_to_json(x) for x in vec] for vec in s] for s in self.summands]
            data["witness_field"] = self.witness_field
        if self.discriminant is not None:
            data["discriminant"] = scalar_to_json(self.discriminant)
            data["witness_field"] = self.witness_field
        return data


def _det2(mat):
    return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]


def _vec(mat):
    return [mat[0][0], mat[0][1], mat[1][0], mat[1][1]]


def _unvec(v):
    return ((v[0], v[1]), (v[2], v[3]))


def _factor_rank_one(mat, fld):
    """(u, v) with mat = u vᵀ for a nonzero rank-one 2×2 matrix."""
    for i in range(2):
        for j in range(2):
            if mat[i][j]:
                u = (mat[0][j], mat[1][j])
                v = tuple(x / mat[i][j] for x in mat[i])
                return u, v
    raise InjektError("cannot factor the zero matrix")


def _slice_basis(t):
    rows, pivots = _slice_echelon(t)
    return [_unvec(rows[i]) for i in range(len(pivots))]


def _slice_echelon(t):
    return row_echelon(Matrix([_vec(sl) for sl in t.slices], t.field, 4))


def _coefficients_in(t, basis, fld):
    """w_j with slice_c = Σ_j w_j[c]·basis_j for every c."""
    columns = Matrix([list(col) for col in zip(*(_vec(b) for b in basis))], fld, len(basis))
    ws = [[] for _ in basis]
    for sl in t.slices:
        coeffs = solve(columns, [fld(x) for x in _vec(sl)])
        if coeffs is None:
            raise InjektError("slice outside the span of the chosen basis")
        for j, c in enumerate(coeffs):
            ws[j].append(c)
    return ws


def _summands_from_matrices(t, mats, fld):
    """Rank-one summands u⊗v⊗w from rank-one matrices spanning every slice."""
    lifted = t.map_field(fld) if t.field != fld else t
    mats = [tuple(tuple(fld(x) for x in row) for row in mat) for mat in mats]
    ws = _coefficients_in(lifted, mats, fld)
    out = []
    for mat, w in zip(mats, ws):
        if any(w):
            u, v = _factor_rank_one(mat, fld)
            out.append((tuple(u), tuple(v), tuple(w)))
    return tuple(out)


def summands_reproduce(t, summands):
    """Σ u⊗v⊗w equals t after lifting both to the summands' field."""
    if not summands:
        return t.is_zero()
    fld = t.field
    for u, v, w in summands:
        lifted = [x for x in (*u, *v, *w) if isinstance(x, Fp2Element)]
        if lifted:
            fld = lifted[0].field
    total = Tensor222n.zeros(t.m, fld)
    for u, v, w in summands:
        total = total + Tensor222n.rank_one(u, v, w, fld)
    return total == t.map_field(fld)


def _quadratic_roots(qa, qb, qc, fld):
    """Projective roots of qa·x² + qb·xy + qc·y² when its square-root discriminant exists in fld."""
    disc = qb * qb - 4 * qa * qc
    root = fld.sqrt(disc)
    if root is None:
        return None
    if qa:
        return [((-qb + root) / (2 * qa), fld.one), ((-qb - root) / (2 * qa), fld.one)]
    return [(fld.one, fld.zero), (-qc, qb)]


def _common_line_decision(t, fr, basis):
    """Every matrix in the slice span is singular: the slices share a column or a row space."""
    fld = t.field
    columns = Matrix([[b[a][j] for b in basis for j in range(2)] for a in range(2)], fld)
    if matrix_rank(columns) == 1:
        # t = u ⊗ N with N[b][c]
        u = next(((b[0][j], b[1][j]) for b in basis for j in range(2) if b[0][j] or b[1][j]))
        k = next(i for i in range(2) if u[i])
        summands = []
        for b in range(2):
            w = tuple(t.entry(k, b, c) / u[k] for c in range(t.m + 1))
            if any(w):
                summands.append((tuple(u), tuple(fld.one if j == b else fld.zero for j in range(2)), w))
    else:
        v = next(((b[i][0], b[i][1]) for b in basis for i in range(2) if b[i][0] or b[i][1]))
        k = next(j for j in range(2) if v[j])
        summands = []
        for a in range(2):
            w = tuple(t.entry(a, k, c) / v[k] for c in range(t.m + 1))
            if any(w):
                summands.append((tuple(fld.one if i == a else fld.zero for i in range(2)), tuple(v), w))
    return RankDecision(RANK_TWO, fr, tuple(summands), WITNESS_BASE)


def rank_decision(t):
    """
    Classify t by rank and border rank.

    The slices span S. With dim S ≤ 1 the rank is that of one generating
    matrix. With dim S = 2 and basis (A, B), q(x, y) = det(xA + yB) decides:
    q ≡ 0 means a shared row or column space, disc(q) ≠ 0 gives two rank-one
    directions, and a double root leaves a rank-three point of border rank two.
    """
    fld = t.field
    fr = flattening_rank(t)
    if fr >= 3:
        return RankDecision(BORDER_AT_LEAST3, fr)
    if fr == 0:
        return RankDecision(ZERO, 0, ())
    basis = _slice_basis(t)
    if fr == 1:
        a = basis[0]
        if not _det2(a):
            return RankDecision(RANK_ONE, 1, _summands_from_matrices(t, [a], fld))
        halves = [((a[0][0], fld.zero), (a[1][0], fld.zero)), ((fld.zero, a[0][1]), (fld.zero, a[1][1]))]
        ws = _coefficients_in(t, [a], fld)[0]
        summands = []
        for h in halves:
            u, v = _factor_rank_one(h, fld)
            summands.append((tuple(u), tuple(v), tuple(ws)))
        return RankDecision(RANK_TWO, 1, tuple(summands))
    a, b = basis
    qa = _det2(a)
    qc = _det2(b)
    ab = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    qb = _det2(ab) - qa - qc
    if not (qa or qb or qc):
        return _common_line_decision(t, fr, basis)
    disc = qb * qb - 4 * qa * qc
    if not disc:
        return RankDecision(BORDER2_RANK3, fr, None, WITNESS_BASE, disc)
    roots = _quadratic_roots(qa, qb, qc, fld)
    witness_field, work = WITNESS_BASE, fld
    if roots is None:
        if fld == QQ:
            return RankDecision(RANK_TWO, fr, None, WITNESS_COMPLEX, disc)
        work = QuadraticExtensionField(fld.p)
        roots = _quadratic_roots(work(qa), work(qb), work(qc), work)
        witness_field = WITNESS_EXTENSION
    mats = []
    for x, y in roots:
        mats.append(tuple(tuple(x * work(ea) + y * work(eb) for ea, eb in zip(ra, rb)) for ra, rb in zip(a, b)))
    return RankDecision(RANK_TWO, fr, _summands_from_matrices(t, mats, work), witness_field, disc)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _projective_reps(fld, size):
    """One representative per point of P^(size-1)(F_p): first nonzero coordinate 1."""
    reps = []
    for lead in range(size):
        for tail in product(range(fld.p), repeat=size - lead - 1):
            reps.append((0,) * lead + (1,) + tail)
    return reps


def rank_one_table(m, fld):
    """Integer data tuples of every nonzero rank-one 2×2×(m+1) tensor over F_p."""
    p = fld.p
    table = set()
    vectors = [w for w in product(range(p), repeat=m + 1) if any(w)]
    for u in _projective_reps(fld, 2):
        for v in _projective_reps(fld, 2):
            for w in vectors:
                table.add(tuple(u[a] * v[b] * w[c] % p for a in range(2) for b in range(2) for c in range(m + 1)))
    return frozenset(table)


def brute_force_rank_at_most_two(t, table=None):
    """Honest rank ≤ 2 over F_p by searching for a rank-one r with t - r of rank ≤ 1."""
    fld = t.field
    p = fld.p
    data = tuple(int(x) for x in t.data)
    table = table or rank_one_table(t.m, fld)
    if not any(data) or data in table:
        return True
    if flattening_rank(t) >= 3:
        return False
    for r in table:
        diff = tuple((x - y) % p for x, y in zip(data, r))
        if diff in table:
            return True
    return False


def oracle_agrees(t, table=None):
    """
    Compare rank_decision with the brute-force oracle over F_p.

    Returns:
        tuple: (agrees, decision, oracle verdict). A RankTwo decision with
        summands over F_(p²) agrees when the oracle says no and the summands
        reproduce t exactly.
    """
    decision = rank_decision(t)
    verdict = brute_force_rank_at_most_two(t, table)
    if decision.kind == RANK_TWO and decision.witness_field == WITNESS_EXTENSION:
        ok = not verdict and summands_reproduce(t, decision.summands)
    else:
        ok = verdict == decision.honest_rank_at_most_two
        if ok and decision.summands:
            ok = summands_reproduce(t, decision.summands)
    return ok, decision, verdict


def random_tensor(rng, m, fld, height=10):
    """Uniform over F_p; bounded-height integers over ℚ."""
    if fld == QQ:
        return Tensor222n(m, tuple(rng.randint(-height, height) for _ in range(4 * (m + 1))), fld)
    return Tensor222n(m, tuple(rng.randrange(fld.p) for _ in range(4 * (m + 1))), fld)


def structured_tensor(rng, m, fld, kind):
    """Tensors biased toward the rank ≤ 2 strata: sums of two rank-ones, tangent (W-state) shapes."""
    def vec(n):
        return [fld.random_element(rng, 10) for _ in range(n)]

    if kind == "two-rank-one":
        return Tensor222n.rank_one(vec(2), vec(2), vec(m + 1), fld) + Tensor222n.rank_one(vec(2), vec(2), vec(m + 1), fld)
    if kind == "tangent":
        u, v, w = vec(2), vec(2), vec(m + 1)
        du, dv, dw = vec(2), vec(2), vec(m + 1)
        return (Tensor222n.rank_one(du, v, w, fld) + Tensor222n.rank_one(u, dv, w, fld)
                + Tensor222n.rank_one(u, v, dw, fld))
    return random_tensor(rng, m, fld)


def oracle_comparison(m, fld, trials=None, seed=0):
    """
    Run oracle_agrees exhaustively (trials None) or on sampled tensors.

    Returns:
        dict: counts and the first disagreements
    """
    table = rank_one_table(m, fld)
    kinds = ("uniform", "two-rank-one", "tangent")
    if trials is None:
        source = (Tensor222n(m, data, fld) for data in product(range(fld.p), repeat=4 * (m + 1)))
    else:
        source = (structured_tensor(trial_rng(seed, "rank-oracle", i), m, fld, kinds[i % 3]) for i in range(trials))
    checked, disagreements, extension = 0, [], 0
    counts = {}
    for t in source:
        ok, decision, verdict = oracle_agrees(t, table)
        checked += 1
        counts[decision.kind] = counts.get(decision.kind, 0) + 1
        if decision.witness_field == WITNESS_EXTENSION and decision.kind == RANK_TWO:
            extension += 1
        if not ok and len(disagreements) < 10:
            disagreements.append({"tensor": t.to_json(), "decision": decision.to_json(), "oracle": verdict})
    logger.info(f"Rank oracle over {fld.name}, 2x2x{m + 1}: {checked} tensors, {len(disagreements)} disagreements")
    return {
        "field": fld.name,
        "m": m,
        "checked": checked,
        "counts": dict(sorted(counts.items())),
        "extension_rechecks": extension,
        "disagreements": disagreements,
        "clean": not disagreements,
    }


# ---------------------------------------------------------------------------
# Secant spans
# ---------------------------------------------------------------------------

def span_rank(tensors):
    if not tensors:
        return 0
    fld = tensors[0].field
    return matrix_rank(Matrix([list(t.data) for t in tensors], fld))


def secant_span_meets_subspace(p, q, subspace):
    """span{p, q} ∩ span(subspace) ≠ 0, decided by ranks."""
    if p.is_zero() or q.is_zero():
        raise InjektError("secant endpoints must be nonzero")
    k = span_rank([p, q])
    w = span_rank(list(subspace))
    return span_rank([p, q] + list(subspace)) < k + w


# ---------------------------------------------------------------------------
# Rational curves in P^3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalCurveP3:
    forms: tuple

    def __post_init__(self):
        forms = tuple(self.forms)
        if len(forms) != 4:
            raise ShapeMismatch(f"a curve in P^3 needs four forms, got {len(forms)}")
        if len({f.degree for f in forms}) != 1:
            raise ShapeMismatch(f"forms of degrees {[f.degree for f in forms]}")
        if len({f.field for f in forms}) != 1:
            raise FieldMismatch("curve forms over different fields")
        if all(f.is_zero() for f in forms):
            raise DegenerateCurve("all four forms vanish")
        g = forms[0]
        for f in forms[1:]:
            g = binary_gcd(g, f)
        if g.degree > 0 and not g.is_zero():
            raise DegenerateCurve(f"the forms share the factor {g}")
        object.__setattr__(self, "forms", forms)

    @property
    def degree(self):
        return self.forms[0].degree

    @property
    def field(self):
        return self.forms[0].field

    def at(self, s):
        return tuple(f.evaluate(*s) for f in self.forms)

    def map_field(self, fld):
        return RationalCurveP3(tuple(f.map_field(fld) for f in self.forms))

    def to_json(self):
        return {"forms": [f.to_json() for f in self.forms]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(tuple(BinaryForm([scalar_from_json(c) for c in f]) for f in data["forms"]))
        except (KeyError, TypeError) as exc:
            raise InjektError(f"malformed curve JSON: {exc}") from exc


def twisted_cubic():
    return RationalCurveP3(tuple(BinaryForm.monomial(3, i) for i in range(4)))


def quintic_curve():
    """(s⁵, s⁴t + s³t², s²t³ + st⁴, t⁵)"""
    forms = []
    for form in QUINTIC_FORMS:
        coeffs = [0] * 6
        for (e0, e1), c in form.items():
            coeffs[e1] = c
        forms.append(BinaryForm(coeffs))
    return RationalCurveP3(tuple(forms))


def point_on_curve(c, p):
    """Some [s0:s1] has c(s) ∝ p: the 2×2 minors of [c(s) | p] share a root."""
    fld = c.field
    p = [fld(x) for x in p]
    if not any(p):
        raise InjektError("the zero vector is not a point")
    g = None
    for i, j in combinations(range(4), 2):
        minor = c.forms[i] * p[j] - c.forms[j] * p[i]
        if minor.is_zero():
            continue
        g = minor if g is None else binary_gcd(g, minor)
    if g is None:
        return True
    return g.degree >= 1


def _complement_functionals(p, fld):
    return nullspace(Matrix([list(p)], fld, 4))


def _divide_by_diagonal(big_f, d):
    """G with F = (s0 t1 - s1 t0)·G, coefficient arrays indexed [s-index][t-index]."""
    n = d - 1
    zero = big_f[0][0] * 0
    g = [[zero] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(1, d + 1):
            g[i][j - 1] = big_f[i][j] + (g[i - 1][j] if i >= 1 and j <= n else zero)
    # the remaining coefficients must match exactly
    for i in range(d + 1):
        for j in range(d + 1):
            expect = (g[i][j - 1] if i <= n and j >= 1 else zero) - (g[i - 1][j] if i >= 1 and j <= n else zero)
            if expect != big_f[i][j]:
                raise InjektError("secant form is not divisible by the diagonal")
    return g


def secant_forms(c, p):
    """
    The three bihomogeneous forms cutting out pairs (s, t) whose secant passes
    through p, with the diagonal divided out once.

    Returns:
        list: coefficient arrays G[i][j] of s0^(n-i) s1^i t0^(n-j) t1^j, n = deg c - 1
    """
    fld = c.field
    d = c.degree
    funcs = _complement_functionals(p, fld)
    a = []
    for ell in funcs:
        coeffs = [sum((ell[k] * c.forms[k].coeffs[i] for k in range(4)), fld.zero) for i in range(d + 1)]
        a.append(coeffs)
    if matrix_rank(Matrix(a, fld, d + 1)) < 3:
        raise DegenerateCurve(f"the curve lies in a plane through {[scalar_to_json(x) for x in p]}")
    out = []
    for x, y in combinations(range(3), 2):
        big_f = [[a[x][i] * a[y][j] - a[y][i] * a[x][j] for j in range(d + 1)] for i in range(d + 1)]
        out.append(_divide_by_diagonal(big_f, d))
    return out


def _specialize(g, s, fld):
    """G(s, ·) as a binary form in t."""
    n = len(g) - 1
    s0, s1 = fld(s[0]), fld(s[1])
    return BinaryForm(
        [sum((g[i][j] * s0 ** (n - i) * s1 ** i for i in range(n + 1)), fld.zero) for j in range(n + 1)], fld
    )


def _resultant_in_s(g1, g2, fld):
    """Res_t(G1(s, ·), G2(s, ·)) as a binary form in s, by interpolation."""
    n = len(g1) - 1
    e = 2 * n * n
    xs = list(range(e + 1))
    ys = [binary_resultant(_specialize(g1, (1, x), fld), _specialize(g2, (1, x), fld)) for x in xs]
    coeffs = interpolate(xs, ys, fld)
    return BinaryForm(list(coeffs) + [fld.zero] * (e + 1 - len(coeffs)), fld)


def _candidate_form(gs, fld):
    """gcd of the nonzero pairwise resultants, or None when all vanish."""
    h = None
    for g1, g2 in combinations(gs, 2):
        r = _resultant_in_s(g1, g2, fld)
        if r.is_zero():
            continue
        h = r if h is None else binary_gcd(h, r)
    return h


def _t_gcd(gs, s, fld):
    g = None
    for form in (_specialize(x, s, fld) for x in gs):
        if form.is_zero():
            continue
        g = form if g is None else binary_gcd(g, form)
    return g


def _same_point(s, t):
    return s[0] * t[1] == s[1] * t[0]


def _verify_secant(c, p, s, t):
    fld = c.field
    cs, ct = c.at(s), c.at(t)
    pair = matrix_rank(Matrix([list(cs), list(ct)], fld, 4))
    return pair == 2 and matrix_rank(Matrix([list(cs), list(ct), list(p)], fld, 4)) == 2


@dataclass
class SecantResult:
    verdict: str
    mode: str
    witness: tuple = None
    evidence: list = dc_field(default_factory=list)

    def to_json(self):
        data = {"verdict": self.verdict, "mode": self.mode, "evidence": self.evidence}
        if self.witness is not None:
            data["witness"] = {"s": [scalar_to_json(x) for x in self.witness[0]],
                               "t": [scalar_to_json(x) for x in self.witness[1]]}
        return data


def _fallback_probes(fld):
    return [(fld.one, fld.zero)] + [(fld(k), fld.one) for k in range(12)]


def _rational_search(c, p, gs):
    """Off-diagonal common roots with both parameters rational."""
    fld = c.field
    h = _candidate_form(gs, fld)
    if h is None:
        candidates = _fallback_probes(fld)
    else:
        candidates = [root for root, _ in binary_rational_roots(h).roots]
    for s in candidates:
        g = _t_gcd(gs, s, fld)
        if g is None:
            ts = [t for t in _fallback_probes(fld) if not _same_point(s, t)]
        else:
            ts = [t for t, _ in binary_rational_roots(g).roots if not _same_point(s, t)]
        for t in ts:
            if _verify_secant(c, p, s, t):
                return s, t
    return None


def _analyse_prime(gs_q, fld):
    """
    One prime's verdict on the reduced system.

    Returns:
        str: "positive" (an off-diagonal common root over the algebraic closure
        with s in F_p), "negative" (every common root lies in F_p and is
        diagonal) or "inconclusive"
    """
    gs = [[[fld(x) for x in row] for row in g] for g in gs_q]
    h = _candidate_form(gs, fld)
    if h is None:
        for s in _fallback_probes(fld):
            g = _t_gcd(gs, s, fld)
            if g is None or any(not _same_point(s, t) for t, _ in binary_rational_roots(g).roots):
                return "positive"
        return "inconclusive"
    roots = binary_rational_roots(h)
    for s, _ in roots.roots:
        g = _t_gcd(gs, s, fld)
        if g is None:
            return "positive"
        if g.degree == 0:
            continue
        split = binary_rational_roots(g)
        if split.residual.degree > 0 or any(not _same_point(s, t) for t, _ in split.roots):
            return "positive"
    return "negative" if roots.residual.degree == 0 else "inconclusive"


def _reduces_well(c, p, gs, q):
    for f in c.forms:
        for x in f.coeffs:
            if x.denominator % q == 0:
                return False
    if any(x.denominator % q == 0 for x in p):
        return False
    if all(x.numerator % q == 0 for x in p):
        return False
    for g in gs:
        for row in g:
            if any(x.denominator % q == 0 for x in row):
                return False
    return True


def point_on_secant(c, p, mode=MODE_RATIONAL):
    """
    Decide whether p lies on a line through two distinct points of the curve.

    The rational mode looks for an exact rational witness pair (s, t) and
    answers NoSecantFound when none exists. The modular mode reduces the
    system modulo primes above 10^4: any prime with an off-diagonal common
    root gives OnHonestSecant, three primes with only diagonal roots give
    NotOnSecant.
    """
    if c.field != QQ:
        raise FieldMismatch("secant tests take curves over QQ")
    p = tuple(QQ(x) for x in p)
    if len(p) != 4 or not any(p):
        raise InjektError("p must be a nonzero vector of length 4")
    if point_on_curve(c, p):
        return SecantResult(ON_CURVE, mode)
    gs = secant_forms(c, p)
    if mode == MODE_RATIONAL:
        witness = _rational_search(c, p, gs)
        if witness is None:
            return SecantResult(NO_SECANT_FOUND, mode, evidence=["no rational off-diagonal common root"])
        return SecantResult(ON_HONEST_SECANT, mode, witness)
    if mode != MODE_MODULAR:
        raise InjektError(f"unknown secant mode {mode!r}")
    evidence, negatives = [], 0
    q = EVIDENCE_PRIME_START
    tried = 0
    while tried < MAX_EVIDENCE_PRIMES:
        q = primes_above(q + 1, 1)[0]
        if not _reduces_well(c, p, gs, q):
            continue
        tried += 1
        verdict = _analyse_prime(gs, prime_field(q))
        evidence.append({"prime": q, "verdict": verdict})
        if verdict == "positive":
            return SecantResult(ON_HONEST_SECANT, mode, evidence=evidence)
        if tried <= DEFAULT_EVIDENCE_PRIMES and verdict == "negative":
            negatives += 1
            if negatives == DEFAULT_EVIDENCE_PRIMES:
                return SecantResult(NOT_ON_SECANT, mode, evidence=evidence)
    logger.warning(f"Secant test for {[scalar_to_json(x) for x in p]} stayed inconclusive over {tried} primes")
    return SecantResult(NO_SECANT_FOUND, mode, evidence=evidence)


def secant_sweep(c, points, mode=MODE_MODULAR):
    """point_on_secant for many points; returns verdict counts and the results."""
    results = [point_on_secant(c, pt, mode) for pt in points]
    counts = {}
    for r in results:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    return counts, results


# ---------------------------------------------------------------------------
# Secant certificates for specific examples
# ---------------------------------------------------------------------------

def in_wps2233_secant_locus(cubic, conic):
    """
    [v ⊕ w] lies on the secant locus of the image of P(2,2,3,3) by O(6) iff
    each nonzero component lies on the secant locus of its rational normal curve.
    """
    if cubic.degree != 3 or conic.degree != 2:
        raise ShapeMismatch("expected a binary cubic and a binary conic")
    if cubic.is_zero() and conic.is_zero():
        raise InjektError("the zero vector is not a point")
    cubic_ok = cubic.is_zero() or binary_form_rank(cubic) <= 2
    conic_ok = conic.is_zero() or binary_form_rank(conic) <= 2
    return cubic_ok and conic_ok


def wps2233_point_outside_secant(cubic=None, conic=None):
    """The projection centre v1·v2² ⊕ 0 misses the secant locus (default basis e0, e1)."""
    cubic = cubic if cubic is not None else BinaryForm([0, 0, 1, 0])
    conic = conic if conic is not None else BinaryForm([0, 0, 0])
    outside = not in_wps2233_secant_locus(cubic, conic)
    logger.debug(f"wps(2,2,3,3) certificate for {cubic} + {conic}: outside={outside}")
    return outside


def _sym3_coordinates(sections, shape):
    """Express each section as a functional on cubic forms in T0, T1, T2."""
    coefficients = chow_veronese_sections(2, (1, 2))
    monos = exponents_of_degree(3, 3)
    polys = [coefficients[t] for t in monos]
    keys = sorted({e for p in polys for e in p.terms})
    basis = Matrix([[p.terms.get(k, 0) for p in polys] for k in keys], QQ, len(polys))
    rows = []
    for s in sections:
        if s.shape != shape:
            raise ShapeMismatch("sections must live on P2xP2")
        lam = solve(basis, [s.terms.get(k, 0) for k in keys])
        if lam is None or any(k not in keys for k in s.terms):
            raise InjektError("section is not a linear image of the cubic coefficients")
        rows.append(lam)
    return Matrix(rows, QQ, len(polys)), monos


def tangential_p2p2_center():
    """
    The kernel of the projection realized by the tangential P2xP2 sections.

    Returns:
        dict: T-exponent tuple to coefficient of the cubic form spanning the kernel
    """
    m = build_tangential_p2p2()
    functionals, monos = _sym3_coordinates(m.sections, m.source.shape)
    kernel = nullspace(functionals)
    if len(kernel) != 1:
        raise InjektError(f"projection centre has dimension {len(kernel)}")
    vec = kernel[0]
    lead = next(x for x in vec if x)
    return {t: x / lead for t, x in zip(monos, vec) if x}


def _cubic_vector(linear, square):
    """Coefficient vector of ℓ·m² in the lex-descending cubic monomial basis."""
    monos = exponents_of_degree(3, 3)
    coeffs = {}
    for i, a in enumerate(linear):
        for j, b in enumerate(square):
            for k, c in enumerate(square):
                key = [0, 0, 0]
                key[i] += 1
                key[j] += 1
                key[k] += 1
                coeffs[tuple(key)] = coeffs.get(tuple(key), 0) + a * b * c
    return [QQ(coeffs.get(t, 0)) for t in monos]


def tangential_p2p2_secant_samples(trials, seed=0, height=20):
    """
    Sample pairs of points ℓ·m² of the tangential variety and check the centre
    is never in their span.

    Returns:
        dict: trials, violations with witnesses, clean flag
    """
    center = tangential_p2p2_center()
    monos = exponents_of_degree(3, 3)
    cvec = [center.get(t, QQ.zero) for t in monos]
    violations = []
    for i in range(trials):
        rng = trial_rng(seed, "tangential-secant", i)
        pts = []
        for _ in range(2):
            linear = [QQ.random_element(rng, height) for _ in range(3)]
            square = [QQ.random_element(rng, height) for _ in range(3)]
            if not any(linear) or not any(square):
                linear, square = [1, 0, 0], [0, 1, 0]
            pts.append(_cubic_vector(linear, square))
        base = matrix_rank(Matrix(pts, QQ, 10))
        if matrix_rank(Matrix(pts + [cvec], QQ, 10)) == base:
            violations.append({"trial": i, "points": [[scalar_to_json(x) for x in v] for v in pts]})
    logger.info(f"Tangential P2xP2 centre vs {trials} sampled secants: {len(violations)} violations")
    return {"trials": trials, "seed": seed, "violations": violations, "clean": not violations}
