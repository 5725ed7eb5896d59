# binary_forms.py
"""
Binary forms f(s0, s1) = Σ c_i s0^(d-i) s1^i over ℚ or F_p.

Dehomogenizing at s0 = 1 turns the coefficient list into a polynomial in
t = s1/s0 with ascending coefficients, so most work happens on dense
univariate lists. A root t of f(1, t) is the projective point [1 : t].
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from exactalg import (
    QQ,
    FieldMismatch,
    InjektError,
    Matrix,
    Polynomial,
    ShapeMismatch,
    UnsupportedDegree,
    determinant,
    is_probable_prime,
    nullspace,
    prime_field,
    scalar_to_json,
)

logger = logging.getLogger(__name__)

MAX_RANK_DEGREE = 8
HENSEL_START_PRIME = 10007


# ---------------------------------------------------------------------------
# Dense univariate helpers (ascending coefficient lists)
# ---------------------------------------------------------------------------

def utrim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def udeg(a):
    return len(utrim(a)) - 1


def uadd(a, b, field):
    n = max(len(a), len(b))
    zero = field.zero
    return utrim([(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)])


def usub(a, b, field):
    return uadd(a, [-x for x in b], field)


def umul(a, b, field):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return utrim(out)


def uscale(a, c):
    return utrim([x * c for x in a])


def udivmod(a, b, field):
    """Quotient and remainder of a by b (b nonzero)."""
    a, b = utrim(a), utrim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(a) < len(b):
        return [], a
    inv = field.one / b[-1]
    rem = list(a)
    quot = [field.zero] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        coef = rem[k + len(b) - 1] * inv
        quot[k] = coef
        if coef:
            for j, y in enumerate(b):
                rem[k + j] = rem[k + j] - coef * y
    return utrim(quot), utrim(rem[:len(b) - 1])


def umonic(a, field):
    a = utrim(a)
    if not a:
        return a
    return uscale(a, field.one / a[-1])


def ugcd(a, b, field):
    """Monic gcd (the zero polynomial when both inputs vanish)."""
    a, b = utrim(a), utrim(b)
    while b:
        a, b = b, udivmod(a, b, field)[1]
    return umonic(a, field)


def uderiv(a, field):
    return utrim([field(i) * a[i] for i in range(1, len(a))])


def ueval(a, x, field):
    acc = field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def upowmod(base, exponent, modulus, field):
    result = [field.one]
    base = udivmod(base, modulus, field)[1]
    while exponent:
        if exponent & 1:
            result = udivmod(umul(result, base, field), modulus, field)[1]
        base = udivmod(umul(base, base, field), modulus, field)[1]
        exponent >>= 1
    return result


def interpolate(xs, ys, field):
    """Newton interpolation through (xs[i], ys[i]); returns ascending coefficients."""
    n = len(xs)
    coef = [field(y) for y in ys]
    xs = [field(x) for x in xs]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [coef[-1]] if coef else []
    for i in range(n - 2, -1, -1):
        poly = uadd(umul(poly, [-xs[i], field.one], field), [coef[i]], field)
    return utrim(poly)


# ---------------------------------------------------------------------------
# Binary forms
# ---------------------------------------------------------------------------

class BinaryForm:
    """A binary form of formal degree len(coeffs) - 1."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field=QQ):
        if not coeffs:
            raise ShapeMismatch("a binary form needs at least one coefficient")
        self.field = field
        self.coeffs = tuple(field(c) for c in coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @classmethod
    def monomial(cls, degree, i, coeff=1, field=QQ):
        """coeff · s0^(degree-i) s1^i"""
        coeffs = [0] * (degree + 1)
        coeffs[i] = coeff
        return cls(coeffs, field)

    @classmethod
    def linear_power(cls, a, b, degree, field=QQ):
        """(a s0 + b s1)^degree"""
        a, b = field(a), field(b)
        return cls([field(comb(degree, i)) * a ** (degree - i) * b ** i for i in range(degree + 1)], field)

    @classmethod
    def vanishing_at(cls, root, field=QQ):
        """The linear form b s0 - a s1, zero at [a : b]."""
        a, b = root
        return cls([field(b), -field(a)], field)

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other):
        if other.field != self.field:
            raise FieldMismatch(f"binary forms over {self.field} and {other.field}")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ShapeMismatch(f"cannot add forms of degree {self.degree} and {other.degree}")
        return BinaryForm([a + b for a, b in zip(self.coeffs, other.coeffs)], self.field)

    def __neg__(self):
        return BinaryForm([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BinaryForm):
            c = self.field(other)
            return BinaryForm([x * c for x in self.coeffs], self.field)
        self._check(other)
        out = [self.field.zero] * (self.degree + other.degree + 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + x * y
        return BinaryForm(out, self.field)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = BinaryForm([1], self.field)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.field))

    def evaluate(self, s0, s1):
        s0, s1 = self.field(s0), self.field(s1)
        d = self.degree
        total = self.field.zero
        for i, c in enumerate(self.coeffs):
            if c:
                total = total + c * s0 ** (d - i) * s1 ** i
        return total

    def derivative_s0(self):
        d = self.degree
        if d == 0:
            return BinaryForm([0], self.field)
        return BinaryForm([self.field(d - i) * self.coeffs[i] for i in range(d)], self.field)

    def derivative_s1(self):
        d = self.degree
        if d == 0:
            return BinaryForm([0], self.field)
        return BinaryForm([self.field(i + 1) * self.coeffs[i + 1] for i in range(d)], self.field)

    def dehomogenize(self):
        """f(1, t) as an ascending list in t."""
        return utrim(self.coeffs)

    def map_field(self, field):
        return BinaryForm([field(c) for c in self.coeffs], field)

    def to_polynomial(self):
        d = self.degree
        terms = {((d - i, i),): c for i, c in enumerate(self.coeffs) if c}
        return Polynomial((2,), terms, self.field)

    @classmethod
    def from_polynomial(cls, p):
        if p.shape != (2,):
            raise ShapeMismatch(f"expected a polynomial in two variables, got shape {p.shape}")
        degrees = {sum(e[0]) for e in p.terms}
        if len(degrees) > 1:
            raise InjektError("polynomial is not homogeneous")
        d = degrees.pop() if degrees else 0
        coeffs = [p.field.zero] * (d + 1)
        for exps, c in p.terms.items():
            coeffs[exps[0][1]] = c
        return cls(coeffs, p.field)

    def to_json(self):
        return [scalar_to_json(c) for c in self.coeffs]

    def __repr__(self):
        return f"BinaryForm({self.to_polynomial().to_str([['s0', 's1']])})"


def _pad(coeffs, degree, field):
    coeffs = list(coeffs)
    return coeffs + [field.zero] * (degree + 1 - len(coeffs))


def binary_divide(f, g):
    """Exact quotient f / g of binary forms; raises when g does not divide f."""
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero form")
    q, r = udivmod(f.dehomogenize(), g.dehomogenize(), f.field)
    e = f.degree - g.degree
    if r or e < 0 or len(q) > e + 1:
        raise InjektError(f"{g} does not divide {f}")
    return BinaryForm(_pad(q, e, f.field), f.field)


def _s0_power(f):
    """Largest e with s0^e | f, i.e. the number of trailing zero coefficients."""
    e = 0
    for c in reversed(f.coeffs):
        if c:
            break
        e += 1
    return e


def binary_gcd(f, g):
    """Homogeneous gcd, normalized so its dehomogenized leading coefficient is 1."""
    f._check(g)
    field = f.field
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    common = min(_s0_power(f), _s0_power(g))
    h = ugcd(f.dehomogenize(), g.dehomogenize(), field)
    return BinaryForm(list(h) + [field.zero] * common, field)


def binary_squarefree_part(f):
    field = f.field
    if f.is_zero():
        raise InjektError("the zero form has no squarefree part")
    u = f.dehomogenize()
    sq = udivmod(u, ugcd(u, uderiv(u, field), field), field)[0]
    extra = 1 if _s0_power(f) else 0
    return BinaryForm(list(sq) + [field.zero] * extra, field)


def binary_resultant(f, g):
    """Determinant of the Sylvester matrix built from the formal degrees of f and g."""
    f._check(g)
    d, e = f.degree, g.degree
    n = d + e
    if n == 0:
        return f.field.one
    rows = []
    for i in range(e):
        rows.append([0] * i + list(f.coeffs) + [0] * (n - d - 1 - i))
    for i in range(d):
        rows.append([0] * i + list(g.coeffs) + [0] * (n - e - 1 - i))
    return determinant(Matrix(rows, f.field, n))


def binary_discriminant(f):
    """(-1)^(d(d-1)/2) Res(∂f/∂s0, ∂f/∂s1) / d^(d-2); b² - 4ac for a quadratic."""
    d = f.degree
    if d < 2:
        raise InjektError("discriminant needs degree at least 2")
    field = f.field
    res = binary_resultant(f.derivative_s0(), f.derivative_s1())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    if d == 2:
        return field(sign) * res
    return field(sign) * res / field(d) ** (d - 2)


def is_squarefree(f):
    """A nonzero form is squarefree iff its partial derivatives share no root."""
    if f.degree <= 1:
        return not f.is_zero()
    return bool(binary_resultant(f.derivative_s0(), f.derivative_s1()))


def catalecticant(f, r):
    """The (d - r + 1) × (r + 1) Hankel matrix of the scaled coefficients c_i / C(d, i)."""
    field = f.field
    d = f.degree
    a = [f.coeffs[i] / field(comb(d, i)) for i in range(d + 1)]
    rows = [[a[i + j] for j in range(r + 1)] for i in range(d - r + 1)]
    return Matrix(rows, field, r + 1)


@dataclass(frozen=True)
class ApolarCertificate:
    rank: int
    generator_degree: int
    generator: object
    squarefree: bool


def apolar_certificate(f):
    """
    Waring rank of a binary form together with the apolar form that decides it.

    The first catalecticant with a kernel gives generator degree r. The rank is
    r when the kernel holds a squarefree form, and d - r + 2 otherwise.
    """
    if f.is_zero():
        raise InjektError("the zero form has no Waring rank")
    d = f.degree
    if d > MAX_RANK_DEGREE:
        raise UnsupportedDegree(f"binary_form_rank supports degree <= {MAX_RANK_DEGREE}, got {d}")
    if f.field.characteristic and f.field.characteristic <= d:
        raise UnsupportedDegree(f"characteristic {f.field.characteristic} does not exceed degree {d}")
    for r in range(1, d + 2):
        if d - r + 1 <= 0:
            # no rows: every form of degree r is apolar, and a squarefree one exists
            return ApolarCertificate(r, r, None, True)
        kernel = nullspace(catalecticant(f, r))
        if not kernel:
            continue
        if len(kernel) >= 2:
            return ApolarCertificate(r, r, [BinaryForm(v, f.field) for v in kernel], True)
        g = BinaryForm(kernel[0], f.field)
        if is_squarefree(g):
            return ApolarCertificate(r, r, g, True)
        return ApolarCertificate(d - r + 2, r, g, False)
    raise InjektError(f"no apolar form found for {f}")


def binary_form_rank(f):
    """Waring rank over the algebraic closure, degree at most 8."""
    return apolar_certificate(f).rank


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootFactorization:
    """
    Roots in the base field with multiplicities, and what is left over.

    ``roots`` holds ((a, b), multiplicity) with Π (b s0 - a s1)^mult · residual = f.
    """

    roots: tuple
    residual: BinaryForm

    @property
    def residual_degree(self):
        return self.residual.degree


def _normalize_rational_root(a, b):
    a, b = Fraction(a), Fraction(b)
    scale = a.denominator * b.denominator
    ia, ib = int(a * scale), int(b * scale)
    g = gcd(ia, ib) or 1
    ia, ib = ia // g, ib // g
    if ib < 0 or (ib == 0 and ia < 0):
        ia, ib = -ia, -ib
    return Fraction(ia), Fraction(ib)


def _normalize_root(a, b, field):
    if field == QQ:
        return _normalize_rational_root(a, b)
    if b:
        return a / b, field.one
    return field.one, field.zero


def _fp_linear_roots(u, field, rng):
    """Distinct roots in F_p of a nonzero ascending polynomial."""
    u = umonic(u, field)
    if len(u) <= 1:
        return []
    x = [field.zero, field.one]
    xp = upowmod(x, field.p, u, field)
    g = ugcd(u, usub(xp, x, field), field)
    return _split_linear(g, field, rng)


def _split_linear(g, field, rng):
    deg = len(g) - 1
    if deg <= 0:
        return []
    if deg == 1:
        return [-g[0] / g[1]]
    exponent = (field.p - 1) // 2
    while True:
        delta = field(rng.randrange(field.p))
        h = usub(upowmod([delta, field.one], exponent, g, field), [field.one], field)
        d = ugcd(g, h, field)
        if 0 < len(d) - 1 < deg:
            other = udivmod(g, d, field)[0]
            return _split_linear(d, field, rng) + _split_linear(umonic(other, field), field, rng)


def _integer_poly(u):
    """Primitive integer multiple of a rational ascending polynomial."""
    den = 1
    for c in u:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in u]
    content = 0
    for c in ints:
        content = gcd(content, c)
    return [c // content for c in ints]


def _good_prime(h):
    field = None
    p = HENSEL_START_PRIME
    while True:
        if is_probable_prime(p) and h[-1] % p and h[0] % p:
            field = prime_field(p)
            hp = [field(c) for c in h]
            if len(ugcd(hp, uderiv(hp, field), field)) == 1:
                return field
        p += 2


def _hensel_lift(h, root, p, bound):
    """Newton-lift a simple root mod p of integer poly h until the modulus exceeds bound."""
    dh = [i * h[i] for i in range(1, len(h))]
    r, modulus = root, p

    def ev(poly, x, n):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % n
        return acc

    while modulus <= bound:
        modulus = modulus * modulus
        inv = pow(ev(dh, r, modulus), -1, modulus)
        r = (r - ev(h, r, modulus) * inv) % modulus
    return r, modulus


def _rational_reconstruct(r, modulus, num_bound, den_bound):
    r0, r1 = modulus, r % modulus
    t0, t1 = 0, 1
    while r1 > num_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0:
        return None
    n, m = r1, t1
    if m < 0:
        n, m = -n, -m
    if m > den_bound or gcd(n, m) != 1:
        return None
    return Fraction(n, m)


def _rational_roots_of(u):
    """Rational roots of a rational ascending polynomial with nonzero constant term."""
    sq = udivmod(u, ugcd(u, uderiv(u, QQ), QQ), QQ)[0]
    if len(sq) <= 1:
        return []
    h = _integer_poly(sq)
    if len(h) == 2:
        return [Fraction(-h[0], h[1])]
    field = _good_prime(h)
    rng = random.Random(field.p)
    residues = _fp_linear_roots([field(c) for c in h], field, rng)
    bound = 2 * abs(h[0]) * abs(h[-1])
    found = []
    for res in residues:
        lifted, modulus = _hensel_lift(h, res.value, field.p, bound)
        t = _rational_reconstruct(lifted, modulus, abs(h[0]), abs(h[-1]))
        if t is not None and ueval(sq, t, QQ) == 0:
            found.append(t)
    logger.debug(f"Rational roots via F_{field.p}: {len(found)} of {len(residues)} residues lift")
    return found


def binary_rational_roots(f):
    """
    Roots of f in the base field, with multiplicities and the residual factor.

    Over ℚ the roots come back as coprime integer pairs (a, b) with b > 0 (or
    [1:0]); over F_p as (t, 1) or (1, 0). Sorted by multiplicity, highest first.
    """
    if f.is_zero():
        raise InjektError("the zero form has every point as a root")
    field = f.field
    roots = []
    lead = 0
    for c in f.coeffs:
        if c:
            break
        lead += 1
    trail = _s0_power(f)
    if lead:
        roots.append((_normalize_root(field.one, field.zero, field), lead))
    if trail:
        roots.append((_normalize_root(field.zero, field.one, field), trail))
    core = list(f.coeffs[lead:len(f.coeffs) - trail])
    if len(core) > 1:
        if field == QQ:
            candidates = _rational_roots_of(core)
        else:
            candidates = _fp_linear_roots(core, field, random.Random(field.p))
        for t in candidates:
            mult = 0
            divisor = [-t, field.one]
            while True:
                q, r = udivmod(core, divisor, field)
                if r:
                    break
                core = q
                mult += 1
            if mult:
                roots.append((_normalize_root(field.one, t, field), mult))
    roots.sort(key=lambda item: (-item[1], _root_sort_key(item[0])))
    product = BinaryForm([1], field)
    for root, mult in roots:
        product = product * BinaryForm.vanishing_at(root, field) ** mult
    residual = binary_divide(f, product)
    return RootFactorization(tuple(roots), residual)


def _root_sort_key(root):
    a, b = root
    return tuple(int(x) if not isinstance(x, Fraction) else x for x in (b, a))


def splits_completely(f):
    """True when every root of f lies in the base field."""
    return binary_rational_roots(f).residual.degree == 0
