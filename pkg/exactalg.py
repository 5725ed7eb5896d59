# exactalg.py
"""
Exact scalars, block-graded sparse polynomials and dense linear algebra.

Scalars are ``fractions.Fraction`` over ℚ, ``FpElement`` over a prime field and
``Fp2Element`` over its quadratic extension. Field descriptors (``QQ``,
``PrimeField(p)``, ``QuadraticExtensionField(p)``) convert raw values and know
how to sample, serialize and take square roots.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm

logger = logging.getLogger(__name__)


class InjektError(ValueError):
    """Base class for every error raised by the library."""


class FieldMismatch(InjektError):
    pass


class ShapeMismatch(InjektError):
    pass


class NotHomogeneous(InjektError):
    def __init__(self, message, terms=()):
        super().__init__(message)
        self.terms = tuple(terms)


class UnsupportedDegree(InjektError):
    pass


# ---------------------------------------------------------------------------
# Primes
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n):
    """Miller-Rabin with fixed bases; deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_above(start, count, modulus=1, residue=0):
    """Return the `count` smallest primes > start with p ≡ residue (mod modulus)."""
    found = []
    n = start + 1
    while len(found) < count:
        if n % modulus == residue % modulus and is_probable_prime(n):
            found.append(n)
        n += 1
    return found


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

class RationalField:
    """The field ℚ, with elements represented as ``Fraction``."""

    name = "QQ"
    characteristic = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, bool):
            raise FieldMismatch(f"Cannot convert {value!r} to a rational")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise InjektError(f"Invalid rational literal {value!r}") from exc
        raise FieldMismatch(f"Cannot convert {value!r} ({type(value).__name__}) to a rational")

    def is_element(self, value):
        return isinstance(value, (Fraction, int)) and not isinstance(value, bool)

    def sqrt(self, a):
        """Exact rational square root, or None."""
        a = self(a)
        if a < 0:
            return None
        n, d = a.numerator, a.denominator
        rn, rd = isqrt(n), isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return None

    def random_element(self, rng, height):
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    def to_json(self, a):
        return scalar_to_json(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class FpElement:
    """An element of F_p, reduced to [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value, p):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p} element combined with F_{other.p} element")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise FieldMismatch(f"{other} has no image in F_{self.p}")
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpElement(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return FpElement(o * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __pow__(self, exponent):
        if exponent < 0:
            if self.value == 0:
                raise ZeroDivisionError(f"division by zero in F_{self.p}")
            return FpElement(pow(pow(self.value, -1, self.p), -exponent, self.p), self.p)
        return FpElement(pow(self.value, exponent, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"F{self.p}({self.value})"


class PrimeField:
    """The prime field F_p for an odd prime p."""

    characteristic = None

    def __init__(self, p):
        p = int(p)
        if p < 3 or not is_probable_prime(p):
            raise InjektError(f"{p} is not an odd prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"
        self.zero = FpElement(0, p)
        self.one = FpElement(1, p)

    def __call__(self, value):
        if isinstance(value, FpElement):
            if value.p != self.p:
                raise FieldMismatch(f"F_{value.p} element used in F_{self.p}")
            return value
        if isinstance(value, bool):
            raise FieldMismatch(f"Cannot convert {value!r} to F_{self.p}")
        if isinstance(value, int):
            return FpElement(value, self.p)
        if isinstance(value, str):
            value = QQ(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise FieldMismatch(f"{value} has no image in F_{self.p}")
            return FpElement(value.numerator * pow(value.denominator, -1, self.p), self.p)
        raise FieldMismatch(f"Cannot convert {value!r} ({type(value).__name__}) to F_{self.p}")

    def is_element(self, value):
        return (isinstance(value, FpElement) and value.p == self.p) or (
            isinstance(value, int) and not isinstance(value, bool))

    def is_square(self, a):
        a = self(a)
        return a.value == 0 or pow(a.value, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a):
        """Tonelli-Shanks square root in F_p, or None for non-residues."""
        a = self(a)
        p = self.p
        if a.value == 0:
            return self.zero
        if not self.is_square(a):
            return None
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a.value, q, p), pow(a.value, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return FpElement(r, p)

    def primitive_root_of_unity(self, k):
        """An element of exact multiplicative order k (requires k | p - 1)."""
        if (self.p - 1) % k:
            raise InjektError(f"F_{self.p} has no primitive {k}-th root of unity")
        prime_factors = _prime_factors(k)
        for g in range(2, self.p):
            zeta = pow(g, (self.p - 1) // k, self.p)
            if all(pow(zeta, k // r, self.p) != 1 for r in prime_factors):
                return FpElement(zeta, self.p)
        raise InjektError(f"no primitive {k}-th root of unity found in F_{self.p}")

    def random_element(self, rng, height=None):
        return FpElement(rng.randrange(self.p), self.p)

    def to_json(self, a):
        return str(self(a).value)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return self.name


@lru_cache(maxsize=None)
def prime_field(p):
    return PrimeField(p)


def _prime_factors(n):
    factors, f = [], 2
    while f * f <= n:
        if n % f == 0:
            factors.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        factors.append(n)
    return factors


class Fp2Element:
    """a + b·ω in F_p(ω) with ω² = the field's non-residue."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a, b, field):
        p = field.p
        self.a = a % p
        self.b = b % p
        self.field = field

    def _coerce(self, other):
        if isinstance(other, Fp2Element):
            if other.field.p != self.field.p:
                raise FieldMismatch("quadratic extension elements over different primes")
            return other.a, other.b
        if isinstance(other, (int, FpElement, Fraction)):
            base = self.field.base(other)
            return base.value, 0
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Element(self.a + o[0], self.b + o[1], self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Element(self.a - o[0], self.b - o[1], self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Element(o[0] - self.a, o[1] - self.b, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.field.nonresidue
        c, d = o
        return Fp2Element(self.a * c + self.b * d * n, self.a * d + self.b * c, self.field)

    __rmul__ = __mul__

    def _inverse(self):
        p, n = self.field.p, self.field.nonresidue
        norm = (self.a * self.a - n * self.b * self.b) % p
        if norm == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        inv = pow(norm, -1, p)
        return Fp2Element(self.a * inv, -self.b * inv, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * Fp2Element(o[0], o[1], self.field)._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Fp2Element(o[0], o[1], self.field) * self._inverse()

    def __neg__(self):
        return Fp2Element(-self.a, -self.b, self.field)

    def __pow__(self, exponent):
        base = self if exponent >= 0 else self._inverse()
        result = self.field.one
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o[0] % self.field.p and self.b == o[1] % self.field.p

    def __hash__(self):
        if self.b == 0:
            return hash((self.a, self.field.p))
        return hash((self.a, self.b, self.field.p))

    def __bool__(self):
        return bool(self.a or self.b)

    def __repr__(self):
        return f"F{self.field.p}^2({self.a}+{self.b}w)"


class QuadraticExtensionField:
    """F_{p²} = F_p(ω) with ω² equal to the least quadratic non-residue."""

    def __init__(self, p):
        self.base = prime_field(p)
        self.p = self.base.p
        self.characteristic = self.p
        self.nonresidue = next(n for n in range(2, self.p) if not self.base.is_square(n))
        self.name = f"GF({self.p}^2)"
        self.zero = Fp2Element(0, 0, self)
        self.one = Fp2Element(1, 0, self)
        self.omega = Fp2Element(0, 1, self)

    def __call__(self, value):
        if isinstance(value, Fp2Element):
            if value.field.p != self.p:
                raise FieldMismatch(f"element of {value.field.name} used in {self.name}")
            return value
        return Fp2Element(self.base(value).value, 0, self)

    def is_element(self, value):
        return isinstance(value, Fp2Element) or self.base.is_element(value)

    def sqrt(self, a):
        """Square root of an element of the base field (always exists here)."""
        a = self(a)
        if a.b:
            raise InjektError("square roots are only taken of base-field elements")
        root = self.base.sqrt(a.a)
        if root is not None:
            return self(root)
        return self.omega * self(self.base.sqrt(self.base(a.a) / self.nonresidue))

    def random_element(self, rng, height=None):
        return Fp2Element(rng.randrange(self.p), rng.randrange(self.p), self)

    def to_json(self, a):
        a = self(a)
        return f"{a.a}+{a.b}w" if a.b else str(a.a)

    def elements(self):
        for a in range(self.p):
            for b in range(self.p):
                yield Fp2Element(a, b, self)

    def __eq__(self, other):
        return isinstance(other, QuadraticExtensionField) and other.p == self.p

    def __hash__(self):
        return hash(("GF2", self.p))

    def __repr__(self):
        return self.name


def field_of(value):
    """The field descriptor a scalar belongs to."""
    if isinstance(value, FpElement):
        return prime_field(value.p)
    if isinstance(value, Fp2Element):
        return value.field
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return QQ
    raise FieldMismatch(f"{value!r} is not a scalar")


def field_from_name(name):
    if name in (None, "QQ"):
        return QQ
    if name.startswith("GF(") and name.endswith(")"):
        inner = name[3:-1]
        if inner.endswith("^2"):
            return QuadraticExtensionField(int(inner[:-2]))
        return prime_field(int(inner))
    raise InjektError(f"Unknown field {name!r}")


def scalar_to_json(value):
    """Decimal "num/den" string; the denominator is omitted when it is 1."""
    if isinstance(value, FpElement):
        return str(value.value)
    if isinstance(value, Fp2Element):
        return value.field.to_json(value)
    value = QQ(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def scalar_from_json(text, field=QQ):
    if isinstance(text, int) and not isinstance(text, bool):
        return field(text)
    if not isinstance(text, str):
        raise InjektError(f"Scalars are serialized as strings, got {text!r}")
    if isinstance(field, QuadraticExtensionField) and "w" in text:
        a, _, b = text.rstrip("w").partition("+")
        return Fp2Element(int(a), int(b), field)
    return field(text)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def _term_key(exps):
    """Graded lex (highest first) inside each block, blocks in declaration order."""
    return tuple((-sum(block), tuple(-e for e in block)) for block in exps)


def _as_exponent(exps, shape):
    blocks = tuple(tuple(int(e) for e in block) for block in exps)
    if len(blocks) != len(shape) or any(len(b) != n for b, n in zip(blocks, shape)):
        raise ShapeMismatch(f"exponent {exps} does not match block shape {shape}")
    if any(e < 0 for b in blocks for e in b):
        raise InjektError(f"negative exponent in {exps}")
    return blocks


class Polynomial:
    """
    Sparse polynomial with block-structured exponents.

    ``shape`` lists the number of variables per block (n_i + 1 for a factor
    P^{n_i}, or n + 1 for a single weighted block). ``terms`` maps exponent
    vectors (a tuple of per-block tuples) to nonzero coefficients.
    """

    __slots__ = ("shape", "terms", "field")

    def __init__(self, shape, terms=None, field=QQ):
        self.shape = tuple(int(s) for s in shape)
        self.field = field
        clean = {}
        for exps, coeff in (terms or {}).items():
            key = _as_exponent(exps, self.shape)
            value = clean.get(key, field.zero) + field(coeff)
            if value:
                clean[key] = value
            else:
                clean.pop(key, None)
        self.terms = dict(sorted(clean.items(), key=lambda kv: _term_key(kv[0])))

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, shape, field=QQ):
        return cls(shape, {}, field)

    @classmethod
    def constant(cls, shape, value, field=QQ):
        exps = tuple((0,) * n for n in shape)
        return cls(shape, {exps: value}, field)

    @classmethod
    def monomial(cls, shape, exps, coeff=1, field=QQ):
        return cls(shape, {tuple(map(tuple, exps)): coeff}, field)

    @classmethod
    def variable(cls, shape, block, index, field=QQ):
        exps = [[0] * n for n in shape]
        exps[block][index] = 1
        return cls.monomial(shape, exps, 1, field)

    @classmethod
    def variables(cls, shape, field=QQ):
        """All variables, grouped per block."""
        return [[cls.variable(shape, b, i, field) for i in range(n)] for b, n in enumerate(shape)]

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other):
        if self.shape != other.shape:
            raise ShapeMismatch(f"block shapes {self.shape} and {other.shape} differ")
        if self.field != other.field:
            raise FieldMismatch(f"fields {self.field} and {other.field} differ")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.shape, self.field(other), self.field)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = terms.get(exps, self.field.zero) + c
        return Polynomial(self.shape, terms, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.shape, {e: -c for e, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.field(other)
            return Polynomial(self.shape, {e: v * c for e, v in self.terms.items()}, self.field)
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(tuple(a + b for a, b in zip(b1, b2)) for b1, b2 in zip(e1, e2))
                terms[key] = terms.get(key, self.field.zero) + c1 * c2
        return Polynomial(self.shape, terms, self.field)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if exponent < 0:
            raise InjektError("negative powers of polynomials are not supported")
        result = Polynomial.constant(self.shape, 1, self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self):
        return not self.terms

    # -- inspection ---------------------------------------------------------
    def block_degrees(self):
        """Per-term tuple of block degrees, in term order."""
        return [tuple(sum(b) for b in exps) for exps in self.terms]

    def evaluate(self, point):
        blocks = self._coerce_point(point)
        powers = {}
        total = self.field.zero
        for exps, coeff in self.terms.items():
            value = coeff
            for b, block in enumerate(exps):
                for i, e in enumerate(block):
                    if e:
                        key = (b, i, e)
                        pw = powers.get(key)
                        if pw is None:
                            pw = blocks[b][i] ** e
                            powers[key] = pw
                        value = value * pw
            total = total + value
        return total

    def _coerce_point(self, point):
        if len(point) != len(self.shape):
            raise ShapeMismatch(f"point has {len(point)} blocks, polynomial expects {len(self.shape)}")
        blocks = []
        for block, n in zip(point, self.shape):
            if len(block) != n:
                raise ShapeMismatch(f"block of length {len(block)} where {n} coordinates are expected")
            for x in block:
                if not self.field.is_element(x):
                    raise FieldMismatch(f"coordinate {x!r} is not an element of {self.field}")
            blocks.append([self.field(x) for x in block])
        return blocks

    def map_coefficients(self, field, fn=None):
        """Copy with every coefficient pushed through `fn` (default: `field`)."""
        fn = fn or field
        return Polynomial(self.shape, {e: fn(c) for e, c in self.terms.items()}, field)

    def to_str(self, names=None):
        if not self.terms:
            return "0"
        names = names or _default_names(self.shape)
        parts = []
        for exps, coeff in self.terms.items():
            factors = []
            for b, block in enumerate(exps):
                for i, e in enumerate(block):
                    if e == 1:
                        factors.append(names[b][i])
                    elif e > 1:
                        factors.append(f"{names[b][i]}^{e}")
            mono = "*".join(factors)
            c = scalar_to_json(coeff)
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            elif c == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self.to_str()})"

    # -- serialization ------------------------------------------------------
    def to_json(self):
        data = {
            "blocks": list(self.shape),
            "terms": [{"c": scalar_to_json(c), "e": [list(b) for b in e]} for e, c in self.terms.items()],
        }
        if self.field != QQ:
            data["field"] = self.field.name
        return data

    @classmethod
    def from_json(cls, data, field=None):
        try:
            field = field or field_from_name(data.get("field"))
            shape = data["blocks"]
            terms = {}
            for term in data["terms"]:
                key = tuple(tuple(b) for b in term["e"])
                if key in terms:
                    raise InjektError(f"duplicate exponent {term['e']} in polynomial")
                terms[key] = scalar_from_json(term["c"], field)
        except (KeyError, TypeError) as exc:
            raise InjektError(f"malformed polynomial JSON: {exc}") from exc
        return cls(shape, terms, field)


def _default_names(shape):
    letters = "xyzwvu"
    if len(shape) == 1:
        return [[f"x{i}" for i in range(shape[0])]]
    return [[f"{letters[b % len(letters)]}{i}" for i in range(n)] for b, n in enumerate(shape)]


def poly_eval(p, point):
    """Value of `p` at a point given per block."""
    return p.evaluate(point)


def multidegree(p, space=None):
    """
    Common degree of all terms of `p`.

    Args:
        p (Polynomial): a nonzero polynomial
        space: a space descriptor; when it is weighted the weighted degree is
            returned, otherwise the tuple of block degrees.

    Returns:
        int or tuple: the weighted degree or the multidegree vector

    Raises:
        NotHomogeneous: when two terms disagree (both terms are attached).
    """
    if p.is_zero():
        raise InjektError("the zero polynomial has no multidegree")
    weights = getattr(space, "weights", None) if getattr(space, "kind", None) == "weighted" else None
    if weights is not None and (len(p.shape) != 1 or p.shape[0] != len(weights)):
        raise ShapeMismatch(f"polynomial shape {p.shape} does not match weights {tuple(weights)}")
    first_exps, first = None, None
    for exps in p.terms:
        if weights is not None:
            deg = sum(q * e for q, e in zip(weights, exps[0]))
        else:
            deg = tuple(sum(b) for b in exps)
        if first is None:
            first_exps, first = exps, deg
        elif deg != first:
            raise NotHomogeneous(
                f"terms {first_exps} (degree {first}) and {exps} (degree {deg}) disagree",
                terms=(first_exps, exps),
            )
    return first


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

class Matrix:
    """Dense matrix of exact scalars over one field."""

    __slots__ = ("rows", "field", "ncols")

    def __init__(self, rows, field=QQ, ncols=None):
        self.field = field
        self.rows = tuple(tuple(field(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ShapeMismatch("rows of unequal length")
        self.ncols = ncols

    @property
    def nrows(self):
        return len(self.rows)

    @classmethod
    def identity(cls, n, field=QQ):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, nrows, ncols, field=QQ):
        return cls([[0] * ncols for _ in range(nrows)], field, ncols)

    def transpose(self):
        return Matrix([list(col) for col in zip(*self.rows)], self.field, self.nrows)

    def stack(self, other):
        if other.ncols != self.ncols:
            raise ShapeMismatch("cannot stack matrices with different column counts")
        return Matrix(list(self.rows) + list(other.rows), self.field, self.ncols)

    def __mul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = list(zip(*other.rows))
        zero = self.field.zero
        out = []
        for row in self.rows:
            out.append([sum((a * b for a, b in zip(row, col)), zero) for col in cols])
        return Matrix(out, self.field, other.ncols)

    def apply(self, vector):
        zero = self.field.zero
        return [sum((a * self.field(b) for a, b in zip(row, vector)), zero) for row in self.rows]

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.field == other.field and self.rows == other.rows

    def __repr__(self):
        body = "; ".join(" ".join(scalar_to_json(x) for x in row) for row in self.rows)
        return f"Matrix[{body}]"


def _integer_rows(rows):
    """Scale each rational row by the lcm of its denominators."""
    out, scales = [], []
    for row in rows:
        s = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * s) for x in row])
        scales.append(s)
    return out, scales


def _bareiss(m, ncols):
    """One-step fraction-free elimination in place. Returns (rank, sign, prev pivot)."""
    nrows = len(m)
    rank, sign, prev = 0, 1, 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
            sign = -sign
        piv = m[rank][col]
        for r in range(rank + 1, nrows):
            lead = m[r][col]
            row, prow = m[r], m[rank]
            for c in range(col + 1, ncols):
                row[c] = (row[c] * piv - lead * prow[c]) // prev
            row[col] = 0
        prev = piv
        rank += 1
    return rank, sign, prev


def row_echelon(matrix):
    """Reduced row echelon form over any field. Returns (rows, pivot columns)."""
    field = matrix.field
    m = [list(r) for r in matrix.rows]
    pivots = []
    r = 0
    for col in range(matrix.ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = field.one / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def matrix_rank(matrix):
    """Exact rank: Bareiss over ℚ, Gaussian elimination over finite fields."""
    if matrix.nrows == 0 or matrix.ncols == 0:
        return 0
    if matrix.field == QQ:
        m, _ = _integer_rows(matrix.rows)
        rank, _, _ = _bareiss(m, matrix.ncols)
        return rank
    _, pivots = row_echelon(matrix)
    return len(pivots)


def determinant(matrix):
    if matrix.nrows != matrix.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    n = matrix.nrows
    if n == 0:
        return matrix.field.one
    if matrix.field == QQ:
        m, scales = _integer_rows(matrix.rows)
        rank, sign, last = _bareiss(m, n)
        if rank < n:
            return Fraction(0)
        scale = 1
        for s in scales:
            scale *= s
        return Fraction(sign * last, scale)
    field = matrix.field
    m = [list(r) for r in matrix.rows]
    det = field.one
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            return field.zero
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det = det * m[col][col]
        inv = field.one / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def nullspace(matrix):
    """Basis of {v : M v = 0} as a list of vectors."""
    field = matrix.field
    rows, pivots = row_echelon(matrix)
    free = [c for c in range(matrix.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * matrix.ncols
        v[f] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """One solution of M x = rhs, or None when the system is inconsistent."""
    field = matrix.field
    aug = Matrix([list(r) + [field(b)] for r, b in zip(matrix.rows, rhs)], field, matrix.ncols + 1)
    rows, pivots = row_echelon(aug)
    if matrix.ncols in pivots:
        return None
    x = [field.zero] * matrix.ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][-1]
    return x

