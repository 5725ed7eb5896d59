# spaces.py
"""Source spaces (products of projective spaces, weighted projective spaces) and their points."""
import logging
import random
from dataclasses import dataclass

from exactalg import (
    QQ,
    InjektError,
    Matrix,
    ShapeMismatch,
    field_from_name,
    field_of,
    matrix_rank,
    scalar_from_json,
    scalar_to_json,
)

logger = logging.getLogger(__name__)

DEFAULT_HEIGHT = 100

# Mask characters: '0' forces a zero coordinate, '*' a nonzero one, '?' leaves it free.
ZERO, NONZERO, FREE = "0", "*", "?"


class InvalidMask(InjektError):
    pass


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    dims: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.kind == "product":
            if not self.dims or any(int(n) < 1 for n in self.dims):
                raise InjektError(f"product dims must be positive, got {self.dims}")
            object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        elif self.kind == "weighted":
            if len(self.weights) < 2 or any(int(q) < 1 for q in self.weights):
                raise InjektError(f"weights must be at least two positive integers, got {self.weights}")
            object.__setattr__(self, "weights", tuple(int(q) for q in self.weights))
        else:
            raise InjektError(f"unknown space kind {self.kind!r}")

    @classmethod
    def product(cls, *dims):
        return cls("product", dims=tuple(dims))

    @classmethod
    def weighted(cls, *weights):
        return cls("weighted", weights=tuple(weights))

    @property
    def shape(self):
        if self.kind == "product":
            return tuple(n + 1 for n in self.dims)
        return (len(self.weights),)

    @property
    def dimension(self):
        if self.kind == "product":
            return sum(self.dims)
        return len(self.weights) - 1

    @property
    def label(self):
        if self.kind == "product":
            return "x".join(f"P{n}" for n in self.dims)
        return "P(" + ",".join(str(q) for q in self.weights) + ")"

    def to_json(self):
        if self.kind == "product":
            return {"kind": "product", "dims": list(self.dims)}
        return {"kind": "weighted", "weights": list(self.weights)}

    @classmethod
    def from_json(cls, data):
        try:
            if data["kind"] == "product":
                return cls.product(*data["dims"])
            if data["kind"] == "weighted":
                return cls.weighted(*data["weights"])
        except (KeyError, TypeError) as exc:
            raise InjektError(f"malformed space descriptor: {exc}") from exc
        raise InjektError(f"unknown space kind {data.get('kind')!r}")


@dataclass(frozen=True)
class ProjectivePoint:
    """Coordinates per block; a weighted point has a single block."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        for b in blocks:
            if not any(b):
                raise InjektError("a projective point cannot have an all-zero block")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, *blocks, field=QQ):
        return cls(tuple(tuple(field(x) for x in b) for b in blocks))

    def check(self, space):
        if tuple(len(b) for b in self.blocks) != space.shape:
            raise ShapeMismatch(f"point with block sizes {[len(b) for b in self.blocks]} on {space.label}")
        return self

    def coordinates(self):
        return [x for b in self.blocks for x in b]

    def zero_pattern(self):
        return tuple("".join(ZERO if not x else NONZERO for x in b) for b in self.blocks)

    def to_json(self):
        return [[scalar_to_json(x) for x in b] for b in self.blocks]

    @classmethod
    def from_json(cls, data, field=QQ):
        return cls(tuple(tuple(scalar_from_json(x, field) for x in b) for b in data))

    def __str__(self):
        return "x".join("[" + ":".join(scalar_to_json(x) for x in b) + "]" for b in self.blocks)


def canonical_block(block):
    """Scale a nonzero vector so its first nonzero entry is 1."""
    lead = next(x for x in block if x)
    return tuple(x / lead for x in block)


def canonical_form(point):
    return tuple(canonical_block(b) for b in point.blocks)


def proportional(u, v):
    """Two nonzero vectors span a line."""
    field = field_of(next(x for x in u if x))
    return matrix_rank(Matrix([list(u), list(v)], field)) == 1


def _bezout(values):
    """g = gcd(values) with integer coefficients a_i such that Σ a_i v_i = g."""
    g, coeffs = values[0], [1]
    for v in values[1:]:
        old_r, r = g, v
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        coeffs = [c * old_s for c in coeffs] + [old_t]
        g = old_r
    return g, coeffs


def equivalent_points(space, x, y):
    """
    True when x and y name the same point of `space`.

    Product spaces compare blockwise proportionality. Weighted spaces need equal
    supports and ratios r_i = y_i / x_i with r_j = s^(q_j / g), where g is the gcd
    of the support weights and s = Π r_i^(a_i) for Bezout coefficients a_i.
    """
    x.check(space)
    y.check(space)
    if space.kind == "product":
        return all(proportional(u, v) for u, v in zip(x.blocks, y.blocks))
    xs, ys = x.blocks[0], y.blocks[0]
    support = [i for i, c in enumerate(xs) if c]
    if support != [i for i, c in enumerate(ys) if c]:
        return False
    ratios = [ys[i] / xs[i] for i in support]
    weights = [space.weights[i] for i in support]
    g, coeffs = _bezout(weights)
    s = ratios[0] ** coeffs[0]
    for r, a in zip(ratios[1:], coeffs[1:]):
        s = s * r ** a
    return all(r == s ** (q // g) for r, q in zip(ratios, weights))


def rescale(space, point, t):
    """Act by scalars: a list (one per block) for products, one t for weighted spaces."""
    point.check(space)
    if space.kind == "product":
        scalars = t if isinstance(t, (list, tuple)) else [t] * len(point.blocks)
        return ProjectivePoint(tuple(tuple(c * s for c in b) for b, s in zip(point.blocks, scalars)))
    block = point.blocks[0]
    return ProjectivePoint((tuple(c * t ** q for c, q in zip(block, space.weights)),))


@dataclass(frozen=True)
class Stratum:
    name: str
    mask: tuple

    def to_json(self):
        return {"name": self.name, "mask": list(self.mask)}


def _block_patterns(size):
    """Zero patterns for one block: coordinate hyperplanes, prefixes, suffixes and coordinate points."""
    patterns = {}
    for i in range(size):
        patterns[f"V{i}"] = FREE * i + ZERO + FREE * (size - i - 1)
        patterns[f"D{i}"] = FREE * i + NONZERO + FREE * (size - i - 1)
    for k in range(1, size):
        patterns[f"prefix{k}"] = ZERO * k + NONZERO + FREE * (size - k - 1)
        patterns[f"suffix{k}"] = FREE * (size - k - 1) + NONZERO + ZERO * k
    for i in range(size):
        patterns[f"e{i}"] = ZERO * i + NONZERO + ZERO * (size - i - 1)
    return patterns


def default_strata(space):
    """
    The generic stratum plus, for each block, coordinate hyperplanes V(x_i),
    their complements D(x_i), zero prefixes and suffixes, and coordinate points.
    """
    shape = space.shape
    strata = [Stratum("generic", tuple(FREE * n for n in shape))]
    for b, size in enumerate(shape):
        for name, pattern in _block_patterns(size).items():
            mask = tuple(pattern if j == b else FREE * n for j, n in enumerate(shape))
            label = name if len(shape) == 1 else f"block{b}:{name}"
            strata.append(Stratum(label, mask))
    if len(shape) > 1:
        strata.append(Stratum("all:V0", tuple(ZERO + FREE * (n - 1) for n in shape)))
        strata.append(Stratum("all:e0", tuple(NONZERO + ZERO * (n - 1) for n in shape)))
        strata.append(Stratum("all:eLast", tuple(ZERO * (n - 1) + NONZERO for n in shape)))
    return strata


def validate_mask(space, mask):
    if mask is None:
        return tuple(FREE * n for n in space.shape)
    mask = tuple(mask)
    if len(mask) != len(space.shape) or any(len(m) != n for m, n in zip(mask, space.shape)):
        raise InvalidMask(f"mask {mask} does not match block shape {space.shape}")
    for m in mask:
        if set(m) - {ZERO, NONZERO, FREE}:
            raise InvalidMask(f"mask block {m!r} uses characters other than '0', '*', '?'")
        if set(m) == {ZERO}:
            raise InvalidMask(f"mask block {m!r} leaves no nonzero coordinate")
    return mask


def random_scalar(rng, height, field=QQ, nonzero=False):
    while True:
        if field == QQ:
            value = field.random_element(rng, height)
        else:
            value = field.random_element(rng)
        if value or not nonzero:
            return value


def sample_point(space, height=DEFAULT_HEIGHT, mask=None, rng=None, field=QQ, seed=0):
    """
    Random point with numerators and denominators bounded by `height`.

    Args:
        space (SpaceDescriptor): where the point lives
        height (int): coefficient height bound
        mask: per-block strings over '0' (zero), '*' (nonzero), '?' (free)
        rng (random.Random): generator; a fresh one from `seed` when omitted
        field: QQ or a prime field

    Returns:
        ProjectivePoint: masked coordinates are exactly zero
    """
    mask = validate_mask(space, mask)
    rng = rng or random.Random(seed)
    blocks = []
    for m in mask:
        while True:
            block = []
            for ch in m:
                if ch == ZERO:
                    block.append(field.zero)
                else:
                    block.append(random_scalar(rng, height, field, nonzero=(ch == NONZERO)))
            if any(block):
                break
        blocks.append(tuple(block))
    return ProjectivePoint(tuple(blocks))


def point_from_json(data, space, field_name=None):
    field = field_from_name(field_name)
    return ProjectivePoint.from_json(data, field).check(space)

