import random
from fractions import Fraction

import pytest

from exactalg import InjektError, ShapeMismatch, prime_field
from spaces import (InvalidMask, ProjectivePoint, SpaceDescriptor, default_strata, equivalent_points, point_from_json,
                    rescale, sample_point)


def _point(*blocks):
    return ProjectivePoint.of(*blocks)


@pytest.mark.parametrize("y, expected", [
    ((4, 8), True),
    ((4, 9), False),
    ((1, -1), True),
    ((0, 1), False),
])
def test_weighted_equivalence_examples(y, expected):
    space = SpaceDescriptor.weighted(2, 3)
    assert equivalent_points(space, _point((1, 1)), _point(y)) is expected


def test_weighted_equivalence_with_common_weight_factor():
    space = SpaceDescriptor.weighted(1, 6, 10, 15)
    x = _point((0, 1, 1, 1))
    assert equivalent_points(space, x, rescale(space, x, Fraction(-2, 3)))
    y = _point((0, 0, 1, 1))
    assert equivalent_points(space, y, _point((0, 0, 4, -8)))
    assert not equivalent_points(space, y, _point((0, 0, 32, -243)))


def test_product_equivalence_is_blockwise():
    space = SpaceDescriptor.product(1, 2)
    x = _point((1, 2), (0, 1, 3))
    assert equivalent_points(space, x, _point((-2, -4), (0, 5, 15)))
    assert not equivalent_points(space, x, _point((1, 2), (1, 1, 3)))
    with pytest.raises(ShapeMismatch):
        equivalent_points(space, x, _point((1, 2)))


def test_rescale_stays_in_class():
    rng = random.Random(7)
    space = SpaceDescriptor.weighted(1, 2, 3)
    for _ in range(20):
        x = sample_point(space, height=10, rng=rng)
        t = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        assert equivalent_points(space, x, rescale(space, x, t))


def test_sample_point_respects_mask():
    space = SpaceDescriptor.product(2, 1)
    rng = random.Random(3)
    for _ in range(50):
        p = sample_point(space, height=5, mask=("0*?", "*0"), rng=rng)
        assert p.blocks[0][0] == 0
        assert p.blocks[0][1] != 0
        assert p.blocks[1] != (0, 0) and p.blocks[1][1] == 0


def test_sample_point_is_seeded():
    space = SpaceDescriptor.weighted(1, 6, 10, 15)
    assert sample_point(space, seed=11) == sample_point(space, seed=11)


def test_sample_point_over_prime_field():
    f = prime_field(101)
    p = sample_point(SpaceDescriptor.product(3), rng=random.Random(0), field=f)
    assert all(f.is_element(x) for x in p.blocks[0])


@pytest.mark.parametrize("mask", [("00",), ("0*",) * 2, ("0x",), ("000",)])
def test_invalid_masks(mask):
    with pytest.raises(InvalidMask):
        sample_point(SpaceDescriptor.product(1), mask=mask)


def test_default_strata_cover_each_coordinate():
    strata = default_strata(SpaceDescriptor.weighted(1, 6, 10, 15))
    names = [s.name for s in strata]
    assert names[0] == "generic"
    for i in range(4):
        assert f"V{i}" in names and f"e{i}" in names
    product_names = [s.name for s in default_strata(SpaceDescriptor.product(1, 1))]
    assert "block1:V0" in product_names and "all:e0" in product_names


def test_space_descriptor_validation_and_json():
    with pytest.raises(InjektError):
        SpaceDescriptor.weighted(3)
    with pytest.raises(InjektError):
        SpaceDescriptor.product(0)
    space = SpaceDescriptor.product(1, 3)
    assert space.dimension == 4
    assert space.label == "P1xP3"
    assert SpaceDescriptor.from_json(space.to_json()) == space


def test_point_json_and_zero_block():
    space = SpaceDescriptor.product(1)
    p = point_from_json([["1/2", "-3"]], space)
    assert p.blocks == ((Fraction(1, 2), Fraction(-3)),)
    assert str(p) == "[1/2:-3]"
    with pytest.raises(InjektError):
        _point((0, 0))
