from fractions import Fraction

import pytest

from constructions import build
from decoders import (DecodeError, available_decoders, decode, duf_decode, invert_powers, match_multiplicities,
                      resolve_decoder, solve_auxiliary_system)
from exactalg import QQ, InjektError
from morphism import evaluate, roundtrip_check
from spaces import ProjectivePoint, SpaceDescriptor, equivalent_points


def test_decode_phi1_at_all_ones(phi1):
    decoded = decode(phi1, [1, 1, 2, 2, 1])
    assert equivalent_points(phi1.source, decoded, ProjectivePoint.of((1, 1, 1, 1)))


def test_decode_phi1_on_the_hyperplane_x0(phi1):
    x = ProjectivePoint.of((0, 2, -3, 5))
    decoded = decode(phi1, evaluate(phi1, x))
    assert decoded.blocks[0][0] == 0
    assert equivalent_points(phi1.source, decoded, x)


def test_decode_phi1_rejects_inconsistent_images(phi1):
    with pytest.raises(DecodeError):
        decode(phi1, [0, 1, 0, 0, 1])
    with pytest.raises(DecodeError):
        decode(phi1, [0, 0, 0, 0, 0])
    with pytest.raises(DecodeError):
        decode(phi1, [1, 2, 3])


@pytest.mark.parametrize("family, params", [
    ("wps_phi1", {"weights": (1, 2, 3)}),
    ("wps_phi1", {"weights": (1, 6, 10, 15)}),
    ("wps_phik", {"weights": (1, 6, 10, 15), "k": 2}),
    ("wps_phik", {"weights": (1, 2, 3), "k": 3}),
    ("p1pn", {"n": 2, "d": 3}),
    ("p1p1_deg_d", {"d": 4}),
    ("chow_veronese", {"m": 1, "dvec": (1, 2, 4)}),
    ("tangential_p1p1", {}),
    ("pn_duf", {"n": 3, "k": 2}),
    ("segre_veronese", {"dims": (1, 2), "degrees": (1, 1)}),
    ("segre_p1p1p1_projection", {}),
    ("quintic_plane_curve", {}),
    ("identity", {"n": 3}),
])
def test_roundtrip_is_clean(family, params):
    m = build(family, **params)
    report = roundtrip_check(m, trials=30, seed=2, height=12)
    assert report.clean, report.roundtrip_failures[:1]


@pytest.mark.parametrize("x", [
    ((1, 0), (1, 0), (1, 0)),
    ((0, 1), (0, 1), (0, 1)),
    ((1, 0), (0, 1), (1, 0)),
    ((0, 1), (1, 0), (1, 0)),
    ((1, 0), (1, 0), (0, 1)),
    ((2, -1), (1, 3), (5, 7)),
])
def test_segre_projection_decodes_coordinate_points(x):
    # at [1:0]^3 the line to the centre is tangent, so the rank-one condition has a double root
    m = build("segre_p1p1p1_projection")
    point = ProjectivePoint.of(*x)
    assert equivalent_points(m.source, decode(m, evaluate(m, point)), point)


def test_solve_auxiliary_system():
    x, y = solve_auxiliary_system(Fraction(3, 2), Fraction(11), Fraction(31), Fraction(3))
    assert (x, y) == (2, 3)
    # the degenerate branch a*b = (d + 1)^2 forces x = y
    x, y = solve_auxiliary_system(Fraction(4, 5), Fraction(20), Fraction(100), Fraction(3))
    assert (x, y) == (5, 5)


def test_duf_decode():
    assert duf_decode([1, 2, 7, 6, 9], 3, 2, QQ) == [1, 2, 3]
    with pytest.raises(DecodeError):
        duf_decode([0, 1, 0, 0, 0], 3, 2, QQ)


def test_invert_powers_up_to_weighted_scaling():
    u = [Fraction(2) ** 5, Fraction(3) ** 3, Fraction(5) ** 2]
    y = invert_powers(u, (5, 3, 2), QQ)
    space = SpaceDescriptor.weighted(6, 10, 15)
    assert equivalent_points(space, ProjectivePoint.of(y), ProjectivePoint.of((2, 3, 5)))


def test_match_multiplicities():
    roots = [((1, 0), 2), ((0, 1), 1)]
    assert match_multiplicities(roots, (1, 2)) == {1: (1, 0), 0: (0, 1)}
    with pytest.raises(DecodeError):
        match_multiplicities([((1, 0), 1), ((0, 1), 1)], (1, 1))


def test_registry():
    assert "wps_phi1" in available_decoders()
    with pytest.raises(InjektError):
        resolve_decoder("wps_phi1")
    with pytest.raises(InjektError):
        resolve_decoder("builtin:nope")
    with pytest.raises(InjektError):
        resolve_decoder(None)
