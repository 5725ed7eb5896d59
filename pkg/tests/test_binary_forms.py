from fractions import Fraction

import pytest

from binary_forms import (BinaryForm, apolar_certificate, binary_discriminant, binary_divide, binary_form_rank,
                          binary_gcd, binary_rational_roots, binary_resultant, catalecticant, is_squarefree,
                          splits_completely)
from exactalg import InjektError, UnsupportedDegree, matrix_rank, prime_field


def _linear(a, b):
    """b*s0 - a*s1, which vanishes at [a:b]."""
    return BinaryForm([b, -a])


@pytest.mark.parametrize("f, g, expected", [
    (BinaryForm([1, 0]), BinaryForm([0, 1]), 1),
    (BinaryForm([1, 0, 1]), BinaryForm([1, 0, -1]), 4),
    (_linear(1, 1) * _linear(2, 1), _linear(1, 1) * _linear(3, 1), 0),
])
def test_resultant_examples(f, g, expected):
    assert binary_resultant(f, g) == expected


def test_resultant_vanishes_exactly_on_common_roots():
    f = _linear(1, 2) * _linear(-3, 1)
    for a, b, shared in [(1, 2, True), (-3, 1, True), (5, 7, False), (1, 0, False)]:
        g = _linear(a, b) * _linear(4, 9)
        assert (binary_resultant(f, g) == 0) is shared


def test_discriminant_of_sum_of_squares():
    assert binary_discriminant(BinaryForm([1, 0, 1])) == -4
    assert binary_discriminant(BinaryForm([1, 2, 1])) == 0


def test_squarefree_detection():
    assert is_squarefree(_linear(1, 1) * _linear(2, 1))
    assert not is_squarefree(_linear(1, 1) ** 2 * _linear(0, 1))


@pytest.mark.parametrize("coeffs, rank", [
    ([1, 0, 0, 0], 1),
    ([1, 0, 0, 1], 2),
    ([0, 0, 1, 0], 3),
    ([0, 1, 0, 0], 3),
    ([1, 0, 1], 2),
])
def test_binary_form_rank_examples(coeffs, rank):
    assert binary_form_rank(BinaryForm(coeffs)) == rank


def test_rank_of_general_sextic_is_four():
    f = sum((BinaryForm.linear_power(1, t, 6) for t in range(4)), BinaryForm([0] * 7))
    assert binary_form_rank(f) == 4


def test_rank_certificate_for_tangential_cubic():
    cert = apolar_certificate(BinaryForm([0, 1, 0, 0]))
    assert cert.generator_degree == 2
    assert not cert.squarefree
    assert matrix_rank(catalecticant(BinaryForm([0, 1, 0, 0]), 1)) == 2


def test_rank_rejects_large_degree_and_small_characteristic():
    with pytest.raises(UnsupportedDegree):
        binary_form_rank(BinaryForm([1] + [0] * 9))
    with pytest.raises(UnsupportedDegree):
        binary_form_rank(BinaryForm([1, 0, 0, 1], prime_field(3)))
    with pytest.raises(InjektError):
        binary_form_rank(BinaryForm([0, 0, 0]))


def test_roots_at_coordinate_points():
    roots = dict(binary_rational_roots(BinaryForm([0, 1, 0, 0])).roots)
    assert roots == {(Fraction(1), Fraction(0)): 1, (Fraction(0), Fraction(1)): 2}


def test_roots_with_multiplicity_reproduce_the_form():
    f = _linear(2, 1) ** 3 * _linear(-1, 1) ** 2
    factorization = binary_rational_roots(f)
    assert dict(factorization.roots) == {(2, 1): 3, (-1, 1): 2}
    assert factorization.roots[0][1] == 3
    assert factorization.residual_degree == 0

    rebuilt = factorization.residual
    for (a, b), mult in factorization.roots:
        rebuilt = rebuilt * BinaryForm.vanishing_at((a, b)) ** mult
    assert rebuilt == f


def test_roots_leave_irreducible_residual():
    f = BinaryForm([1, 0, 1]) * _linear(Fraction(3, 5), 1)
    factorization = binary_rational_roots(f)
    assert dict(factorization.roots) == {(3, 5): 1}
    assert factorization.residual_degree == 2
    assert not splits_completely(f)


def test_roots_over_prime_field():
    f7 = prime_field(7)
    f = BinaryForm([1, 0, -2], f7)
    roots = dict(binary_rational_roots(f).roots)
    assert len(roots) == 2
    for (a, b) in roots:
        assert f.evaluate(a, b) == 0


def test_gcd_and_exact_division():
    common = _linear(1, 3)
    f = common * _linear(2, 1) * BinaryForm([0, 1])
    g = common * BinaryForm([0, 1]) * _linear(5, 1)
    h = binary_gcd(f, g)
    assert h.degree == 2
    assert binary_divide(f, h).degree == 1
    with pytest.raises(InjektError):
        binary_divide(_linear(1, 1), _linear(2, 1))
