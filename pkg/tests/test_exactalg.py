from fractions import Fraction
from itertools import combinations, permutations, product

import pytest

from exactalg import (QQ, FieldMismatch, InjektError, Matrix, NotHomogeneous, Polynomial, QuadraticExtensionField,
                      ShapeMismatch, determinant, field_from_name, matrix_rank, multidegree, nullspace, poly_eval,
                      prime_field, primes_above, scalar_from_json, scalar_to_json, solve)
from spaces import SpaceDescriptor


def _brute_force_rank(rows):
    """Largest k with a nonzero k x k minor."""
    nrows, ncols = len(rows), len(rows[0])
    for k in range(min(nrows, ncols), 0, -1):
        for r in combinations(range(nrows), k):
            for c in combinations(range(ncols), k):
                if _leibniz([[rows[i][j] for j in c] for i in r]):
                    return k
    return 0


def _leibniz(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


def test_poly_eval_examples():
    x = Polynomial.variables((2,))[0]
    assert poly_eval(x[0] * x[1], [[1, 1]]) == 1

    w = Polynomial.variables((4,))[0]
    assert poly_eval(w[0] ** 30, [[2, 0, 0, 0]]) == 2 ** 30
    assert poly_eval(w[1] ** 5 + w[0] ** 20 * w[2], [[1, 1, 1, 0]]) == 2


def test_poly_eval_is_multiplicative():
    x, y = Polynomial.variables((2, 3))
    p = x[0] * y[1] + 3 * x[1] * y[2]
    q = x[0] ** 2 - Fraction(1, 2) * x[1] * x[0]
    point = [[Fraction(2, 3), -1], [5, Fraction(1, 7), 0]]
    assert poly_eval(p * q, point) == poly_eval(p, point) * poly_eval(q, point)


def test_poly_eval_rejects_wrong_shape_and_field():
    x = Polynomial.variables((2,))[0]
    with pytest.raises(ShapeMismatch):
        poly_eval(x[0], [[1, 2, 3]])
    with pytest.raises(FieldMismatch):
        poly_eval(x[0], [[prime_field(7)(1), 2]])


def test_multidegree_examples():
    space = SpaceDescriptor.product(1, 1)
    x, y = Polynomial.variables(space.shape)
    assert multidegree(x[0] * y[0] ** 2, space) == (1, 2)

    weighted = SpaceDescriptor.weighted(1, 6, 10, 15)
    w = Polynomial.variables(weighted.shape)[0]
    assert multidegree(w[0] ** 20 * w[2] + w[1] ** 5, weighted) == 30

    with pytest.raises(NotHomogeneous) as exc:
        multidegree(x[0] * y[0] + x[0] ** 2, space)
    assert len(exc.value.terms) == 2


def test_polynomial_keeps_no_zero_terms():
    x = Polynomial.variables((2,))[0]
    p = x[0] + x[1] - x[0]
    assert p == x[1]
    assert len(p.terms) == 1
    assert (x[0] - x[0]).is_zero()


def test_polynomial_json_round_trip_preserves_order():
    x, y = Polynomial.variables((2, 2))
    p = 3 * x[0] * y[1] - Fraction(1, 2) * x[1] * y[0]
    data = p.to_json()
    assert data["blocks"] == [2, 2]
    assert data["terms"][0]["c"] == "3"
    assert Polynomial.from_json(data) == p


def test_polynomial_json_rejects_duplicate_exponents():
    data = {"blocks": [2], "terms": [{"c": "1", "e": [[1, 0]]}, {"c": "2", "e": [[1, 0]]}]}
    with pytest.raises(InjektError):
        Polynomial.from_json(data)


@pytest.mark.parametrize("rows, expected", [
    ([[0, 0], [0, 0]], 0),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3),
    ([[1, 2], [2, 4]], 1),
])
def test_matrix_rank_examples(rows, expected):
    assert matrix_rank(Matrix(rows)) == expected


def test_matrix_rank_matches_minors_on_small_matrices():
    values = (-2, 0, 1, 2)
    count = 0
    for entries in product(values, repeat=6):
        rows = [list(entries[:3]), list(entries[3:])]
        assert matrix_rank(Matrix(rows)) == _brute_force_rank(rows)
        count += 1
    assert count == 4 ** 6


def test_matrix_rank_over_prime_field():
    f7 = prime_field(7)
    assert matrix_rank(Matrix([[1, 2], [3, 6]], f7)) == 1
    assert matrix_rank(Matrix([[1, 2], [3, 5]], f7)) == 2


def test_determinant_and_nullspace():
    m = Matrix([[2, 1], [Fraction(1, 2), 3]])
    assert determinant(m) == Fraction(11, 2)
    kernel = nullspace(Matrix([[1, 2, 3], [2, 4, 6]]))
    assert len(kernel) == 2
    for v in kernel:
        assert Matrix([[1, 2, 3]]).apply(v) == [0]


def test_solve_detects_inconsistent_systems():
    m = Matrix([[1, 1], [2, 2]])
    assert solve(m, [1, 3]) is None
    x = solve(m, [1, 2])
    assert m.apply(x) == [1, 2]


def test_scalar_codec():
    assert scalar_to_json(Fraction(3, 1)) == "3"
    assert scalar_to_json(Fraction(-2, 6)) == "-1/3"
    assert scalar_from_json("-1/3") == Fraction(-1, 3)
    assert scalar_from_json("4", prime_field(7)) == prime_field(7)(4)


def test_prime_field_arithmetic():
    f13 = prime_field(13)
    a = f13(4)
    assert a ** 2 == f13(3)
    assert a ** 3 == f13(12)
    assert a * a ** -1 == f13.one
    assert f13(Fraction(1, 2)) * 2 == f13.one
    assert f13.sqrt(f13(3)) ** 2 == f13(3)
    assert f13.sqrt(f13(2)) is None


def test_primitive_root_of_unity_has_exact_order():
    f13 = prime_field(13)
    zeta = f13.primitive_root_of_unity(6)
    assert zeta ** 6 == f13.one
    assert all(zeta ** j != f13.one for j in range(1, 6))


def test_quadratic_extension_contains_square_roots():
    f25 = QuadraticExtensionField(5)
    two = f25(2)
    root = f25.sqrt(two)
    assert root is not None
    assert root * root == two
    assert len(list(f25.elements())) == 25


def test_field_names_round_trip():
    assert field_from_name(None) == QQ
    assert field_from_name("GF(101)") == prime_field(101)
    assert field_from_name("GF(5^2)") == QuadraticExtensionField(5)
    with pytest.raises(InjektError):
        field_from_name("RR")


def test_primes_above_respects_residue():
    primes = primes_above(10 ** 6, 3, modulus=6, residue=1)
    assert len(primes) == 3
    assert all(p > 10 ** 6 and p % 6 == 1 for p in primes)
    assert primes == sorted(primes)
