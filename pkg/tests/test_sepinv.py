import random

import pytest

from exactalg import InjektError, Polynomial, prime_field
from sepinv import (EVIDENCE_NOTE, CyclicAction, InvariantSet, InvariantViolation, cone_projective_consistency,
                    falsify_subsets, near_collision_partner, nth_root, same_orbit, separates,
                    separates_over_primes, z6_example_sets)


@pytest.fixture
def z6():
    return CyclicAction(6, (2, 2, 3, 3), p=13, zeta=4)


@pytest.fixture
def z3_cube():
    (x0, x1), = Polynomial.variables((2,))
    return CyclicAction(3, (1, 2), p=13), InvariantSet([x0 ** 3], 3, (1, 2))


@pytest.mark.parametrize("v, w, expected", [
    ((1, 1, 1, 1), (1, 1, 1, 1), True),
    ((1, 1, 1, 1), (3, 3, 12, 12), True),
    ((1, 0, 0, 0), (2, 0, 0, 0), False),
    ((1, 0, 0, 0), (9, 0, 0, 0), True),
])
def test_same_orbit_examples(z6, v, w, expected):
    assert same_orbit(z6, v, w) is expected


def test_same_orbit_is_transitive_on_samples(z6):
    rng = random.Random(0)
    for _ in range(20):
        v = z6.random_vector(rng)
        w = z6.act(rng.randrange(6), v)
        u = z6.act(rng.randrange(6), w)
        assert same_orbit(z6, v, w) and same_orbit(z6, w, u) and same_orbit(z6, v, u)


def test_cyclic_action_validation():
    with pytest.raises(InjektError):
        CyclicAction(6, (2, 2, 3, 3), p=17)
    with pytest.raises(InjektError):
        CyclicAction(6, (2, 2, 3, 3), p=13, zeta=3)
    with pytest.raises(InjektError):
        CyclicAction(0, (1,), p=13)
    action = CyclicAction(6, (2, 2, 3, 3))
    assert action.p > 10 ** 6 and (action.p - 1) % 6 == 0
    assert action.to_json()["zeta"]


def test_invariance_is_validated_per_term():
    (x0, x1, x2, x3), = Polynomial.variables((4,))
    with pytest.raises(InvariantViolation) as exc:
        InvariantSet([x0 ** 3, x0 * x2], 6, (2, 2, 3, 3))
    assert exc.value.index == 1
    assert exc.value.term == (1, 0, 1, 0)


def test_invariant_set_must_match_the_action(z6):
    full, _ = z6_example_sets()
    with pytest.raises(InjektError):
        full.over(CyclicAction(3, (1, 2), p=13))
    assert len(full.over(z6)) == 7


@pytest.mark.parametrize("which", [0, 1])
def test_z6_example_sets_separate(z6, which):
    invariants = z6_example_sets()[which]
    report = separates(z6, invariants, trials=90, seed=3)
    assert report.clean, report.separation_violations[:1]
    assert EVIDENCE_NOTE in report.notes
    assert sum(report.strategies.values()) == 90


def test_single_cube_does_not_separate(z3_cube):
    action, invariants = z3_cube
    v, w = (0, 1), (0, 2)
    assert invariants.values(action, v) == invariants.values(action, w)
    assert not same_orbit(action, v, w)
    report = separates(action, invariants, trials=30, seed=0)
    assert report.separation_violations
    assert not report.invariance_violations
    witness = report.separation_violations[0]
    assert not same_orbit(action, witness["v"], witness["w"])


def test_separates_is_worker_independent(z6):
    _, small = z6_example_sets()
    serial = separates(z6, small, trials=40, seed=1, workers=1)
    threaded = separates(z6, small, trials=40, seed=1, workers=4)
    assert serial.to_json(include_timing=False) == threaded.to_json(include_timing=False)
    with pytest.raises(InjektError):
        separates(z6, small, trials=0)


def test_separation_agrees_across_primes():
    _, small = z6_example_sets()
    reports = separates_over_primes(6, (2, 2, 3, 3), small, trials=60, seed=5, primes=[13, 19, 31])
    assert [r.action["p"] for r in reports] == [13, 19, 31]
    assert all(r.clean for r in reports), [r.separation_violations[:1] for r in reports]
    assert {tuple(sorted(r.strategies.items())) for r in reports} == {(("near-collision", 20), ("orbit-twin", 20),
                                                                      ("random", 20))}


def test_near_collision_partner_keeps_the_solved_invariant(z6):
    _, small = z6_example_sets()
    polys = small.over(z6)
    rng = random.Random(11)
    for _ in range(200):
        v = z6.random_vector(rng)
        w = near_collision_partner(z6, small, v, rng)
        changed = [c for c in range(4) if v[c] != w[c]]
        assert len(changed) <= 1
        if changed:
            target = next(f for f in polys if any(exps[0][changed[0]] for exps in f.terms))
            assert target.evaluate((v,)) == target.evaluate((w,))


def test_falsify_subsets_accounts_for_every_subset(z6):
    _, small = z6_example_sets()
    result = falsify_subsets(z6, small, 5, trials=30, seed=0)
    assert len(result["falsified"]) + len(result["survived"]) == 6
    assert "not certified" in result["note"]
    with pytest.raises(InjektError):
        falsify_subsets(z6, small, 7, trials=1)


def test_nth_root_over_f13():
    f13 = prime_field(13)
    t = nth_root(8, 3, f13)
    assert t ** 3 == f13(8)
    assert nth_root(2, 3, f13) is None
    assert nth_root(0, 5, f13) == f13.zero


def test_cone_consistency_for_the_conic():
    (x0, x1), = Polynomial.variables((2,))
    report = cone_projective_consistency((1, 1), 2, [x0 ** 2, x0 * x1, x1 ** 2], trials=40, seed=0)
    assert report.clean
    assert report.projective_collisions == 0
    assert report.affine_violations == 0
    assert len(report.primes) == 3


def test_cone_consistency_sees_the_square_map_collisions():
    (x0, x1), = Polynomial.variables((2,))
    report = cone_projective_consistency((1, 1), 2, [x0 ** 2, x1 ** 2], trials=40, seed=0, primes=[1000003])
    assert report.clean, report.discrepancies[:1]
    assert report.projective_collisions > 0
    assert report.affine_violations > 0
    assert report.witnesses


def test_cone_consistency_for_phi1(phi1):
    report = cone_projective_consistency(None, 1, phi1, trials=20, seed=2)
    assert report.clean
    assert report.degree == 30
    assert report.projective_collisions == 0


def test_cone_consistency_checks_the_degree():
    (x0, x1), = Polynomial.variables((2,))
    with pytest.raises(InjektError):
        cone_projective_consistency((1, 1), 3, [x0 ** 2, x1 ** 2], trials=1)
    with pytest.raises(InjektError):
        cone_projective_consistency((1, 1), None, [x0 ** 2, x1], trials=1)
    with pytest.raises(InjektError):
        cone_projective_consistency(None, 1, [x0 ** 2], trials=1)
