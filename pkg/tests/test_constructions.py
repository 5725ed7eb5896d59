import logging

import pytest

from constructions import (FAMILIES, HypothesisViolation, SubsetSumClash, build, check_weight_hypotheses,
                           distinct_subset_sums, family_table, find_subset_sum_clash, graph_edges)
from exactalg import InjektError
from morphism import evaluate
from spaces import ProjectivePoint


@pytest.mark.parametrize("family, params, ambient", [
    ("wps_phi1", {"weights": (1, 6, 10, 15)}, 4),
    ("wps_phi1", {"weights": (1, 2, 3)}, 3),
    ("wps_phik", {"weights": (1, 6, 10, 15), "k": 2}, 6),
    ("wps_phik", {"weights": (1, 2, 3), "k": 3}, 4),
    ("pn_duf", {"n": 3, "k": 2}, 4),
    ("pn_duf", {"n": 4, "k": 3}, 6),
    ("p1pn", {"n": 2, "d": 2}, 6),
    ("p1pn", {"n": 3, "d": 2}, 8),
    ("p1p1pm_graph", {"m": 1}, 6),
    ("p1p1pm_graph", {"m": 4}, 12),
    ("tangential_p1p1", {}, 3),
    ("tangential_p2p2", {}, 8),
    ("p1p1_deg_d", {"d": 3}, 4),
    ("segre_p1p1p1_projection", {}, 6),
    ("quintic_plane_curve", {}, 2),
    ("quintic_space_curve", {}, 3),
    ("chow_veronese", {"m": 1, "dvec": (1, 2)}, 3),
    ("chow_veronese", {"m": 2, "dvec": (1, 2)}, 9),
    ("segre_veronese", {"dims": (1, 1), "degrees": (1, 1)}, 3),
    ("identity", {"n": 2}, 2),
])
def test_family_ambient_dimensions(family, params, ambient):
    m = build(family, **params)
    assert m.ambient_dimension == ambient
    assert len(m.sections) == ambient + 1


@pytest.mark.parametrize("dvec, clash", [
    ((1, 1), ((1,), (2,))),
    ((1, 2, 3), ((1, 2), (3,))),
    ((1, 2, 4), None),
    ((3, 5, 6, 7), None),
])
def test_subset_sum_clashes(dvec, clash):
    assert find_subset_sum_clash(dvec) == clash


def test_subset_sum_clash_witness_has_equal_sums():
    dvec = (2, 4, 7, 9, 11)
    left, right = find_subset_sum_clash(dvec)
    assert sum(dvec[i - 1] for i in left) == sum(dvec[i - 1] for i in right)
    assert not set(left) & set(right)
    assert not distinct_subset_sums(dvec)


def test_chow_veronese_rejects_repeated_degrees():
    with pytest.raises(SubsetSumClash) as exc:
        build("chow_veronese", m=1, dvec=(1, 1))
    assert exc.value.subsets == ((1,), (2,))


def test_p1p1_deg_d_values():
    m = build("p1p1_deg_d", d=3)
    image = evaluate(m, ProjectivePoint.of((1, 1), (1, 1)))
    assert [int(v) for v in image.blocks[0]] == [1, 4, 6, 4, 1]
    with pytest.raises(HypothesisViolation):
        build("p1p1_deg_d", d=2)


def test_p1pn_values():
    m = build("p1pn", n=1, d=2)
    image = evaluate(m, ProjectivePoint.of((1, 1), (1, 0)))
    assert [int(v) for v in image.blocks[0]] == [1, 0, 0, 2, 1]


def test_weight_hypotheses():
    assert check_weight_hypotheses((1, 6, 10, 15)) == ((1, 6, 10, 15), 30)
    with pytest.raises(HypothesisViolation) as exc:
        check_weight_hypotheses((1, 2, 4, 8))
    assert exc.value.triple == (0, 1, 2)
    with pytest.raises(HypothesisViolation):
        check_weight_hypotheses((2, 3))
    with pytest.raises(HypothesisViolation):
        build("wps_phik", weights=(1, 2, 3), k=1)


def test_graph_edges():
    e1, e2 = graph_edges(2)
    assert e1 == [(0, 1), (1, 2)]
    assert e2 == [(0, 2)]
    e1, e2 = graph_edges(6)
    assert len(e1) == 6
    assert e2 == [(0, 6), (6, 1), (1, 5), (5, 2), (2, 4)]
    assert graph_edges(7)[1] == [(0, 7), (7, 1), (1, 6), (6, 2), (2, 5), (5, 3)]
    assert graph_edges(1)[1] == []
    with pytest.raises(HypothesisViolation):
        graph_edges(0)


@pytest.mark.parametrize("m", range(1, 11))
def test_e2_is_a_path_missing_the_middle_vertex(m):
    _, e2 = graph_edges(m)
    assert len(e2) == m - 1
    assert all(b == c for (_, b), (c, _) in zip(e2, e2[1:]))
    visited = {e2[0][0]} | {b for _, b in e2} if e2 else {0}
    assert visited == set(range(m + 1)) - {(m + 1) // 2}


def test_build_parameter_handling(caplog):
    with pytest.raises(InjektError):
        build("no_such_family")
    with pytest.raises(HypothesisViolation):
        build("p1pn", n=2)
    with caplog.at_level(logging.WARNING):
        m = build("identity", n=1, d=4)
    assert m.label == "identity(n=1)"
    assert "Ignoring parameters ['d']" in caplog.text


def test_family_table_lists_every_family():
    table = family_table()
    assert [row["family"] for row in table] == sorted(FAMILIES)
    assert all(row["claim"] for row in table)
