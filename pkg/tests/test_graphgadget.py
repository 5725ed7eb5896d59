import pytest

from constructions import build
from exactalg import InjektError, Polynomial, ShapeMismatch
from graphgadget import (BRANCH_MIXED, BRANCH_POINT, BRANCH_SECANT, E1, E2, EdgeWeighting, GadgetGraph,
                         annihilation_report, build_gadget, check_corollary_annihilation,
                         check_flattening_correspondence, check_theorem_samples, dim_Zw, flattening_sweep, phi, psi,
                         section_functional, u_tensor, v_tensor)
from morphism import Morphism
from tensors import Tensor222n, flattening_rank


@pytest.mark.parametrize("m", range(1, 11))
def test_gadget_dimensions(m):
    graph, gadget = build_gadget(m)
    assert len(graph.e1) == m and len(graph.e2) == m - 1
    assert gadget.dims == (m, m - 1, 2 * m - 1)
    assert gadget.is_direct()


def test_gadget_graph_validation():
    assert GadgetGraph.of(1).e2 == ()
    assert GadgetGraph.of(6).special_vertex == 3
    with pytest.raises(ShapeMismatch):
        GadgetGraph(2, ((0, 1), (1, 2)), ())
    with pytest.raises(InjektError):
        GadgetGraph(2, ((0, 1), (2, 1)), ((0, 2),))


def test_psi_and_phi_of_an_indicator():
    graph = GadgetGraph.of(2)
    w = EdgeWeighting.indicator(graph, (E1, 0, 1))
    assert psi(0, w) == (0, 1, 0, 0)
    assert psi(1, w) == (1, 0, 0, 0)
    assert psi(2, w) == (0, 0, 0, 0)
    assert phi(w) == u_tensor(2, 0, 1)
    assert dim_Zw(w) == flattening_rank(phi(w)) == 2
    assert check_flattening_correspondence(w)
    with pytest.raises(InjektError):
        psi(3, w)


def test_phi_of_an_e2_indicator():
    graph = GadgetGraph.of(2)
    w = EdgeWeighting.indicator(graph, (E2, 0, 2))
    assert phi(w) == v_tensor(2, 0, 2)
    assert psi(2, w) == (0, 0, 1, 0)


def test_weighting_domain_is_checked():
    graph = GadgetGraph.of(2)
    with pytest.raises(ShapeMismatch):
        EdgeWeighting(graph, {(E1, 0, 1): 1})
    with pytest.raises(InjektError):
        EdgeWeighting.indicator(graph, (E2, 1, 0))
    assert EdgeWeighting.zeros(graph).is_zero()


@pytest.mark.parametrize("m", [1, 2, 3, 6])
def test_flattening_correspondence_on_random_weightings(m):
    assert flattening_sweep(m, trials=30, seed=m) == []


@pytest.mark.parametrize("m", [2, 3, 4])
def test_gadget_samples_are_clean(m):
    report = check_theorem_samples(m, trials=12, seed=1)
    assert report.clean, report.violations[:1]
    assert set(report.branches.values()) == {12}
    assert report.to_json(include_timing=False)["clean"] is True


def test_gadget_samples_for_m1_drop_the_mixed_branch():
    report = check_theorem_samples(1, trials=6)
    assert BRANCH_MIXED not in report.branches
    assert any("vacuous" in note for note in report.notes)
    assert report.clean


def test_gadget_samples_do_not_depend_on_worker_count():
    serial = check_theorem_samples(3, trials=10, seed=7, workers=1)
    threaded = check_theorem_samples(3, trials=10, seed=7, workers=3)
    assert serial.to_json(include_timing=False) == threaded.to_json(include_timing=False)


def test_subspace_containing_a_rank_one_tensor_is_caught():
    m = 2
    report = check_theorem_samples(m, trials=8, subspace=[Tensor222n.unit(0, 0, 0, m)])
    assert set(report.branches) == {BRANCH_SECANT, BRANCH_POINT}
    assert not report.clean
    assert any(v["branch"] == BRANCH_SECANT and v["strategy"] == "coordinate" for v in report.violations)


@pytest.mark.parametrize("m", range(1, 11))
def test_sections_annihilate_the_gadget(m):
    report = annihilation_report(m)
    assert report["ok"], report["failures"][:1]
    assert report["sections"] == report["rank"] == report["expected"] == 2 * m + 5
    assert check_corollary_annihilation(m)


def _flip_one_sign(morphism):
    sections = list(morphism.sections)
    idx = next(i for i, s in enumerate(sections) if len(s.terms) >= 2)
    terms = dict(sections[idx].terms)
    key = next(iter(terms))
    terms[key] = -terms[key]
    sections[idx] = Polynomial(sections[idx].shape, terms)
    return Morphism(morphism.source, tuple(sections), "flipped")


def test_perturbed_sections_fail_annihilation():
    m = 3
    flipped = _flip_one_sign(build("p1p1pm_graph", m=m))
    report = annihilation_report(m, flipped)
    assert not report["ok"]
    assert report["failures"]
    assert not check_corollary_annihilation(m, flipped)


def test_section_functional_layout():
    m = 2
    source_shape = (2, 2, m + 1)
    (x0, x1), (y0, y1), z = Polynomial.variables(source_shape)
    vec = section_functional(x1 * y0 * z[2], m)
    assert vec[(2 * 1 + 0) * (m + 1) + 2] == 1
    assert sum(1 for c in vec if c) == 1
    with pytest.raises(ShapeMismatch):
        section_functional(x0 * x1 * z[0], m)
    with pytest.raises(ShapeMismatch):
        section_functional(x0 * y0 * z[0], m + 1)
