import pytest

from constructions import build
from morphism import Morphism
from suite import CONSTRUCTION_TABLE, SECTIONS, _guarded, run_suite


def test_construction_section_is_clean():
    result = run_suite(only=["constructions"], include_timing=False)
    assert result["clean"]
    assert len(result["rows"]) == len(CONSTRUCTION_TABLE) + 1
    assert all("elapsed" not in row for row in result["rows"])
    assert "elapsed" not in result


def test_a_wrong_override_fails_only_its_row():
    phi1 = build("wps_phi1", weights=(1, 6, 10, 15))
    broken = Morphism(phi1.source, phi1.sections[:-1], phi1.label, phi1.decoder)
    result = run_suite(only=["constructions"], overrides={phi1.label: broken})
    assert result["failed"] == 1
    failed = next(r for r in result["rows"] if not r["passed"])
    assert failed["detail"]["ambient"] == 3


def test_a_crashing_check_fails_its_row():
    def boom():
        raise RuntimeError("no")
    row = _guarded("secant", "claim", "explodes", boom)
    assert row["passed"] is False
    assert row["detail"] == {"error": "RuntimeError: no"}


def test_unknown_sections_are_rejected():
    with pytest.raises(ValueError):
        run_suite(only=["nope"])


def test_small_collision_and_roundtrip_run():
    result = run_suite(seed=1, only=["collision", "roundtrip"], trials={"collision": 12, "roundtrip": 6})
    assert result["clean"], [r["check"] for r in result["rows"] if not r["passed"]]
    assert result["sections"] == ["collision", "roundtrip"]
    assert any(r["check"] == "decoder inverts segre_p1p1p1_projection" for r in result["rows"])
    assert result["trials"]["collision"] == 12


def test_secant_section_with_few_points():
    result = run_suite(seed=3, only=["secant"], trials={"secant": 4})
    assert result["clean"], [r["detail"] for r in result["rows"] if not r["passed"]]
    assert len(result["rows"]) == 4


@pytest.mark.slow
def test_gadget_section_small_trials():
    result = run_suite(only=["graphgadget"], trials={"flattening": 5, "gadget": 3})
    assert result["clean"]
    assert len(result["rows"]) == 40


@pytest.mark.slow
def test_sepinv_section_small_trials():
    result = run_suite(only=["sepinv"], trials={"sepinv": 200, "cone": 40})
    assert result["clean"], [r["check"] for r in result["rows"] if not r["passed"]]


@pytest.mark.slow
def test_full_acceptance_suite():
    result = run_suite(seed=0, include_timing=False)
    assert result["sections"] == list(SECTIONS)
    assert result["clean"], [r["check"] for r in result["rows"] if not r["passed"]]
