import json

import pytest

import app
from config import load_settings
from data_loader import save_morphism
from morphism import Morphism
from tensors import BORDER2_RANK3, ON_CURVE, ON_HONEST_SECANT, Tensor222n


@pytest.fixture
def env(monkeypatch):
    """Settings come from this dict instead of os.environ and .env; console handlers stay off."""
    values = {}
    monkeypatch.setattr(app, "load_settings", lambda: load_settings(values))
    monkeypatch.setattr(app, "get_run_logger", lambda **kwargs: None)
    return values


def _run(capsys, *argv):
    code = app.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


def _phi1_file(tmp_path, phi1):
    path = str(tmp_path / "phi1.json")
    save_morphism(phi1, path)
    return path


def test_construct_writes_the_morphism(env, capsys, tmp_path):
    out = tmp_path / "phi1.json"
    code, report = _json(capsys, "construct", "--family", "wps_phi1", "--weights", "1,6,10,15",
                         "--out", str(out), "--no-timestamp")
    assert code == app.EXIT_CLEAN
    assert report["ambient_dimension"] == 4
    assert report["run"]["subcommand"] == "construct"
    assert "timestamp" not in report
    assert json.loads(out.read_text(encoding="utf-8"))["sections"]


def test_construct_lists_families(env, capsys):
    code, report = _json(capsys, "construct", "--list")
    assert code == app.EXIT_CLEAN
    assert any(row["family"] == "p1p1pm_graph" for row in report["families"])
    assert "timestamp" in report


def test_decode(env, capsys, tmp_path, phi1):
    path = _phi1_file(tmp_path, phi1)
    code, report = _json(capsys, "decode", "--morphism", path, "--image", "1,1,2,2,1")
    assert code == app.EXIT_CLEAN
    assert report["decoder"] == phi1.decoder
    code, _ = _run(capsys, "decode", "--morphism", path, "--image", "0,1,0,0,1")
    assert code == app.EXIT_INPUT


def test_verify_finds_the_square_map_collision(env, capsys, tmp_path, square_map):
    path = str(tmp_path / "squares.json")
    save_morphism(square_map, path)
    xlsx = tmp_path / "squares.xlsx"
    code, report = _json(capsys, "verify", "--morphism", path, "--trials", "120", "--seed", "0",
                         "--xlsx", str(xlsx), "--no-timestamp")
    assert code == app.EXIT_VIOLATION
    assert report["collisions"]
    assert xlsx.exists()


def test_verify_family_member(env, capsys):
    code, report = _json(capsys, "verify", "--family", "tangential_p1p1", "--trials", "40", "--no-timestamp")
    assert code == app.EXIT_CLEAN
    assert report["claim"]
    assert "elapsed" not in report


def test_rank2(env, capsys, tmp_path):
    t = Tensor222n.unit(0, 0, 1, 1) + Tensor222n.unit(0, 1, 0, 1) + Tensor222n.unit(1, 0, 0, 1)
    path = tmp_path / "w.json"
    path.write_text(json.dumps(t.to_json()), encoding="utf-8")
    code, report = _json(capsys, "rank2", "--tensor", str(path))
    assert code == app.EXIT_CLEAN
    assert report["decision"] == BORDER2_RANK3


def test_secant_curve_builtin(env, capsys):
    code, report = _json(capsys, "secant-curve", "--builtin", "twisted-cubic", "--point", "2,3,5,9",
                         "--point", "1,2,4,8")
    assert code == app.EXIT_CLEAN
    assert report["counts"] == {ON_CURVE: 1, ON_HONEST_SECANT: 1}
    code, _ = _run(capsys, "secant-curve", "--builtin", "quintic")
    assert code == app.EXIT_INPUT


@pytest.mark.parametrize("m", [3, 6])
def test_gadget_all_checks(env, capsys, m):
    code, report = _json(capsys, "gadget", "--m", str(m), "--trials", "6", "--seed", "2", "--no-timestamp")
    assert code == app.EXIT_CLEAN
    assert set(report["checks"]) == {"dims", "flattening", "samples", "annihilation"}
    assert report["checks"]["dims"]["dim_W"] == 2 * m - 1
    assert report["clean"] is True


def test_gadget_negative_control_subspace(env, capsys, tmp_path):
    path = tmp_path / "sub.json"
    path.write_text(json.dumps([Tensor222n.unit(0, 0, 0, 2).to_json()]), encoding="utf-8")
    code, report = _json(capsys, "gadget", "--m", "2", "--check", "samples", "--trials", "8",
                         "--subspace", str(path))
    assert code == app.EXIT_VIOLATION
    assert report["checks"]["samples"]["violations"]


def test_sepinv_default_set(env, capsys):
    code, report = _json(capsys, "sepinv", "--k", "6", "--weights", "2,2,3,3", "--primes", "13,19",
                         "--trials", "30", "--falsify", "5")
    assert code == app.EXIT_CLEAN
    assert report["primes"] == [13, 19]
    assert len(report["separation"]) == 2
    assert report["falsification"]["size"] == 5
    code, _ = _run(capsys, "sepinv", "--k", "3", "--weights", "1,2")
    assert code == app.EXIT_INPUT


def test_sepinv_cone_check_uses_the_run_primes(env, capsys):
    _, report = _json(capsys, "sepinv", "--k", "6", "--weights", "2,2,3,3", "--primes", "13,19",
                      "--trials", "12", "--cone", "--no-timestamp")
    assert report["cone_consistency"]["primes"] == [13, 19]
    assert report["cone_consistency"]["primes"] == report["primes"]


def test_reports_are_deterministic_without_timestamps(env, capsys):
    argv = ("gadget", "--m", "2", "--check", "samples", "--trials", "5", "--seed", "4", "--no-timestamp")
    assert _run(capsys, *argv) == _run(capsys, *argv)


def test_text_format_and_report_file(env, capsys, tmp_path):
    path = tmp_path / "gadget.txt"
    code, out = _run(capsys, "gadget", "--m", "2", "--check", "dims", "--format", "text", "--report", str(path))
    assert code == app.EXIT_CLEAN
    assert out == ""
    assert "clean: True" in path.read_text(encoding="utf-8")


def test_input_errors(env, capsys, tmp_path):
    assert _run(capsys, "verify", "--morphism", str(tmp_path / "missing.json"))[0] == app.EXIT_INPUT
    assert _run(capsys, "verify")[0] == app.EXIT_INPUT
    assert _run(capsys, "construct", "--family", "p1pn", "--n", "2")[0] == app.EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        app.main(["verify", "--trials", "many"])
    assert exc.value.code == 2


def test_configuration_errors_exit_with_input_code(env, capsys):
    env["INJEKT_THREADS"] = "zero"
    code = app.main(["construct", "--list"])
    assert code == app.EXIT_INPUT
    assert "configuration error" in capsys.readouterr().err


def test_unexpected_failures_are_logged_as_internal(env, capsys, caplog, monkeypatch):
    def broken(args, run):
        raise RuntimeError("boom")

    monkeypatch.setitem(app.COMMANDS, "rank2", broken)
    code = app.main(["rank2", "--tensor", "unused.json"])
    assert code == app.EXIT_INTERNAL == app.EXIT_INPUT
    assert "rank2: internal error: boom" in caplog.text
    assert "internal error" in capsys.readouterr().err


def test_suite_subcommand(env, capsys, tmp_path, phi1):
    xlsx = tmp_path / "suite.xlsx"
    code, report = _json(capsys, "suite", "--only", "constructions", "--xlsx", str(xlsx), "--no-timestamp")
    assert code == app.EXIT_CLEAN
    assert report["failed"] == 0
    assert xlsx.exists()

    broken = Morphism(phi1.source, phi1.sections[:-1], phi1.label, phi1.decoder)
    path = str(tmp_path / "broken.json")
    save_morphism(broken, path)
    code, report = _json(capsys, "suite", "--only", "constructions", "--morphism", path, "--no-timestamp")
    assert code == app.EXIT_VIOLATION
    assert report["failed"] == 1
