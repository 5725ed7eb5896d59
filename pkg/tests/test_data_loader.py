import json
import logging

import pytest

from data_loader import (InputFormatError, dump_json, load_curve, load_invariant_set, load_json, load_morphism,
                         load_tensor, render_text, save_morphism, write_report)
from sepinv import z6_example_sets
from tensors import Tensor222n, quintic_curve


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_load_json_errors_name_the_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(InputFormatError) as exc:
        load_json(str(bad))
    assert exc.value.path == str(bad)
    assert "line 1" in str(exc.value)
    with pytest.raises(InputFormatError):
        load_json(str(tmp_path / "missing.json"))


def test_morphism_round_trip(tmp_path, phi1):
    path = str(tmp_path / "phi1.json")
    save_morphism(phi1, path)
    assert load_morphism(path) == phi1


def test_morphism_requires_sections(tmp_path, phi1):
    data = phi1.to_json()
    del data["sections"]
    with pytest.raises(InputFormatError) as exc:
        load_morphism(_write(tmp_path / "m.json", data))
    assert "sections" in str(exc.value)
    with pytest.raises(InputFormatError):
        load_morphism(_write(tmp_path / "list.json", [1, 2]))


def test_load_tensor_and_curve(tmp_path):
    t = Tensor222n.unit(0, 0, 1, 1) + Tensor222n.unit(1, 1, 0, 1)
    assert load_tensor(_write(tmp_path / "t.json", t.to_json())) == t
    assert load_curve(_write(tmp_path / "c.json", quintic_curve().to_json())) == quintic_curve()


def test_load_invariant_set_from_a_full_document(tmp_path):
    _, small = z6_example_sets()
    loaded = load_invariant_set(_write(tmp_path / "e.json", small.to_json()))
    assert loaded.names == small.names
    assert (loaded.k, loaded.weights) == (6, (2, 2, 3, 3))


def test_load_invariant_set_from_a_bare_list(tmp_path):
    _, small = z6_example_sets()
    path = _write(tmp_path / "e.json", small.to_json()["polynomials"])
    loaded = load_invariant_set(path, 6, (2, 2, 3, 3))
    assert len(loaded) == 6
    assert loaded.names[0] == "f0"
    with pytest.raises(InputFormatError):
        load_invariant_set(path)


def test_command_line_group_overrides_the_file(tmp_path, caplog):
    _, small = z6_example_sets()
    data = small.to_json()
    data["k"] = 12
    path = _write(tmp_path / "e.json", data)
    with caplog.at_level(logging.WARNING):
        loaded = load_invariant_set(path, 6, (2, 2, 3, 3))
    assert loaded.k == 6
    assert "overrides" in caplog.text


def test_render_text_layout():
    text = render_text({"b": [1, {"c": 2}], "a": 1, "empty": []})
    assert text == "a: 1\nb:\n  - 1\n  -\n    c: 2\nempty: []"


def test_write_report_json_and_text(tmp_path):
    report = {"clean": True, "counts": {"x": 1}}
    text = write_report(report, include_timestamp=False)
    assert json.loads(text) == report
    assert "timestamp" in json.loads(write_report(report))
    path = tmp_path / "r.txt"
    rendered = write_report(report, str(path), fmt="text", include_timestamp=False)
    assert path.read_text(encoding="utf-8") == rendered + "\n"
    assert "clean: True" in rendered


def test_dump_json_sorts_keys():
    assert dump_json({"b": 1, "a": 2}).index('"a"') < dump_json({"b": 1, "a": 2}).index('"b"')
