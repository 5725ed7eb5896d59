from openpyxl import load_workbook

from excel_generator import SUITE_COLUMNS, create_suite_workbook, create_verification_workbook
from morphism import VerificationReport


def _rows():
    return [
        {"claim": "phi1 is injective", "section": "collision", "check": "no collisions", "passed": True,
         "trials": 100, "evidence": "sampled", "detail": {"violations": 0}, "elapsed": 0.5},
        {"claim": "squares", "section": "collision", "check": "no collisions", "passed": False,
         "trials": 100, "evidence": "sampled", "detail": None, "elapsed": 0.1},
    ]


def test_suite_workbook(tmp_path):
    path = str(tmp_path / "suite.xlsx")
    assert create_suite_workbook(_rows(), path) == 1
    ws = load_workbook(path)["Acceptance Suite"]
    assert [c.value for c in ws[1]] == [title for title, _, _ in SUITE_COLUMNS]
    assert ws["D2"].value == "PASS"
    assert ws["D3"].value == "FAIL"
    assert ws["G2"].value == '{"violations": 0}'
    assert ws["A5"].value == "Total"
    assert ws["C5"].value == "1 passed, 1 failed"
    assert ws["D5"].value == "FAIL"
    assert ws["A1"].fill.start_color.rgb.endswith("A6C9EC")


def _result_value(ws):
    for row in ws.iter_rows(min_col=1, max_col=2):
        if row[0].value == "Result":
            return row[1].value
    return None


def test_verification_workbook_lists_witnesses(tmp_path):
    data = {
        "label": "squares", "trials": 2, "seed": 0, "strata": ["generic"], "evidence": "sampled",
        "collisions": [{"trial": 0, "strategy": "sign-flip", "x": [["1", "1"]], "y": [["-1", "1"]],
                        "image": [["1", "1"]]}],
        "base_locus_hits": [], "clean": False, "notes": ["sampled only"],
    }
    path = str(tmp_path / "verify.xlsx")
    assert create_verification_workbook(data, path) == 1
    wb = load_workbook(path)
    assert _result_value(wb["Summary"]) == "FAIL"
    wit = wb["Witnesses"]
    assert wit["A2"].value == "collisions"
    assert wit["C2"].value == "sign-flip"
    assert wit["D2"].value == '[["1", "1"]]'


def test_verification_workbook_from_a_clean_report(tmp_path):
    path = str(tmp_path / "clean.xlsx")
    assert create_verification_workbook(VerificationReport(label="x", trials=3), path) == 0
    wb = load_workbook(path)
    assert _result_value(wb["Summary"]) == "PASS"
    assert wb["Witnesses"].max_row == 1
