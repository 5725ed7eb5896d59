# excel_generator.py
import json
import logging

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

logger = logging.getLogger(__name__)

SUITE_COLUMNS = [
    ("Claim", "claim", 28),
    ("Section", "section", 16),
    ("Check", "check", 40),
    ("Result", "passed", 10),
    ("Trials", "trials", 10),
    ("Evidence", "evidence", 20),
    ("Detail", "detail", 60),
    ("Elapsed (s)", "elapsed", 12),
]

WITNESS_KINDS = ("collisions", "base_locus_hits", "roundtrip_failures", "equivariance_failures")

header_font = Font(bold=True)
header_fill = PatternFill(start_color="A6C9EC", end_color="A6C9EC", fill_type="solid")
pass_fill = PatternFill(start_color="C6EFCE", end_color="C6EFCE", fill_type="solid")
fail_fill = PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid")
center_alignment = Alignment(horizontal='center', vertical='center', wrap_text=True)
wrap_alignment = Alignment(vertical='top', wrap_text=True)
thin_border = Border(
    left=Side(style='thin'),
    right=Side(style='thin'),
    top=Side(style='thin'),
    bottom=Side(style='thin')
)


def _write_header(ws, row, headers):
    for col, title in enumerate(headers, start=1):
        cell = ws.cell(row=row, column=col, value=title)
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = center_alignment
        cell.border = thin_border


def _result_cell(cell, passed):
    cell.value = "PASS" if passed else "FAIL"
    cell.fill = pass_fill if passed else fail_fill
    cell.alignment = center_alignment


def _cell_text(value):
    if value is None:
        return ""
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    return value


def create_suite_workbook(rows, output_filepath):
    """
    Write acceptance-suite rows to a one-sheet workbook.

    Args:
        rows (list): dicts with claim, section, check, passed, trials, evidence, detail, elapsed
        output_filepath (str): .xlsx path

    Returns:
        int: number of failing rows
    """
    wb = Workbook()
    ws = wb.active
    ws.title = "Acceptance Suite"

    for col, (_, _, width) in enumerate(SUITE_COLUMNS, start=1):
        ws.column_dimensions[get_column_letter(col)].width = width
    _write_header(ws, 1, [title for title, _, _ in SUITE_COLUMNS])
    ws.freeze_panes = 'A2'

    failures = 0
    for r, row in enumerate(rows, start=2):
        for col, (_, key, _) in enumerate(SUITE_COLUMNS, start=1):
            cell = ws.cell(row=r, column=col)
            cell.border = thin_border
            if key == "passed":
                _result_cell(cell, bool(row.get("passed")))
            else:
                cell.value = _cell_text(row.get(key))
                cell.alignment = wrap_alignment
        if not row.get("passed"):
            failures += 1

    total_row = len(rows) + 3
    ws.cell(row=total_row, column=1, value="Total").font = header_font
    ws.cell(row=total_row, column=3, value=f"{len(rows) - failures} passed, {failures} failed")
    _result_cell(ws.cell(row=total_row, column=4), failures == 0)

    wb.save(output_filepath)
    logger.info(f"Acceptance suite workbook saved to {output_filepath}")
    return failures


def create_verification_workbook(report, output_filepath):
    """
    Workbook for one verification report: a summary sheet and one sheet of witnesses.

    `report` is a VerificationReport or its JSON dict.
    """
    data = report.to_json() if hasattr(report, "to_json") else dict(report)
    wb = Workbook()
    ws = wb.active
    ws.title = "Summary"
    ws.column_dimensions['A'].width = 24
    ws.column_dimensions['B'].width = 60
    _write_header(ws, 1, ["Field", "Value"])

    summary = [
        ("Label", data.get("label")),
        ("Claim", data.get("claim")),
        ("Trials", data.get("trials")),
        ("Seed", data.get("seed")),
        ("Strata", ", ".join(data.get("strata") or [])),
        ("Evidence", data.get("evidence")),
    ]
    summary += [(kind.replace("_", " ").capitalize(), len(data.get(kind) or [])) for kind in WITNESS_KINDS]
    if "elapsed" in data:
        summary.append(("Elapsed (s)", data["elapsed"]))
    for r, (name, value) in enumerate(summary, start=2):
        ws.cell(row=r, column=1, value=name).border = thin_border
        cell = ws.cell(row=r, column=2, value=_cell_text(value))
        cell.border = thin_border
        cell.alignment = wrap_alignment
    verdict_row = len(summary) + 2
    ws.cell(row=verdict_row, column=1, value="Result").font = header_font
    _result_cell(ws.cell(row=verdict_row, column=2), bool(data.get("clean")))
    for i, note in enumerate(data.get("notes") or [], start=verdict_row + 2):
        ws.cell(row=i, column=1, value="Note")
        ws.cell(row=i, column=2, value=note).alignment = wrap_alignment

    wit = wb.create_sheet("Witnesses")
    headers = ["Kind", "Trial", "Strategy", "x", "y", "Image", "Other"]
    for col, width in enumerate([22, 8, 16, 36, 36, 36, 40], start=1):
        wit.column_dimensions[get_column_letter(col)].width = width
    _write_header(wit, 1, headers)
    wit.freeze_panes = 'A2'
    r = 2
    for kind in WITNESS_KINDS:
        for w in data.get(kind) or []:
            extra = {k: v for k, v in w.items() if k not in ("trial", "strategy", "x", "y", "image")}
            values = [kind, w.get("trial"), w.get("strategy"), w.get("x"), w.get("y"), w.get("image"), extra or None]
            for col, value in enumerate(values, start=1):
                cell = wit.cell(row=r, column=col, value=_cell_text(value))
                cell.border = thin_border
                cell.alignment = wrap_alignment
            r += 1

    wb.save(output_filepath)
    logger.info(f"Verification workbook saved to {output_filepath} ({r - 2} witnesses)")
    return r - 2
