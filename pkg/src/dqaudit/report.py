"""Scorecards and report serialization (text, JSON and annotated CSV).

JSON report layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "findings": [
        {"check_id": "range", "table": "sales", "severity": "ERROR",
         "dimension": "Validity", "message": "...", "addresses": ["sales!B3"],
         "column": "amount", "column_index": 2,
         "observed": {"type": "number", "value": "101"}, "expected": "0..100"}
      ],
      "scorecard": {
        "cells_checked": 800, "cells_flagged": 22, "overall_error_rate": "0.0275",
        "overall_error_rate_exact": "11/400",
        "dimensions": [{"dimension": "Validity", "cells_checked": 800,
                        "cells_flagged": 22, "rate": "0.0275"}],
        "manual": {"Believable": "..."}
      }
    }

Findings appear in canonical order, so identical inputs give identical bytes.
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, TextIO

from .compare import DiffResult
from .errors import WriteError
from .findings import CHECKS, MANUAL_DIMENSIONS, Dimension, Finding, Severity, sort_findings
from .generate import DetectionReport
from .ingest import write_csv
from .model import Table, a1_to_address, decode_cell, encode_cell, render

SCHEMA_VERSION = 1
FORMATS = ("text", "json", "csv")
FLAGS_COLUMN = "__dq_flags"


def rate_text(rate: Fraction, places: int = 4) -> str:
    """Fixed-point rendering with round-half-even (``Fraction(22, 800)`` -> ``0.0275``)."""
    scaled = round(Fraction(rate) * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}" if places else f"{sign}{digits}"


@dataclass(frozen=True)
class DimensionScore:
    dimension: Dimension
    cells_checked: int
    cells_flagged: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.cells_flagged, self.cells_checked) if self.cells_checked else Fraction(0)


@dataclass(frozen=True)
class Scorecard:
    """Per-dimension flagged-cell rates. A cell flagged by several checks counts once."""

    cells_checked: int
    cells_flagged: int
    dimensions: tuple[DimensionScore, ...] = ()
    manual: Mapping[Dimension, str] = field(default_factory=dict)
    findings_by_check: Mapping[str, int] = field(default_factory=dict)

    @property
    def overall_error_rate(self) -> Fraction:
        return Fraction(self.cells_flagged, self.cells_checked) if self.cells_checked else Fraction(0)

    def dimension(self, dim: Dimension) -> DimensionScore | None:
        return next((d for d in self.dimensions if d.dimension is dim), None)


def _automated_dimensions() -> list[Dimension]:
    seen = []
    for info in CHECKS.values():
        if info.dimension not in seen:
            seen.append(info.dimension)
    return sorted(seen, key=lambda d: d.value)


def build_scorecard(findings: Iterable[Finding], tables: Iterable[Table] = (), *,
                    cells_checked: int | None = None,
                    manual: Mapping[Dimension | str, str] | None = None) -> Scorecard:
    """Aggregate findings into flagged-cell counts per dimension.

    ``cells_checked`` defaults to the number of cells in ``tables``. Only
    findings with cell addresses contribute flagged cells; column- and
    table-level findings are counted in ``findings_by_check`` only.
    """
    findings = list(findings)
    checked = sum(t.cell_count for t in tables) if cells_checked is None else cells_checked
    if checked < 0:
        raise ValueError("cells_checked must be >= 0")
    flagged_all: set = set()
    per_dim: dict[Dimension, set] = {}
    by_check: dict[str, int] = {}
    for f in findings:
        by_check[f.check_id] = by_check.get(f.check_id, 0) + 1
        cells = {(a.sheet, a.row, a.column) for a in f.addresses}
        flagged_all |= cells
        per_dim.setdefault(f.dimension, set()).update(cells)
    if len(flagged_all) > checked:
        raise ValueError(f"{len(flagged_all)} flagged cells exceed {checked} checked cells")
    dims = _automated_dimensions()
    dims += sorted((d for d in per_dim if d not in dims), key=lambda d: d.value)
    scores = tuple(DimensionScore(d, checked, len(per_dim.get(d, ()))) for d in dims)
    notes = {}
    for k, v in (manual or {}).items():
        dim = k if isinstance(k, Dimension) else Dimension.parse(k)
        notes[dim] = v
    return Scorecard(checked, len(flagged_all), scores, dict(sorted(notes.items(), key=lambda kv: kv[0].value)),
                     dict(sorted(by_check.items())))


# ---------------------------------------------------------------------------
# text

def finding_line(f: Finding) -> str:
    return f"{f.location} [{f.severity.label}] {f.check_id}: {f.message}"


def _count(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def scorecard_lines(card: Scorecard) -> list[str]:
    lines = [f"scorecard: {card.cells_flagged} of {card.cells_checked} cells flagged, "
             f"overall error rate {rate_text(card.overall_error_rate)}"]
    for d in card.dimensions:
        lines.append(f"  {d.dimension.value:<20} {d.cells_flagged:>10} {rate_text(d.rate)}")
    for dim in MANUAL_DIMENSIONS:
        note = card.manual.get(dim)
        if note:
            lines.append(f"  {dim.value:<20} (manual) {note}")
    return lines


def render_text(findings: Sequence[Finding], scorecard: Scorecard | None = None) -> str:
    findings = sort_findings(findings)
    lines = ["dqaudit report v1"]
    lines += [finding_line(f) for f in findings]
    lines.append(_count(len(findings), "finding"))
    if scorecard is not None:
        lines.append("")
        lines += scorecard_lines(scorecard)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON

def finding_to_dict(f: Finding) -> dict:
    return {
        "check_id": f.check_id,
        "table": f.table,
        "severity": f.severity.label,
        "dimension": f.dimension.value,
        "message": f.message,
        "addresses": [str(a) if a.sheet else a.a1 for a in f.addresses],
        "column": f.column,
        "column_index": f.column_index,
        "observed": encode_cell(f.observed),
        "expected": f.expected,
    }


def finding_from_dict(d: dict) -> Finding:
    return Finding(
        check_id=d["check_id"], table=d["table"], message=d["message"],
        addresses=tuple(a1_to_address(a) for a in d["addresses"]),
        column=d.get("column"), observed=decode_cell(d["observed"]), expected=d.get("expected"),
        severity=Severity.parse(d["severity"]), dimension=Dimension.parse(d["dimension"]),
        column_index=d.get("column_index", 0))


def scorecard_to_dict(card: Scorecard) -> dict:
    rate = card.overall_error_rate
    return {
        "cells_checked": card.cells_checked,
        "cells_flagged": card.cells_flagged,
        "overall_error_rate": rate_text(rate),
        "overall_error_rate_exact": f"{rate.numerator}/{rate.denominator}",
        "dimensions": [{"dimension": d.dimension.value, "cells_checked": d.cells_checked,
                        "cells_flagged": d.cells_flagged, "rate": rate_text(d.rate)} for d in card.dimensions],
        "manual": {d.value: note for d, note in card.manual.items()},
        "findings_by_check": dict(card.findings_by_check),
    }


def scorecard_from_dict(d: dict) -> Scorecard:
    return Scorecard(
        d["cells_checked"], d["cells_flagged"],
        tuple(DimensionScore(Dimension.parse(x["dimension"]), x["cells_checked"], x["cells_flagged"])
              for x in d["dimensions"]),
        {Dimension.parse(k): v for k, v in d.get("manual", {}).items()},
        dict(d.get("findings_by_check", {})))


def render_json(findings: Sequence[Finding], scorecard: Scorecard | None = None,
                tables: Sequence[Table] = ()) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tables": [{"name": t.name, "rows": t.row_count, "columns": len(t.columns)} for t in tables],
        "findings": [finding_to_dict(f) for f in sort_findings(findings)],
        "scorecard": None if scorecard is None else scorecard_to_dict(scorecard),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_json_report(text: str) -> tuple[list[Finding], Scorecard | None]:
    doc = json.loads(text)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {version!r}")
    findings = [finding_from_dict(d) for d in doc["findings"]]
    card = doc.get("scorecard")
    return findings, None if card is None else scorecard_from_dict(card)


# ---------------------------------------------------------------------------
# annotated CSV

def row_flags(table: Table, findings: Iterable[Finding]) -> list[str]:
    """Per data row, the sorted check ids of findings addressing a cell in that row."""
    flags: list[set[str]] = [set() for _ in range(table.row_count)]
    for f in findings:
        for a in f.addresses:
            if a.sheet == table.name and 1 <= a.row <= table.row_count:
                flags[a.row - 1].add(f.check_id)
    return [";".join(sorted(s)) for s in flags]


def render_annotated(table: Table, findings: Iterable[Finding]) -> str:
    buf = io.StringIO(newline="")
    write_csv(table, buf, extra=(FLAGS_COLUMN, row_flags(table, findings)))
    return buf.getvalue()


def render_report(findings: Sequence[Finding], scorecard: Scorecard | None = None, fmt: str = "text", *,
                  table: Table | None = None, tables: Sequence[Table] = ()) -> str:
    """Render findings as ``text``, ``json`` or ``csv`` (the annotated source table)."""
    if fmt == "text":
        return render_text(findings, scorecard)
    if fmt == "json":
        return render_json(findings, scorecard, tables or ([table] if table is not None else []))
    if fmt == "csv":
        if table is None:
            raise ValueError("the annotated-table format needs the source table")
        return render_annotated(table, findings)
    raise ValueError(f"format must be one of {FORMATS}")


def write_report(document: str, dest: str | os.PathLike | TextIO) -> None:
    if isinstance(dest, (str, os.PathLike)):
        try:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(document)
        except OSError as exc:
            raise WriteError(f"cannot write {dest}: {exc.strerror or exc}") from exc
        return
    try:
        dest.write(document)
    except OSError as exc:
        raise WriteError(f"cannot write report: {exc}") from exc


# ---------------------------------------------------------------------------
# diffs and detection reports

def render_diff(result: DiffResult, fmt: str = "text") -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "aligned_by": result.aligned_by,
            "key": list(result.key),
            "shape_diff": result.shape_diff,
            "cell_diffs": [{"address": str(d.address), "right_address": str(d.right_address) if d.right_address else None,
                            "column": d.column, "left": encode_cell(d.left), "right": encode_cell(d.right),
                            "delta": None if d.delta is None else render(d.delta)} for d in result.cell_diffs],
            "left_only_rows": list(result.left_only_rows),
            "right_only_rows": list(result.right_only_rows),
            "left_only_columns": list(result.left_only_columns),
            "right_only_columns": list(result.right_only_columns),
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError("diff output format must be text or json")
    lines = [f"dqaudit diff v1 ({result.aligned_by}{' on ' + ', '.join(result.key) if result.key else ''})"]
    if result.shape_diff:
        lines.append(f"shape: {result.shape_diff}")
    for label, names in (("left-only columns", result.left_only_columns),
                         ("right-only columns", result.right_only_columns)):
        if names:
            lines.append(f"{label}: {', '.join(names)}")
    for d in result.cell_diffs:
        left = "null" if d.left is None else render(d.left)
        right = "null" if d.right is None else render(d.right)
        delta = f" (delta {render(d.delta)})" if d.delta is not None else ""
        lines.append(f"{d.address}: {left} -> {right}{delta}")
    for label, rows in (("left-only rows", result.left_only_rows), ("right-only rows", result.right_only_rows)):
        if rows:
            lines.append(f"{label}: {', '.join(map(str, rows))}")
    lines.append(_count(len(result.cell_diffs), "difference"))
    return "\n".join(lines) + "\n"


def render_detection(report: DetectionReport) -> str:
    lines = ["dqaudit detection v1"]
    for label, k in report.per_kind.items():
        lines.append(f"{label}: injected {k.injected}, detected {k.detected}, recall {k.recall_text}")
    p = report.precision
    lines.append(f"precision {'N/A' if p is None else rate_text(p)} "
                 f"({report.matching_findings} of {report.total_findings} findings)")
    return "\n".join(lines) + "\n"
