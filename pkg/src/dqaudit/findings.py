"""Findings, severities and the information-quality dimension taxonomy."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import CellAddress, CellValue, column_letters, sort_key


class Dimension(enum.Enum):
    ACCESSIBLE = "Accessible"
    ACCURACY = "Accuracy"
    APPROPRIATE_AMOUNT = "Appropriate Amount"
    ATOMIC = "Atomic"
    BELIEVABLE = "Believable"
    COMPLETE = "Complete"
    CONCISE = "Concise"
    COVERAGE = "Coverage"
    CONFORMITY = "Conformity"
    CONSISTENT = "Consistent"
    COHERENCE = "Coherence"
    INTERPRETABLE = "Interpretable"
    MEANING = "Meaning"
    OBJECTIVE = "Objective"
    REDUNDANCY = "Redundancy"
    RELEVANT = "Relevant"
    REPUTABLE = "Reputable"
    SECURE = "Secure"
    TIMELY = "Timely"
    UNDERSTANDABLE = "Understandable"
    USABILITY = "Usability"
    VALUE = "Value"
    VALIDITY = "Validity"

    @classmethod
    def parse(cls, text: str) -> Dimension:
        for d in cls:
            if d.value.lower() == text.strip().lower() or d.name.lower() == text.strip().lower():
                return d
        raise ValueError(f"unknown quality dimension {text!r}")


# Dimensions no automated check can score; kept as free-text annotations.
MANUAL_DIMENSIONS = (
    Dimension.BELIEVABLE, Dimension.REPUTABLE, Dimension.OBJECTIVE,
    Dimension.VALUE, Dimension.SECURE, Dimension.ACCESSIBLE, Dimension.TIMELY,
)


class Severity(enum.IntEnum):
    INFO = 0
    WARNING = 1
    ERROR = 2

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> Severity:
        return cls[text.strip().upper()]


@dataclass(frozen=True)
class CheckInfo:
    check_id: str
    dimension: Dimension
    severity: Severity
    description: str


# Every check the engine can emit. ``--help`` lists exactly these ids.
CHECKS: dict[str, CheckInfo] = {c.check_id: c for c in (
    CheckInfo("structure", Dimension.CONFORMITY, Severity.WARNING, "short or long source rows"),
    CheckInfo("schema", Dimension.INTERPRETABLE, Severity.ERROR, "schema columns missing from the table, or unexpected columns"),
    CheckInfo("ambiguity", Dimension.INTERPRETABLE, Severity.WARNING, "more than one column with the same name"),
    CheckInfo("completeness", Dimension.COMPLETE, Severity.ERROR, "null in a non-nullable column"),
    CheckInfo("type", Dimension.VALIDITY, Severity.ERROR, "cell variant differs from the declared type"),
    CheckInfo("range", Dimension.VALIDITY, Severity.ERROR, "number or date outside min..max"),
    CheckInfo("values", Dimension.VALIDITY, Severity.ERROR, "value not in the restricted list"),
    CheckInfo("size", Dimension.VALIDITY, Severity.ERROR, "text longer than the maximum size"),
    CheckInfo("precision", Dimension.CONFORMITY, Severity.WARNING, "more fractional digits than declared"),
    CheckInfo("format", Dimension.CONFORMITY, Severity.WARNING, "value does not match the format pattern"),
    CheckInfo("primary_key", Dimension.REDUNDANCY, Severity.ERROR, "duplicate or null primary key"),
    CheckInfo("foreign_key", Dimension.COHERENCE, Severity.ERROR, "foreign key value absent from the parent table"),
    CheckInfo("consistency", Dimension.CONSISTENT, Severity.ERROR, "row violates a when/expect rule"),
    CheckInfo("rule_binding", Dimension.CONSISTENT, Severity.ERROR, "rule references an unknown column"),
    CheckInfo("atomicity", Dimension.ATOMIC, Severity.WARNING, "text cell holds several values"),
    CheckInfo("duplicates", Dimension.REDUNDANCY, Severity.WARNING, "whole-row duplicate records"),
    CheckInfo("gaps", Dimension.COVERAGE, Severity.WARNING, "missing or irregular values in a key sequence"),
    CheckInfo("suspicious", Dimension.ACCURACY, Severity.WARNING, "placeholder-like values (99999, 2001-01-01, TBD)"),
    CheckInfo("dominance", Dimension.ACCURACY, Severity.WARNING, "one value dominates a column (valid but possibly incorrect)"),
    CheckInfo("outliers", Dimension.ACCURACY, Severity.WARNING, "value outside the Tukey fences"),
    CheckInfo("benford", Dimension.ACCURACY, Severity.WARNING, "leading digits deviate from Benford's law"),
    CheckInfo("timeliness", Dimension.TIMELY, Severity.WARNING, "source older than --max-age"),
)}


@dataclass(frozen=True)
class Finding:
    """One detected defect.

    Cell-level findings list their cells in ``addresses``; column-level
    findings name ``column`` and may leave ``addresses`` empty; table-level
    findings have neither.
    """

    check_id: str
    table: str
    message: str
    addresses: tuple[CellAddress, ...] = ()
    column: str | None = None
    observed: CellValue = None
    expected: str | None = None
    severity: Severity | None = None
    dimension: Dimension | None = None
    column_index: int = 0

    def __post_init__(self):
        info = CHECKS.get(self.check_id)
        if self.severity is None:
            object.__setattr__(self, "severity", info.severity if info else Severity.WARNING)
        if self.dimension is None:
            if info is None:
                raise ValueError(f"unregistered check {self.check_id!r} needs an explicit dimension")
            object.__setattr__(self, "dimension", info.dimension)
        object.__setattr__(self, "addresses", tuple(self.addresses))

    @property
    def location(self) -> str:
        """``table!A1`` for cells, ``table!C:C`` for columns, ``table`` otherwise."""
        if self.addresses:
            return str(self.addresses[0])
        if self.column_index:
            letters = column_letters(self.column_index)
            return f"{self.table}!{letters}:{letters}"
        return self.table

    def sort_key(self) -> tuple:
        if self.addresses:
            first = (self.addresses[0].row, self.addresses[0].column)
        else:
            first = (0, self.column_index)
        return (self.table, self.check_id, first, self.column or "", self.message,
                self.expected or "", sort_key(self.observed), len(self.addresses))


def sort_findings(findings) -> list[Finding]:
    return sorted(findings, key=Finding.sort_key)


def exit_status(findings) -> int:
    """0 no findings, 1 warnings only, 2 errors present. Info findings do not count."""
    worst = max((f.severity for f in findings), default=Severity.INFO)
    if worst is Severity.ERROR:
        return 2
    if worst is Severity.WARNING:
        return 1
    return 0
