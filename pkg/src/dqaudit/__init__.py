"""dqaudit: data-quality auditing for tabular data."""

__version__ = "0.1.0"

from .checks import AuditConfig, audit
from .compare import diff_tables, extract_unique, match_merge, set_membership
from .findings import CHECKS, Dimension, Finding, Severity, exit_status
from .generate import inject_errors, generate_table, measure_detection
from .ingest import IngestOptions, load_csv, load_schema, load_workbook, parse_schema, write_csv
from .model import CellAddress, Column, ColumnSpec, Kind, Schema, Table
from .report import build_scorecard, render_report

__all__ = [
    "AuditConfig", "CHECKS", "CellAddress", "Column", "ColumnSpec", "Dimension", "Finding",
    "IngestOptions", "Kind", "Schema", "Severity", "Table", "audit", "build_scorecard",
    "diff_tables", "exit_status", "extract_unique", "generate_table", "inject_errors",
    "load_csv", "load_schema", "load_workbook", "match_merge", "measure_detection",
    "parse_schema", "render_report", "set_membership", "write_csv",
]
