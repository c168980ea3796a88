"""The validation engine: per-schema checks and the audit runner.

Every check is a pure function returning a list of :class:`Finding`;
:func:`audit` runs a configured set of them, optionally on a thread pool,
and returns the merged findings in canonical order.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import Decimal
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import analytics
from .analytics import SuspiciousPatterns, address
from .errors import (MissingColumnError, NoKeyDefinedError, NonOrderableError, NotNumericError,
                     RuleBindingError, TooFewValuesError)
from .findings import CHECKS, Finding, Severity, sort_findings
from .model import (CellAddress, CellValue, Column, ColumnSpec, Kind, NumericData, Ordering, Schema,
                    Table, compare_values, decimal_parts, kind_of, map_distinct, render, sort_key)
from .parsing import is_date_picture
from .rules import ConsistencyRule

log = logging.getLogger(__name__)

DEFAULT_DELIMITERS = (";", "|")

# checks run when no explicit selection is made; timeliness needs --max-age
DEFAULT_CHECKS = tuple(c for c in CHECKS if c != "timeliness")


def _cell_finding(check_id: str, col: Column, i: int, message: str, value: CellValue,
                  expected: str | None = None, **kw) -> Finding:
    return Finding(check_id, col.table, message, addresses=(address(col, i),), column=col.name,
                   observed=value, expected=expected, column_index=col.index, **kw)


def _columns_for(table: Table, schema: Schema):
    """(column, spec) pairs for schema columns present in the table."""
    for spec in schema.columns:
        for col in table.columns:
            if col.name == spec.name:
                yield col, spec
                break


# ---------------------------------------------------------------------------
# structure and schema binding

def check_structure(table: Table) -> list[Finding]:
    """One finding per short or long source row recorded at ingestion."""
    out = []
    for w in table.warnings:
        width = max(len(table.columns), 1)
        col = min(w.found + 1, width) if w.found < w.expected else width
        kind = "short" if w.found < w.expected else "long"
        fix = "padded with null" if kind == "short" else "extra fields dropped"
        out.append(Finding("structure", table.name,
                           f"line {w.line}: {kind} row has {w.found} fields, expected {w.expected} ({fix})",
                           addresses=(CellAddress(table.name, w.row, col),),
                           expected=f"{w.expected} fields"))
    return out


def check_schema_binding(table: Table, schema: Schema) -> list[Finding]:
    """Schema columns missing from the table (Error) and unexpected table columns (Warning)."""
    out = []
    headers = set(table.headers)
    for spec in schema.columns:
        if spec.name not in headers:
            out.append(Finding("schema", table.name, f"column {spec.name!r} declared in the schema is missing",
                               column=spec.name))
    declared = set(schema.names)
    for col in table.columns:
        if col.name not in declared:
            out.append(Finding("schema", table.name, f"column {col.name!r} is not declared in the schema",
                               column=col.name, column_index=col.index, severity=Severity.WARNING))
    return out


def check_ambiguity(table: Table) -> list[Finding]:
    """One finding per group of headers equal after trimming and case folding."""
    groups: dict[str, list[Column]] = {}
    for col in table.columns:
        groups.setdefault(col.name.strip().casefold(), []).append(col)
    out = []
    for cols in groups.values():
        if len(cols) > 1:
            names = ", ".join(f"{c.name!r} ({c.index})" for c in cols)
            out.append(Finding("ambiguity", table.name, f"{len(cols)} columns share the name: {names}",
                               column=cols[0].name, column_index=cols[0].index))
    return out


# ---------------------------------------------------------------------------
# completeness and validity

def check_completeness(table: Table, schema: Schema) -> list[Finding]:
    """One finding per Null cell in a non-nullable column."""
    out = []
    for col, spec in _columns_for(table, schema):
        if spec.nullable:
            continue
        for i in np.flatnonzero(col.null_mask()).tolist():
            out.append(_cell_finding("completeness", col, i, "missing value in a required column", None,
                                     "a value"))
    return out


def _bound_ints(bound: Decimal, scale: int) -> int:
    u, s = decimal_parts(bound)
    return u * 10 ** (scale - s)


def _numeric_range(col: Column, nd: NumericData, spec: ColumnSpec) -> list[Finding]:
    lo, hi = spec.range
    bound_scale = max(decimal_parts(b)[1] for b in (lo, hi) if b is not None)
    ints, scale = nd.aligned(bound_scale)
    live = ~nd.null
    below = np.zeros(len(ints), bool)
    above = np.zeros(len(ints), bool)
    if lo is not None:
        below = live & (ints < _bound_ints(lo, scale))
    if hi is not None:
        above = live & (ints > _bound_ints(hi, scale))
    out = []
    for i in np.flatnonzero(below | above).tolist():
        v = nd.value(i)
        if below[i]:
            msg = f"value {render(v)} below min {render(lo)}"
        else:
            msg = f"value {render(v)} above max {render(hi)}"
        out.append(_cell_finding("range", col, i, msg, v, _range_text(spec.range)))
    return out


def _range_text(rng) -> str:
    lo, hi = rng
    return f"{'' if lo is None else render(lo)}..{'' if hi is None else render(hi)}"


def _value_keys(spec: ColumnSpec) -> set:
    if spec.casefold:
        return {render(v).casefold() if kind_of(v) is Kind.TEXT else sort_key(v) for v in spec.restricted_values}
    return {sort_key(v) for v in spec.restricted_values}


def _values_text(spec: ColumnSpec) -> str:
    return "{" + ", ".join(render(v) for v in spec.restricted_values) + "}"


def _numeric_values(col: Column, nd: NumericData, spec: ColumnSpec) -> list[Finding]:
    allowed = [v for v in spec.restricted_values if kind_of(v) is Kind.NUMBER]
    scale = max([decimal_parts(v)[1] for v in allowed], default=0)
    ints, scale = nd.aligned(scale)
    allowed_ints = [_bound_ints(v, scale) for v in allowed]
    if ints.dtype == object or any(abs(a) >= 2**63 for a in allowed_ints):
        keys = set(allowed_ints)
        bad = np.array([x not in keys for x in ints.tolist()], dtype=bool)
    else:
        bad = ~np.isin(ints, np.array(allowed_ints, dtype=np.int64))
    bad &= ~nd.null
    expected = _values_text(spec)
    return [_cell_finding("values", col, i, f"value {render(nd.value(i))} not in {expected}",
                          nd.value(i), expected) for i in np.flatnonzero(bad).tolist()]


def validate_column(col: Column, spec: ColumnSpec) -> list[Finding]:
    """Type, range, restricted-value, size, precision and format findings for one column."""
    kind = spec.data_type
    out: list[Finding] = []
    fmt = spec.format_pattern
    date_picture = bool(fmt) and kind is Kind.DATE and is_date_picture(fmt)
    regex = re.compile(fmt) if fmt and not date_picture else None
    nd = col.numeric if kind is Kind.NUMBER else None
    if nd is not None:
        # all-number column: vectorized scans
        if spec.range is not None:
            out += _numeric_range(col, nd, spec)
        if spec.restricted_values is not None:
            out += _numeric_values(col, nd, spec)
        if spec.precision is not None:
            for i in np.flatnonzero((nd.scale > spec.precision) & ~nd.null).tolist():
                v = nd.value(i)
                out.append(_cell_finding("precision", col, i,
                                         f"value {render(v)} has {int(nd.scale[i])} decimal places, "
                                         f"declared {spec.precision}", v, f"<= {spec.precision} decimal places"))
        if regex is not None:
            for i, text in enumerate(_strings(col)):
                if text is not None and not regex.fullmatch(text):
                    out.append(_cell_finding("format", col, i, f"value {text} does not match format {fmt}",
                                             nd.value(i), fmt))
        return out

    keys = _value_keys(spec) if spec.restricted_values is not None else None
    rng = spec.range
    lo, hi = rng if rng is not None else (None, None)
    expected_values = _values_text(spec) if keys is not None else None

    def verdict(v: CellValue) -> tuple:
        if v is None:
            return ()
        k = kind_of(v)
        if k is not kind:
            if date_picture and k is Kind.TEXT:
                return (("format", f"value {v!r} does not match format {fmt}", fmt),)
            return (("type", f"{k.label} value {render(v)!r} in a {kind.label} column", kind.label),)
        found = []
        if lo is not None and compare_values(v, lo) is Ordering.LESS:
            found.append(("range", f"value {render(v)} below min {render(lo)}", _range_text(rng)))
        elif hi is not None and compare_values(v, hi) is Ordering.GREATER:
            found.append(("range", f"value {render(v)} above max {render(hi)}", _range_text(rng)))
        if keys is not None:
            key = v.casefold() if spec.casefold and k is Kind.TEXT else sort_key(v)
            if key not in keys:
                found.append(("values", f"value {render(v)} not in {expected_values}", expected_values))
        if spec.max_size is not None and k is Kind.TEXT and len(v) > spec.max_size:
            found.append(("size", f"text of length {len(v)} exceeds size {spec.max_size}",
                          f"<= {spec.max_size} characters"))
        if spec.precision is not None and k is Kind.NUMBER:
            places = decimal_parts(v)[1]
            if places > spec.precision:
                found.append(("precision", f"value {render(v)} has {places} decimal places, "
                              f"declared {spec.precision}", f"<= {spec.precision} decimal places"))
        if regex is not None and not regex.fullmatch(render(v)):
            found.append(("format", f"value {render(v)} does not match format {fmt}", fmt))
        return tuple(found)

    cells = col.cells
    for i, found in enumerate(map_distinct(col, verdict, exact_numbers=True)):
        for check_id, message, expected in found:
            out.append(_cell_finding(check_id, col, i, message, cells[i], expected))
    return out


def _strings(col: Column) -> list[str | None]:
    from .ingest import column_strings
    strings = column_strings(col)
    mask = col.null_mask()
    return [None if m else s for s, m in zip(strings, mask.tolist())]


def check_validity(table: Table, schema: Schema) -> list[Finding]:
    """Type, range, restricted-value, size, precision and format findings.

    Nulls are never reported here (completeness owns them).
    """
    out = []
    for col, spec in _columns_for(table, schema):
        out += validate_column(col, spec)
    return out


# ---------------------------------------------------------------------------
# keys

def check_primary_key(table: Table, schema: Schema) -> list[Finding]:
    """One finding per duplicate key group, plus one per row with a null key cell."""
    names = schema.primary_key
    if not names:
        raise NoKeyDefinedError(f"schema for {schema.table!r} declares no primary key")
    cols = [table.column(n) for n in names]
    out = []
    null_rows = np.zeros(table.row_count, bool)
    for c in cols:
        null_rows |= c.null_mask()
    for i in np.flatnonzero(null_rows).tolist():
        out.append(Finding("primary_key", table.name, "null in primary key",
                           addresses=tuple(address(c, i) for c in cols if c[i] is None),
                           column=cols[0].name, column_index=cols[0].index, expected="a unique non-null key"))
    if table.row_count:
        codes = analytics.row_codes(cols)
        codes[null_rows] = -1 - np.arange(int(null_rows.sum()))   # null keys never group
        _, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
        dup = np.flatnonzero(counts[inverse.ravel()] > 1)
        groups: dict[int, list[int]] = {}
        for r, c in zip(dup.tolist(), codes[dup].tolist()):
            groups.setdefault(c, []).append(r)
        for rows in sorted(groups.values(), key=lambda g: g[0]):
            key = tuple(c[rows[0]] for c in cols)
            shown = ", ".join(render(v) for v in key)
            row_list = ", ".join(str(r + 1) for r in rows)
            out.append(Finding("primary_key", table.name,
                               f"key ({shown}) appears {len(rows)} times (rows {row_list})",
                               addresses=tuple(address(c, r) for r in rows for c in cols),
                               column=cols[0].name, observed=key[0] if len(key) == 1 else shown,
                               column_index=cols[0].index, expected="a unique non-null key"))
    return out


def check_referential_integrity(child: Table, parent: Table, fk: ColumnSpec) -> list[Finding]:
    """Child foreign-key cells whose value is absent from the parent key column.

    Null child cells are skipped (completeness decides whether they are allowed).
    """
    if fk.foreign_key is None:
        raise ValueError(f"column {fk.name!r} has no foreign key")
    parent_name, parent_col = fk.foreign_key
    col = child.column(fk.name)
    pcol = parent.column(parent_col)
    target = f"{parent_name}.{parent_col}"
    cnd, pnd = col.numeric, pcol.numeric
    if cnd is not None and pnd is not None and len(pcol):
        scale = max(cnd.max_scale, pnd.max_scale)
        ci, _ = cnd.aligned(scale)
        pi, _ = pnd.aligned(scale)
        pi = pi[~pnd.null]
        if ci.dtype == object or pi.dtype == object:
            keys = set(pi.tolist())
            bad = np.array([x not in keys for x in ci.tolist()], dtype=bool)
        else:
            bad = ~np.isin(ci, pi)
        bad &= ~cnd.null
        rows = np.flatnonzero(bad).tolist()
        values = [cnd.value(i) for i in rows]
    else:
        keys = {sort_key(v) for v in pcol.cells if v is not None}
        cells = col.cells
        rows = [i for i, v in enumerate(cells) if v is not None and sort_key(v) not in keys]
        values = [cells[i] for i in rows]
    return [_cell_finding("foreign_key", col, i, f"value {render(v)} not found in {target}", v, f"a value of {target}")
            for i, v in zip(rows, values)]


# ---------------------------------------------------------------------------
# rules and atomicity

def bind_rule(table: Table, rule: ConsistencyRule) -> list[Column]:
    missing = [c for c in rule.columns if not table.has_column(c)]
    if missing:
        raise RuleBindingError(f"rule {rule.name!r} references unknown column(s): {', '.join(missing)}")
    return [table.column(c) for c in rule.columns]


def _predicate_mask(table: Table, predicate) -> np.ndarray:
    mask = np.ones(table.row_count, dtype=bool)
    for term in predicate.terms:
        col = table.column(term.column)
        mask &= np.array(map_distinct(col, term.holds), dtype=bool)
    return mask


def check_consistency(table: Table, rules: Sequence[ConsistencyRule]) -> list[Finding]:
    """For each row where a rule's ``when`` holds and ``expect`` fails, one
    finding citing the cells of every column the rule mentions."""
    out = []
    for rule in rules:
        cols = bind_rule(table, rule)
        names = [c.name for c in cols]
        violated = _predicate_mask(table, rule.when) & ~_predicate_mask(table, rule.expect)
        for i in np.flatnonzero(violated).tolist():
            values = [c.cells[i] for c in cols]
            shown = ", ".join(f"{n}={render(v) if v is not None else 'null'}" for n, v in zip(names, values))
            out.append(Finding("consistency", table.name, f"rule {rule.name} violated: {shown}",
                               addresses=tuple(address(c, i) for c in cols), column=names[0],
                               column_index=cols[0].index, expected=str(rule.expect)))
    return out


def check_atomicity(table: Table, delimiters: Iterable[str] = DEFAULT_DELIMITERS) -> list[Finding]:
    """Warn on text cells containing a multi-value delimiter (heuristic)."""
    delims = tuple(d for d in delimiters if d)
    out = []
    if not delims:
        return out
    for col in table.columns:
        if Kind.TEXT not in col.kinds():
            continue
        cells = col.cells
        hits = {v for v in set(cells) if type(v) is str and any(d in v for d in delims)}
        if not hits:
            continue
        for i, v in enumerate(cells):
            if type(v) is str and v in hits:
                out.append(_cell_finding("atomicity", col, i, f"value {v!r} may hold several values", v,
                                         "a single value"))
    return out


# ---------------------------------------------------------------------------
# analytics-backed checks

def check_duplicates(table: Table) -> list[Finding]:
    """One finding per group of whole-row duplicate records."""
    if not table.columns:
        return []
    report = analytics.find_duplicates(table)
    out = []
    first = table.columns[0]
    for rows in report.groups:
        listed = ", ".join(map(str, rows))
        out.append(Finding("duplicates", table.name, f"{len(rows)} identical rows: {listed}",
                           addresses=tuple(address(first, r - 1) for r in rows)))
    return out


def gap_columns(table: Table, schema: Schema | None) -> list[Column]:
    """Columns scanned for gaps: ``sequence`` columns, else a single-column integer key."""
    if schema is None:
        return []
    cols = [table.column(s.name) for s in schema.columns if s.sequence and table.has_column(s.name)]
    pk = schema.primary_key
    if len(pk) == 1 and table.has_column(pk[0]) and pk[0] not in [c.name for c in cols]:
        c = table.column(pk[0])
        nd = c.numeric
        if nd is not None and nd.count and nd.max_scale == 0:
            cols.append(c)
    return cols


def gap_findings(col: Column, step=1, report_duplicates: bool = True) -> list[Finding]:
    try:
        report = analytics.find_gaps(col, step)
    except NonOrderableError:
        return []
    out = []
    if not (report.gaps or report.irregular or (report_duplicates and report.duplicates)):
        return out
    addr_of = _first_rows(col)
    for after, missing in report.gaps:
        out.append(Finding("gaps", col.table, f"{missing} value(s) missing after {render(after)}",
                           addresses=(addr_of(after),), column=col.name, observed=after,
                           column_index=col.index, expected=f"step {step}"))
    for after, nxt in report.irregular:
        out.append(Finding("gaps", col.table, f"irregular step from {render(after)} to {render(nxt)}",
                           addresses=(addr_of(nxt),), column=col.name, observed=nxt,
                           column_index=col.index, expected=f"step {step}"))
    if report_duplicates:
        for value, addrs in report.duplicates:
            out.append(Finding("gaps", col.table, f"value {render(value)} repeats {len(addrs)} times in a sequence",
                               addresses=addrs, column=col.name, observed=value, column_index=col.index,
                               expected="distinct values"))
    return out


def _first_rows(col: Column) -> Callable[[CellValue], CellAddress]:
    index: dict[tuple, int] = {}
    for i, v in enumerate(col.cells):
        if v is not None:
            index.setdefault(sort_key(v), i)
    return lambda v: address(col, index[sort_key(v)])


def check_timeliness(table: Table, modified: float | None, max_age_days: float, now: float | None = None) -> list[Finding]:
    """Table-level finding when the source is older than ``max_age_days``."""
    if modified is None:
        return []
    now = time.time() if now is None else now
    age = (now - modified) / 86400
    if age <= max_age_days:
        return []
    return [Finding("timeliness", table.name, f"source is {age:.1f} days old, max age {max_age_days:g} days",
                    expected=f"<= {max_age_days:g} days")]


# ---------------------------------------------------------------------------
# engine

@dataclass(frozen=True)
class AuditConfig:
    checks: frozenset[str] = frozenset(DEFAULT_CHECKS)
    delimiters: tuple[str, ...] = DEFAULT_DELIMITERS
    benford_min_sample: int = 100
    dominance_threshold: float = 0.5
    outlier_k: float = 1.5
    patterns: SuspiciousPatterns = SuspiciousPatterns()
    max_age_days: float | None = None
    source_modified: float | None = None
    now: float | None = None
    severity_overrides: Mapping[str, Severity] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown check id(s): {', '.join(sorted(unknown))}")
        if not 0 < self.dominance_threshold <= 1:
            raise ValueError("dominance threshold must be in (0, 1]")
        if self.outlier_k <= 0:
            raise ValueError("outlier k must be positive")
        if self.benford_min_sample < 1:
            raise ValueError("benford min sample must be positive")
        object.__setattr__(self, "checks", frozenset(self.checks))


def _plan(table: Table, schema: Schema | None, refs: Mapping[str, Table],
          cfg: AuditConfig) -> list[Callable[[], list[Finding]]]:
    on = cfg.checks.__contains__
    tasks: list[Callable[[], list[Finding]]] = []
    add = tasks.append
    if on("structure"):
        add(lambda: check_structure(table))
    if on("ambiguity"):
        add(lambda: check_ambiguity(table))
    if on("atomicity"):
        add(lambda: check_atomicity(table, cfg.delimiters))
    if on("duplicates"):
        add(lambda: check_duplicates(table))
    if on("timeliness") and cfg.max_age_days is not None:
        add(lambda: check_timeliness(table, cfg.source_modified, cfg.max_age_days, cfg.now))
    specs = {s.name: s for s in schema.columns} if schema else {}
    if schema is not None:
        if on("schema"):
            add(lambda: check_schema_binding(table, schema))
        bound = list(_columns_for(table, schema))
        if on("completeness"):
            add(lambda: check_completeness(table, schema))
        validity = {"type", "range", "values", "size", "precision", "format"} & cfg.checks
        if validity:
            for col, spec in bound:
                add(lambda col=col, spec=spec: [f for f in validate_column(col, spec) if f.check_id in validity])
        if on("primary_key") and schema.primary_key and all(table.has_column(n) for n in schema.primary_key):
            add(lambda: check_primary_key(table, schema))
        if on("foreign_key"):
            for col, spec in bound:
                if spec.foreign_key is not None:
                    add(lambda spec=spec: _fk_task(table, spec, refs))
        if schema.rules and (on("consistency") or on("rule_binding")):
            add(lambda: _rules_task(table, schema.rules, cfg))
        if on("gaps"):
            pk = schema.primary_key
            for col in gap_columns(table, schema):
                add(lambda col=col: gap_findings(col, report_duplicates=not (len(pk) == 1 and col.name == pk[0])))
        if on("benford"):
            for col, spec in bound:
                if spec.benford:
                    add(lambda col=col: _benford_task(col, cfg))
    for col in table.columns:
        spec = specs.get(col.name)
        if on("suspicious"):
            add(lambda col=col, spec=spec: analytics.suspicious_in_column(col, spec, cfg.patterns))
        if on("dominance"):
            add(lambda col=col, spec=spec: _optional(analytics.dominance(col, cfg.dominance_threshold, spec=spec)))
        if on("outliers") and _outlier_eligible(col, spec):
            add(lambda col=col: _outlier_task(col, cfg))
    return tasks


def _optional(f: Finding | None) -> list[Finding]:
    return [] if f is None else [f]


def _outlier_eligible(col: Column, spec: ColumnSpec | None) -> bool:
    if spec is not None and (spec.is_primary_key or spec.sequence or spec.foreign_key or spec.data_type is not Kind.NUMBER):
        return False
    return col.numeric is not None


def _outlier_task(col: Column, cfg: AuditConfig) -> list[Finding]:
    try:
        return analytics.outliers(col, cfg.outlier_k)
    except (TooFewValuesError, NotNumericError):
        return []


def _benford_task(col: Column, cfg: AuditConfig) -> list[Finding]:
    try:
        result = analytics.benford(col, cfg.benford_min_sample)
    except NotNumericError:
        return []
    return _optional(analytics.benford_finding(col, result))


def _fk_task(table: Table, spec: ColumnSpec, refs: Mapping[str, Table]) -> list[Finding]:
    parent_name, parent_col = spec.foreign_key
    col = table.column(spec.name)
    parent = refs.get(parent_name)
    if parent is None and parent_name == table.name:
        parent = table
    if parent is None:
        return [Finding("foreign_key", table.name,
                        f"parent table {parent_name!r} for {spec.name} was not supplied; check skipped",
                        column=spec.name, column_index=col.index, severity=Severity.WARNING)]
    try:
        return check_referential_integrity(table, parent, spec)
    except MissingColumnError:
        return [Finding("foreign_key", table.name, f"parent column {parent_name}.{parent_col} does not exist",
                        column=spec.name, column_index=col.index)]


def _rules_task(table: Table, rules, cfg: AuditConfig) -> list[Finding]:
    out = []
    for rule in rules:
        try:
            bind_rule(table, rule)
        except RuleBindingError as exc:
            if "rule_binding" in cfg.checks:
                out.append(Finding("rule_binding", table.name, str(exc)))
            continue
        if "consistency" in cfg.checks:
            out += check_consistency(table, [rule])
    return out


def audit(table: Table, schema: Schema | None = None, *, refs: Mapping[str, Table] | None = None,
          config: AuditConfig | None = None, threads: int = 1) -> list[Finding]:
    """Run the configured checks and return findings in canonical order.

    ``refs`` maps table names to parent tables for foreign keys. The result
    is identical for every ``threads`` value.
    """
    cfg = config or AuditConfig()
    tasks = _plan(table, schema, refs or {}, cfg)
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda t: t(), tasks))
    else:
        parts = [t() for t in tasks]
    findings = [f for part in parts for f in part]
    if cfg.severity_overrides:
        findings = [replace(f, severity=cfg.severity_overrides[f.check_id])
                    if f.check_id in cfg.severity_overrides else f for f in findings]
    log.debug("%s: %d checks, %d findings", table.name, len(tasks), len(findings))
    return sort_findings(findings)
