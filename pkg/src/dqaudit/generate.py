"""Seeded test-data synthesis, error injection and detection-rate measurement.

Randomness comes from one numpy ``Generator(PCG64(seed))`` per call, drawn
in a fixed order (schema column order, then injection order), so the same
inputs and seed always give the same table and the same injection log.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from decimal import Decimal
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import LogMismatchError, NothingEligibleError, UnsatisfiableSpecError
from .findings import Finding
from .model import (EXACT, CellAddress, CellValue, Column, ColumnSpec, Kind, NumericData, Schema,
                    Table, cell, decimal_parts, decode_cell, encode_cell, kind_of, parts_decimal,
                    render, sort_key)
from .parsing import is_date_picture

DEFAULT_NUMBER_RANGE = (Decimal(0), Decimal(1000))
DEFAULT_DATE_RANGE = (date(2000, 1, 1), date(2029, 12, 31))
TEXT_LENGTH = 8
_PLACEHOLDERS = {"TBD", "XXX", "N/A", "TEST"}


# ---------------------------------------------------------------------------
# fills

@dataclass(frozen=True)
class Random:
    """Uniform values satisfying the column spec."""


@dataclass(frozen=True)
class Fixed:
    value: CellValue

    def __post_init__(self):
        object.__setattr__(self, "value", cell(self.value))


@dataclass(frozen=True)
class Incremental:
    start: CellValue
    step: CellValue = Decimal(1)

    def __post_init__(self):
        object.__setattr__(self, "start", cell(self.start))
        object.__setattr__(self, "step", cell(self.step))


Fill = Union[Random, Fixed, Incremental]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _number_bounds(spec: ColumnSpec) -> tuple[Decimal, Decimal]:
    lo, hi = spec.range if spec.range is not None else (None, None)
    if lo is None and hi is None:
        return DEFAULT_NUMBER_RANGE
    if lo is None:
        return hi - 1000, hi
    if hi is None:
        return lo, lo + 1000
    return lo, hi


def _random_numbers(spec: ColumnSpec, rows: int, rng) -> NumericData:
    lo, hi = _number_bounds(spec)
    scale = spec.precision if spec.precision is not None else max(decimal_parts(lo)[1], decimal_parts(hi)[1])
    lo_i = math.ceil(Fraction(lo) * 10**scale)
    hi_i = math.floor(Fraction(hi) * 10**scale)
    if lo_i > hi_i:
        raise UnsatisfiableSpecError(f"column {spec.name!r}: no {scale}-decimal number in range")
    width = hi_i - lo_i + 1
    if spec.is_primary_key:
        if width < rows:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: range holds {width} keys, need {rows}")
        if width > 2**62:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: key range too wide to sample")
        offsets = rng.choice(width, size=rows, replace=False)
    else:
        if width > 2**62:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: range too wide to sample")
        offsets = rng.integers(0, width, size=rows, dtype=np.int64)
    unscaled = (lo_i + offsets.astype(object)) if abs(lo_i) + width >= 2**63 else offsets + np.int64(lo_i)
    if unscaled.dtype != object:
        unscaled = unscaled.astype(np.int64)
    return NumericData(unscaled, np.full(rows, scale, np.int16), np.zeros(rows, bool))


def _random_dates(spec: ColumnSpec, rows: int, rng) -> list[date]:
    lo, hi = spec.range if spec.range is not None else (None, None)
    lo = lo or (hi - timedelta(days=10957) if hi else DEFAULT_DATE_RANGE[0])
    hi = hi or (lo + timedelta(days=10957))
    lo_o, hi_o = lo.toordinal() + (1 if isinstance(lo, datetime) and lo.time() != datetime.min.time() else 0), hi.toordinal()
    width = hi_o - lo_o + 1
    if width < 1:
        raise UnsatisfiableSpecError(f"column {spec.name!r}: empty date range")
    if spec.is_primary_key:
        if width < rows:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: range holds {width} dates, need {rows}")
        ords = rng.choice(width, size=rows, replace=False) + lo_o
    else:
        ords = rng.integers(0, width, size=rows) + lo_o
    fromordinal = date.fromordinal
    return [fromordinal(o) for o in ords.tolist()]


def _random_text(spec: ColumnSpec, rows: int, rng) -> list[str]:
    length = TEXT_LENGTH if spec.max_size is None else min(spec.max_size, TEXT_LENGTH)
    if spec.is_primary_key:
        digits = max(len(str(rows)), 1)
        if spec.max_size is not None and digits + 1 > spec.max_size:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: size {spec.max_size} too small for {rows} keys")
        order = rng.permutation(rows)
        return [f"K{i:0{digits}d}" for i in order.tolist()]
    if length == 0:
        return [""] * rows
    codes = rng.integers(65, 91, size=(rows, length), dtype=np.uint8)
    blob = codes.tobytes().decode("ascii")
    out = [blob[i * length:(i + 1) * length] for i in range(rows)]
    for i, s in enumerate(out):
        while s in _PLACEHOLDERS:
            s = rng.integers(65, 91, size=length, dtype=np.uint8).tobytes().decode("ascii")
        out[i] = s
    return out


def _choose(values: Sequence[CellValue], rows: int, rng, unique: bool, name: str) -> list[CellValue]:
    if unique:
        if len(values) < rows:
            raise UnsatisfiableSpecError(f"column {name!r}: {len(values)} allowed values for {rows} unique keys")
        idx = rng.choice(len(values), size=rows, replace=False)
    else:
        idx = rng.integers(0, len(values), size=rows)
    return [values[i] for i in idx.tolist()]


def _allowed(spec: ColumnSpec) -> list[CellValue]:
    values = [v for v in spec.restricted_values if kind_of(v) is spec.data_type]
    if spec.range is not None:
        lo, hi = spec.range
        values = [v for v in values
                  if (lo is None or sort_key(v) >= sort_key(lo)) and (hi is None or sort_key(v) <= sort_key(hi))]
    if spec.max_size is not None and spec.data_type is Kind.TEXT:
        values = [v for v in values if len(v) <= spec.max_size]
    if spec.precision is not None and spec.data_type is Kind.NUMBER:
        values = [v for v in values if decimal_parts(v)[1] <= spec.precision]
    if spec.format_pattern and not (spec.data_type is Kind.DATE and is_date_picture(spec.format_pattern)):
        rx = re.compile(spec.format_pattern)
        values = [v for v in values if rx.fullmatch(render(v))]
    return values


def _random_column(spec: ColumnSpec, rows: int, rng) -> Column:
    kind = spec.data_type
    if spec.restricted_values is not None:
        values = _allowed(spec)
        if not values:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: no allowed value satisfies the spec")
        return Column(spec.name, _choose(values, rows, rng, spec.is_primary_key, spec.name), normalize=False)
    if spec.format_pattern and not (kind is Kind.DATE and is_date_picture(spec.format_pattern)) \
            and kind in (Kind.TEXT, Kind.NUMBER):
        raise UnsatisfiableSpecError(
            f"column {spec.name!r}: cannot synthesize values for format {spec.format_pattern!r}; give values=")
    if kind is Kind.NUMBER:
        return Column(spec.name, numeric=_random_numbers(spec, rows, rng))
    if kind is Kind.DATE:
        return Column(spec.name, _random_dates(spec, rows, rng), normalize=False)
    if kind is Kind.BOOLEAN:
        if spec.is_primary_key and rows > 2:
            raise UnsatisfiableSpecError(f"column {spec.name!r}: a boolean key holds at most 2 rows")
        return Column(spec.name, [bool(b) for b in rng.integers(0, 2, size=rows).tolist()], normalize=False)
    return Column(spec.name, _random_text(spec, rows, rng), normalize=False)


def _incremental_column(spec: ColumnSpec, rows: int, fill: Incremental) -> Column:
    start, step = fill.start, fill.step
    if kind_of(start) is Kind.NUMBER:
        if kind_of(step) is not Kind.NUMBER:
            raise ValueError("numeric increments need a numeric step")
        scale = max(decimal_parts(start)[1], decimal_parts(step)[1])
        s0 = int(start.scaleb(scale, EXACT))
        st = int(step.scaleb(scale, EXACT))
        last = s0 + st * max(rows - 1, 0)
        if max(abs(s0), abs(last)) < 2**63:
            unscaled = s0 + st * np.arange(rows, dtype=np.int64)
        else:
            unscaled = np.array([s0 + st * i for i in range(rows)], dtype=object)
        return Column(spec.name, numeric=NumericData(unscaled, np.full(rows, scale, np.int16), np.zeros(rows, bool)))
    if kind_of(start) is Kind.DATE:
        days = int(step)
        return Column(spec.name, [start + timedelta(days=days * i) for i in range(rows)], normalize=False)
    raise ValueError(f"incremental fill needs a number or date start, got {start!r}")


def default_fill(spec: ColumnSpec, rows: int) -> Fill:
    """Integer keys count up from the range minimum (or 1); all else is random."""
    if spec.is_primary_key and spec.data_type is Kind.NUMBER and spec.restricted_values is None:
        lo, hi = spec.range if spec.range is not None else (None, None)
        start = lo if lo is not None and lo == lo.to_integral_value() else (Decimal(1) if lo is None else None)
        if start is not None and (hi is None or start + rows - 1 <= hi):
            return Incremental(start, Decimal(1))
    return Random()


def generate_table(schema: Schema, rows: int, fill: Mapping[str, Fill] | None = None, seed: int = 0,
                   name: str | None = None) -> Table:
    """Synthesize ``rows`` rows whose cells satisfy their column specs.

    Random fills respect type, range, restricted values, size and precision;
    primary keys are unique; no cell is null. Foreign keys are not resolved.
    """
    if rows < 0:
        raise ValueError("rows must be >= 0")
    fill = dict(fill or {})
    unknown = set(fill) - set(schema.names)
    if unknown:
        raise ValueError(f"fill names unknown column(s): {', '.join(sorted(unknown))}")
    rng = _rng(seed)
    cols = []
    for spec in schema.columns:
        f = fill.get(spec.name) or default_fill(spec, rows)
        if isinstance(f, Fixed):
            cols.append(Column(spec.name, [f.value] * rows, normalize=False))
        elif isinstance(f, Incremental):
            cols.append(_incremental_column(spec, rows, f))
        else:
            cols.append(_random_column(spec, rows, rng))
    return Table(name or schema.table, cols, row_count=rows)


# ---------------------------------------------------------------------------
# error kinds

@dataclass(frozen=True)
class TransposeDigits:
    @property
    def label(self) -> str:
        return "TransposeDigits"


@dataclass(frozen=True)
class DecimalShift:
    power: int = 1

    def __post_init__(self):
        if self.power == 0:
            raise ValueError("DecimalShift power must be non-zero")

    @property
    def label(self) -> str:
        return f"DecimalShift({self.power:+d})"


@dataclass(frozen=True)
class UnitScale:
    factor: Decimal = Decimal(1000)

    def __post_init__(self):
        f = cell(self.factor)
        if kind_of(f) is not Kind.NUMBER or f in (0, 1):
            raise ValueError("UnitScale factor must be a number other than 0 and 1")
        object.__setattr__(self, "factor", f)

    @property
    def label(self) -> str:
        return f"UnitScale({render(self.factor)})"


@dataclass(frozen=True)
class BlankOut:
    @property
    def label(self) -> str:
        return "BlankOut"


@dataclass(frozen=True)
class DuplicateRow:
    @property
    def label(self) -> str:
        return "DuplicateRow"


@dataclass(frozen=True)
class OutOfRange:
    @property
    def label(self) -> str:
        return "OutOfRange"


@dataclass(frozen=True)
class FormatCorrupt:
    @property
    def label(self) -> str:
        return "FormatCorrupt"


ErrorKind = Union[TransposeDigits, DecimalShift, UnitScale, BlankOut, DuplicateRow, OutOfRange, FormatCorrupt]

_LABEL = re.compile(r"(\w+)(?:\(([^)]*)\))?\Z")


def parse_kind(text: str) -> ErrorKind:
    """``TransposeDigits``, ``DecimalShift(+1)``, ``UnitScale(1000)``, ... (case-insensitive)."""
    m = _LABEL.match(text.strip())
    if not m:
        raise ValueError(f"bad error kind {text!r}")
    name, arg = m.group(1).lower(), m.group(2)
    simple = {"transposedigits": TransposeDigits, "blankout": BlankOut, "duplicaterow": DuplicateRow,
              "outofrange": OutOfRange, "formatcorrupt": FormatCorrupt}
    if name in simple:
        if arg:
            raise ValueError(f"{m.group(1)} takes no argument")
        return simple[name]()
    if name == "decimalshift":
        return DecimalShift(int(arg) if arg else 1)
    if name == "unitscale":
        return UnitScale(Decimal(arg) if arg else Decimal(1000))
    raise ValueError(f"unknown error kind {m.group(1)!r}")


def _plain(d: Decimal) -> Decimal:
    """Drop a positive exponent (``9.159E+6`` -> ``9159000``) without changing the value."""
    return d.quantize(Decimal(1), context=EXACT) if d.as_tuple().exponent > 0 else d


def _digits(v: Decimal) -> tuple[str, int]:
    """Digit string of |v| and the number of fractional digits."""
    u, s = decimal_parts(v)
    text = str(abs(u)).rjust(s + 1, "0")
    return text, s


def transpose_positions(v: Decimal, allow_across_point: bool) -> list[int]:
    """Indices ``i`` where swapping digits ``i`` and ``i+1`` changes the value."""
    text, s = _digits(v)
    point = len(text) - s       # digits before the point
    out = []
    for i in range(len(text) - 1):
        if text[i] == text[i + 1]:
            continue
        if s and i + 1 == point and not allow_across_point:
            continue
        out.append(i)
    return out


def transpose(v: Decimal, i: int) -> Decimal:
    text, s = _digits(v)
    chars = list(text)
    chars[i], chars[i + 1] = chars[i + 1], chars[i]
    u = int("".join(chars))
    return parts_decimal(-u if v < 0 else u, s)


# ---------------------------------------------------------------------------
# injection

@dataclass(frozen=True)
class InjectionEntry:
    row: int                          # 1-based
    column: int                       # 1-based; 0 for row-level errors
    kind: ErrorKind
    original: CellValue | tuple
    corrupted: CellValue | tuple
    source_row: int = 0               # DuplicateRow: the copied row

    def address(self, sheet: str) -> CellAddress | None:
        return CellAddress(sheet, self.row, self.column) if self.column else None


@dataclass(frozen=True)
class InjectionLog:
    table: str
    seed: int
    rate: str
    entries: tuple[InjectionEntry, ...] = ()
    eligible: int = 0

    def to_json(self) -> str:
        def enc(v):
            return [encode_cell(x) for x in v] if isinstance(v, tuple) else encode_cell(v)
        doc = {
            "schema_version": 1, "table": self.table, "seed": self.seed, "rate": self.rate,
            "eligible": self.eligible,
            "entries": [{"row": e.row, "column": e.column, "kind": e.kind.label, "source_row": e.source_row,
                         "original": enc(e.original), "corrupted": enc(e.corrupted)} for e in self.entries],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> InjectionLog:
        doc = json.loads(text)

        def dec(v):
            return tuple(decode_cell(x) for x in v) if isinstance(v, list) else decode_cell(v)
        entries = tuple(InjectionEntry(e["row"], e["column"], parse_kind(e["kind"]), dec(e["original"]),
                                       dec(e["corrupted"]), e.get("source_row", 0)) for e in doc["entries"])
        return cls(doc["table"], doc["seed"], doc["rate"], entries, doc.get("eligible", 0))


def _normalize_kinds(kinds) -> list[tuple[ErrorKind, Fraction]]:
    out = []
    for k in kinds:
        if isinstance(k, tuple):
            kind, w = k
        else:
            kind, w = k, 1
        w = Fraction(str(w))
        if w <= 0:
            raise ValueError("error kind weights must be positive")
        out.append((kind, w))
    if not out:
        raise ValueError("at least one error kind is required")
    return out


class _Injector:
    def __init__(self, table: Table, schema: Schema | None, kinds):
        self.table = table
        self.schema = schema
        self.kinds = kinds
        self.cols = [list(c.cells) for c in table.columns]
        self.specs = [schema.spec(c.name) if schema else None for c in table.columns]
        self.shift_selected = any(isinstance(k, DecimalShift) for k, _ in kinds)

    def applicable(self, kind, r: int, c: int) -> bool:
        v = self.cols[c][r]
        spec = self.specs[c]
        if isinstance(kind, TransposeDigits):
            return type(v) is Decimal and bool(transpose_positions(v, not self.shift_selected))
        if isinstance(kind, (DecimalShift, UnitScale)):
            return type(v) is Decimal and v != 0
        if isinstance(kind, BlankOut):
            return v is not None
        if isinstance(kind, OutOfRange):
            return (v is not None and spec is not None and spec.range is not None
                    and kind_of(v) is spec.data_type)
        if isinstance(kind, FormatCorrupt):
            if v is None:
                return False
            if isinstance(v, date):
                return True
            if spec is not None and spec.format_pattern and kind_of(v) is Kind.TEXT \
                    and not is_date_picture(spec.format_pattern):
                return re.fullmatch(spec.format_pattern, v + "#") is None
            return False
        return False

    def apply(self, kind, r: int, c: int, rng) -> CellValue:
        v = self.cols[c][r]
        if isinstance(kind, TransposeDigits):
            positions = transpose_positions(v, not self.shift_selected)
            return transpose(v, positions[int(rng.integers(0, len(positions)))])
        if isinstance(kind, DecimalShift):
            return _plain(v.scaleb(kind.power, EXACT))
        if isinstance(kind, UnitScale):
            return _plain(EXACT.multiply(v, kind.factor))
        if isinstance(kind, BlankOut):
            return None
        if isinstance(kind, OutOfRange):
            lo, hi = self.specs[c].range
            sides = [s for s, b in (("lo", lo), ("hi", hi)) if b is not None]
            side = sides[int(rng.integers(0, len(sides)))]
            k = int(rng.integers(1, 11))
            if isinstance(v, date):
                delta = timedelta(days=k)
                return lo - delta if side == "lo" else hi + delta
            unit = Decimal(1).scaleb(-max(decimal_parts(v)[1], decimal_parts(lo if side == "lo" else hi)[1]))
            return lo - k * unit if side == "lo" else hi + k * unit
        if isinstance(kind, FormatCorrupt):
            if isinstance(v, date):
                return v.strftime("%d/%m/%Y") if not isinstance(v, datetime) else v.strftime("%d/%m/%Y %H:%M")
            return v + "#"
        raise AssertionError(kind)


def inject_errors(table: Table, rate, kinds: Sequence, seed: int,
                  schema: Schema | None = None) -> tuple[Table, InjectionLog]:
    """Corrupt ``ceil(rate * eligible)`` units of ``table``.

    A unit is a cell that at least one requested kind can corrupt, or, when
    DuplicateRow is requested, a row. Units are visited in a seeded random
    order; each gets a kind drawn by weight among the kinds that apply to
    it. ``kinds`` holds ErrorKind instances or ``(kind, weight)`` pairs.
    ``schema`` supplies the ranges OutOfRange pushes past and the patterns
    FormatCorrupt breaks.
    """
    rate_f = Fraction(str(rate))
    if not 0 < rate_f <= 1:
        raise ValueError("rate must be in (0, 1]")
    if table.row_count == 0 or not table.columns:
        raise NothingEligibleError("table is empty")
    kinds = _normalize_kinds(kinds)
    inj = _Injector(table, schema, kinds)
    cell_kinds = [(k, w) for k, w in kinds if not isinstance(k, DuplicateRow)]
    dup_weight = sum((w for k, w in kinds if isinstance(k, DuplicateRow)), Fraction(0))
    dup_kind = next((k for k, _ in kinds if isinstance(k, DuplicateRow)), None)
    n_rows, n_cols = table.row_count, len(table.columns)

    units: list[tuple[int, int]] = []        # (row, col); col == -1 is a row unit
    unit_kinds: list[list[tuple[ErrorKind, Fraction]]] = []
    if cell_kinds:
        for c in range(n_cols):
            for r in range(n_rows):
                ok = [(k, w) for k, w in cell_kinds if inj.applicable(k, r, c)]
                if ok:
                    units.append((r, c))
                    unit_kinds.append(ok)
    row_keys = None
    if dup_kind is not None:
        row_keys = [tuple(sort_key(v) for v in row) for row in zip(*inj.cols)]
        if len(set(row_keys)) > 1:
            for r in range(n_rows):
                units.append((r, -1))
                unit_kinds.append([(dup_kind, dup_weight)])
    if not units:
        raise NothingEligibleError("no cell supports any requested error kind")
    target = math.ceil(rate_f * len(units))
    rng = _rng(seed)
    order = rng.permutation(len(units))
    touched_cells: set[tuple[int, int]] = set()
    touched_rows: set[int] = set()
    entries: list[InjectionEntry] = []
    for u in order.tolist():
        if len(entries) >= target:
            break
        r, c = units[u]
        if r in touched_rows or (c >= 0 and (r, c) in touched_cells):
            continue
        options = [(k, w) for k, w in unit_kinds[u] if c < 0 or inj.applicable(k, r, c)]
        if not options:
            continue
        kind = _pick(options, rng)
        if c < 0:
            if any((r, j) in touched_cells for j in range(n_cols)):
                continue
            row = tuple(col[r] for col in inj.cols)
            src = _other_row(row_keys, r, rng)
            if src is None:
                continue
            new = tuple(col[src] for col in inj.cols)
            for j in range(n_cols):
                inj.cols[j][r] = new[j]
            row_keys[r] = row_keys[src]
            touched_rows.add(r)
            entries.append(InjectionEntry(r + 1, 0, kind, row, new, src + 1))
        else:
            old = inj.cols[c][r]
            new = inj.apply(kind, r, c, rng)
            inj.cols[c][r] = new
            if row_keys is not None:
                row_keys[r] = tuple(sort_key(col[r]) for col in inj.cols)
            touched_cells.add((r, c))
            entries.append(InjectionEntry(r + 1, c + 1, kind, old, new))
    corrupted = Table(table.name, [Column(col.name, cells, normalize=False)
                                   for col, cells in zip(table.columns, inj.cols)], row_count=n_rows)
    entries.sort(key=lambda e: (e.row, e.column))
    return corrupted, InjectionLog(table.name, seed, str(rate), tuple(entries), len(units))


def _other_row(row_keys: list, r: int, rng) -> int | None:
    """A random row whose content differs from row ``r``."""
    n = len(row_keys)
    if n < 2:
        return None
    s = int(rng.integers(0, n - 1))
    s += s >= r
    for k in range(n):
        cand = (s + k) % n
        if cand != r and row_keys[cand] != row_keys[r]:
            return cand
    return None


def _pick(options, rng):
    if len(options) == 1:
        return options[0][0]
    total = sum(w for _, w in options)
    x = Fraction(rng.random()) * total
    acc = Fraction(0)
    for k, w in options:
        acc += w
        if x < acc:
            return k
    return options[-1][0]


# ---------------------------------------------------------------------------
# detection measurement

@dataclass(frozen=True)
class KindDetection:
    injected: int
    detected: int

    @property
    def recall(self) -> Fraction | None:
        return None if self.injected == 0 else Fraction(self.detected, self.injected)

    @property
    def recall_text(self) -> str:
        r = self.recall
        return "N/A" if r is None else f"{float(r):.4f}"


@dataclass(frozen=True)
class DetectionReport:
    per_kind: dict[str, KindDetection]
    matching_findings: int
    total_findings: int
    missed: tuple[InjectionEntry, ...] = ()

    @property
    def precision(self) -> Fraction | None:
        return None if self.total_findings == 0 else Fraction(self.matching_findings, self.total_findings)

    @property
    def recall(self) -> Fraction | None:
        injected = sum(k.injected for k in self.per_kind.values())
        detected = sum(k.detected for k in self.per_kind.values())
        return None if injected == 0 else Fraction(detected, injected)


def measure_detection(clean: Table, schema: Schema | None, log: InjectionLog,
                      findings: Sequence[Finding], kinds: Sequence = ()) -> DetectionReport:
    """Recall per error kind and overall precision of ``findings``.

    An injected cell error counts as detected when a finding addresses its
    cell; a DuplicateRow error when a finding addresses any cell of its row.
    Precision is the share of findings that address at least one injection.
    Kinds listed in ``kinds`` but never injected report a recall of N/A.
    """
    n_rows, n_cols = clean.row_count, len(clean.columns)
    for e in log.entries:
        if not (1 <= e.row <= n_rows and 0 <= e.column <= n_cols):
            raise LogMismatchError(f"log entry at row {e.row}, column {e.column} is outside "
                                   f"{clean.name} ({n_rows}x{n_cols})")
    cell_hits: dict[tuple[int, int], set[int]] = {}
    row_hits: dict[int, set[int]] = {}
    for idx, f in enumerate(findings):
        if f.table != clean.name:
            continue
        for a in f.addresses:
            cell_hits.setdefault((a.row, a.column), set()).add(idx)
            row_hits.setdefault(a.row, set()).add(idx)
    per: dict[str, list[int]] = {}
    for k in kinds:
        k = k[0] if isinstance(k, tuple) else k
        per.setdefault(k.label, [0, 0])
    matched: set[int] = set()
    missed = []
    for e in log.entries:
        hits = row_hits.get(e.row, set()) if e.column == 0 else cell_hits.get((e.row, e.column), set())
        slot = per.setdefault(e.kind.label, [0, 0])
        slot[0] += 1
        if hits:
            slot[1] += 1
            matched |= hits
        else:
            missed.append(e)
    return DetectionReport({k: KindDetection(*v) for k, v in sorted(per.items())}, len(matched),
                           len(findings), tuple(missed))
