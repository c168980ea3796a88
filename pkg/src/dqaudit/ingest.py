"""Reading CSV files and CSV-directory workbooks, type inference, schema files.

Schema file grammar (one directive per line, ``#`` starts a comment line)::

    table <name>
    column <name>: type=<number|text|date|boolean> [nullable | required]
        [range=<min>..<max>] [values=<v1|v2|...>] [size=<n>] [precision=<n>]
        [format=<pattern>] [unit=<label>] [default=<value>] [pk] [fk=<table>.<column>]
        [casefold] [benford] [sequence] [source=..] [frequency=..] [authority=..] [note=..]
    rule <name>: [when <predicate>] expect <predicate>

Attribute values may be double-quoted to include spaces. Either side of a
range may be empty for an open bound. ``format`` is a date picture such as
``YYYY-MM-DD`` / ``DD/MM/YY`` for date columns (or a strptime pattern with
``%``), and a regular expression matched against the whole value otherwise.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import re
import shlex
from array import array
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import (ConflictingRuleError, EmptyInputError, EncodingError, ParseError,
                     ReadError, UnknownAttributeError, WriteError)
from .model import (INT64_MAX, CellValue, Column, ColumnSpec, Kind, NumericData, Schema, Table,
                    kind_of, parts_decimal, render)
from .parsing import (ISO_DATE, is_date_picture, number_pattern, parse_as, parse_bool, parse_date,
                      parse_number, parse_number_parts, two_digit_year)
from .rules import parse_rule

log = logging.getLogger(__name__)

CHUNK_ROWS = 65536
MEMO_LIMIT = 1 << 16
MANIFEST = "workbook.json"

LOCALE_PATTERNS = {
    "dmy": ("DD/MM/YYYY", "DD/MM/YY"),
    "mdy": ("MM/DD/YYYY", "MM/DD/YY"),
}


@dataclass(frozen=True)
class IngestOptions:
    delimiter: str = ","
    has_header: bool = True
    decimal_separator: str = "."
    date_patterns: tuple[str, ...] = (ISO_DATE,)
    locale: str | None = None
    null_tokens: frozenset[str] = frozenset({"", "NA", "NULL"})
    trim_whitespace: bool = True
    lossy: bool = False

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        if self.decimal_separator == self.delimiter:
            raise ValueError("decimal separator and delimiter must differ")
        if self.locale is not None and self.locale not in LOCALE_PATTERNS:
            raise ValueError(f"locale must be one of {sorted(LOCALE_PATTERNS)}")
        patterns = tuple(self.date_patterns)
        if self.locale:
            patterns += tuple(p for p in LOCALE_PATTERNS[self.locale] if p not in patterns)
        else:
            # two-digit years are ambiguous without an explicit locale
            patterns = tuple(p for p in patterns if not two_digit_year(p))
        if not patterns:
            raise ValueError("at least one date pattern is required")
        object.__setattr__(self, "date_patterns", patterns)
        object.__setattr__(self, "null_tokens", frozenset(self.null_tokens))


@dataclass(frozen=True)
class StructuralWarning:
    row: int        # 1-based data row
    line: int       # source line where the record ends
    expected: int
    found: int

    def __str__(self) -> str:
        kind = "short" if self.found < self.expected else "long"
        return f"line {self.line}: {kind} row {self.row} has {self.found} fields, expected {self.expected}"


@dataclass(frozen=True)
class Workbook:
    tables: tuple[Table, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))
        names = [t.name for t in self.tables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate table names in workbook: {names}")

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.tables]


# ---------------------------------------------------------------------------
# column building

_NULL_PARTS = (0, 0)


class _Builder:
    """Accumulates one column, compactly while it is all-numeric."""

    __slots__ = ("u", "s", "null", "obj")

    def __init__(self):
        self.u = array("q")
        self.s = array("h")
        self.null = bytearray()
        self.obj: list | None = None

    def _to_objects(self):
        nd = self._numeric()
        self.obj = nd.decimals()
        self.u = self.s = self.null = None

    def _numeric(self) -> NumericData:
        n = len(self.null)
        unscaled = np.frombuffer(self.u, dtype=np.int64).copy() if n else np.zeros(0, np.int64)
        scale = np.frombuffer(self.s, dtype=np.int16).copy() if n else np.zeros(0, np.int16)
        null = np.frombuffer(bytes(self.null), dtype=np.uint8).astype(bool) if n else np.zeros(0, bool)
        return NumericData(unscaled, scale, null)

    def add_null(self):
        if self.obj is None:
            self.u.append(0)
            self.s.append(0)
            self.null.append(1)
        else:
            self.obj.append(None)

    def add_number(self, unscaled: int, scale: int):
        if self.obj is None and -INT64_MAX <= unscaled <= INT64_MAX and scale <= 18:
            self.u.append(unscaled)
            self.s.append(scale)
            self.null.append(0)
            return
        if self.obj is None:
            self._to_objects()
        self.obj.append(parts_decimal(unscaled, scale))

    def add_value(self, value: CellValue):
        if self.obj is None:
            self._to_objects()
        self.obj.append(value)

    def extend(self, items: list):
        """Append converted cells: ``None``, ``(unscaled, scale)`` or a value."""
        if self.obj is None and self._extend_numeric(items):
            return
        for it in items:
            if it is None:
                self.add_null()
            elif it.__class__ is tuple:
                self.add_number(*it)
            else:
                self.add_value(it)

    def _extend_numeric(self, items: list) -> bool:
        flat = [_NULL_PARTS if it is None else it for it in items]
        if not all(it.__class__ is tuple for it in flat):
            return False
        scales = [it[1] for it in flat]
        if scales and max(scales) > 18:
            return False
        try:
            unscaled = array("q", [it[0] for it in flat])
        except OverflowError:
            return False
        if unscaled and min(unscaled) < -INT64_MAX:
            return False
        self.u.extend(unscaled)
        self.s.extend(array("h", scales))
        self.null.extend(bytes(it is None for it in items))
        return True

    def extend_values(self, items: list):
        """Append cells known to hold no numbers."""
        if self.obj is None:
            self._to_objects()
        self.obj.extend(items)

    def finish(self, name: str) -> Column:
        if self.obj is None:
            return Column(name, numeric=self._numeric())
        return Column(name, self.obj, normalize=False)


class _Memo(dict):
    """Parse cache for one column; stops growing at ``MEMO_LIMIT`` entries."""

    __slots__ = ("convert",)

    def __init__(self, convert):
        super().__init__()
        self.convert = convert

    def __missing__(self, raw):
        out = self.convert(raw)
        if len(self) < MEMO_LIMIT:
            self[raw] = out
        return out


def _cell_parser(opts: IngestOptions, spec: ColumnSpec | None):
    """Return ``feed(builder, raws)`` for one column.

    Each raw string is converted to ``None`` (null), an ``(unscaled, scale)``
    pair (number) or a finished cell value.
    """
    nulls = opts.null_tokens
    trim = opts.trim_whitespace
    sep = opts.decimal_separator
    kind = spec.data_type if spec is not None else None
    patterns = opts.date_patterns
    if spec is not None and spec.format_pattern and kind is Kind.DATE and is_date_picture(spec.format_pattern):
        patterns = (spec.format_pattern,)
    num_re = number_pattern(sep, leading_zeros=kind is Kind.NUMBER)
    match = num_re.match

    def convert(raw: str):
        if trim:
            raw = raw.strip()
        if raw in nulls:
            return None
        if kind is Kind.TEXT:
            return raw
        if kind is None or kind is Kind.NUMBER:
            m = match(raw)
            if m is not None:
                sign, whole, frac = m.groups()
                u = int(whole + frac) if frac else int(whole)
                return (-u if sign == "-" else u, len(frac) if frac else 0)
            if kind is Kind.NUMBER:
                return raw
        if kind is None or kind is Kind.DATE:
            d = parse_date(raw, patterns)
            if d is not None:
                return d
            if kind is Kind.DATE:
                return raw
        v = parse_bool(raw)
        return raw if v is None else v

    memo = _Memo(convert)
    lookup = memo.__getitem__

    def feed(b: _Builder, raws):
        items = [None if raw is None else lookup(raw) for raw in raws]
        if kind is Kind.TEXT or kind is Kind.DATE:
            b.extend_values(items)
        else:
            b.extend(items)

    return feed


def _open_text(path: Path, opts: IngestOptions) -> TextIO:
    try:
        return open(path, "r", encoding="utf-8-sig", errors="replace" if opts.lossy else "strict",
                    newline="")
    except OSError as exc:
        raise ReadError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_csv(path: str | os.PathLike, opts: IngestOptions | None = None, *,
             schema: Schema | None = None, name: str | None = None) -> Table:
    """Parse a CSV file into a rectangular :class:`Table`.

    Without a schema every cell is inferred on its own (Number, Date,
    Boolean, else Text). With a schema, columns it declares are parsed as
    the declared type; cells that do not parse stay Text so validation can
    flag them. Short rows are padded with Null and long rows truncated, each
    producing one :class:`StructuralWarning` on ``table.warnings``.
    """
    opts = opts or IngestOptions()
    path = Path(path)
    if path.is_dir():
        raise ReadError(f"cannot read {path}: is a directory")
    with _open_text(path, opts) as fh:
        try:
            return _read(fh, opts, schema, name or path.stem)
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{path}: invalid UTF-8 at byte {exc.start}") from exc
        except csv.Error as exc:
            raise ParseError(f"{path}: {exc}") from exc


def read_csv_text(text: str, opts: IngestOptions | None = None, *, schema: Schema | None = None,
                  name: str = "table") -> Table:
    try:
        return _read(io.StringIO(text, newline=""), opts or IngestOptions(), schema, name)
    except csv.Error as exc:
        raise ParseError(f"{name}: {exc}") from exc


def _read(fh: TextIO, opts: IngestOptions, schema: Schema | None, name: str) -> Table:
    reader = csv.reader(fh, delimiter=opts.delimiter)
    first = None
    for record in reader:
        if record:
            first = record
            break
    if first is None:
        if opts.has_header:
            raise EmptyInputError(f"{name}: no header row")
        return Table(name, ())
    if opts.has_header:
        headers = [h.strip() if opts.trim_whitespace else h for h in first]
        headers = [h if h else f"column_{j + 1}" for j, h in enumerate(headers)]
        pending = []
    else:
        headers = [f"column_{j + 1}" for j in range(len(first))]
        pending = [first]
    width = len(headers)
    builders = [_Builder() for _ in headers]
    feeders = [_cell_parser(opts, schema.spec(h) if schema else None) for h in headers]
    warnings: list[StructuralWarning] = []
    row_no = 0
    chunk: list[list[str]] = []

    def take(record: list[str], line: int):
        nonlocal row_no
        row_no += 1
        if len(record) != width:
            warnings.append(StructuralWarning(row_no, line, width, len(record)))
            record = record[:width] if len(record) > width else record + [None] * (width - len(record))
        chunk.append(record)
        if len(chunk) >= CHUNK_ROWS:
            _flush_with_padding(chunk, feeders, builders)

    for record in pending:
        take(record, reader.line_num)
    for record in reader:
        if not record and width > 1:
            continue
        take(record if record else [""], reader.line_num)
    if chunk:
        _flush_with_padding(chunk, feeders, builders)
    cols = [b.finish(h) for b, h in zip(builders, headers)]
    for w in warnings:
        log.warning("%s: %s", name, w)
    return Table(name, cols, row_count=row_no, warnings=warnings)


def _flush_with_padding(chunk, feeders, builders):
    for j, column in enumerate(zip(*chunk)):
        feeders[j](builders[j], column)
    chunk.clear()


# ---------------------------------------------------------------------------
# writing

def _format_parts(u: int, s: int) -> str:
    if s == 0:
        return str(u)
    digits = str(abs(u)).rjust(s + 1, "0")
    return ("-" if u < 0 else "") + digits[:-s] + "." + digits[-s:]


def column_strings(col: Column, start: int = 0, stop: int | None = None) -> list[str]:
    """Canonical text of a slice of a column, without materializing Decimals."""
    stop = len(col) if stop is None else stop
    if col._cells is None:
        nd = col.numeric
        us = nd.unscaled[start:stop].tolist()
        ss = nd.scale[start:stop].tolist()
        ns = nd.null[start:stop].tolist()
        return ["" if n else _format_parts(u, s) for u, s, n in zip(us, ss, ns)]
    return [render(v) for v in col.cells[start:stop]]


def write_csv(table: Table, dest: str | os.PathLike | TextIO, *, delimiter: str = ",",
              extra: tuple[str, list[str]] | None = None) -> None:
    """Write a table as RFC 4180 CSV (CRLF line ends, minimal quoting).

    Null is written as an empty field. ``extra`` appends one more column
    given as ``(header, values)``.
    """
    if isinstance(dest, (str, os.PathLike)):
        try:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                write_csv(table, fh, delimiter=delimiter, extra=extra)
        except OSError as exc:
            raise WriteError(f"cannot write {dest}: {exc.strerror or exc}") from exc
        return
    writer = csv.writer(dest, delimiter=delimiter, lineterminator="\r\n")
    headers = table.headers + ([extra[0]] if extra else [])
    writer.writerow(headers)
    for start in range(0, table.row_count, CHUNK_ROWS):
        stop = min(start + CHUNK_ROWS, table.row_count)
        cols = [column_strings(c, start, stop) for c in table.columns]
        if extra:
            cols.append(extra[1][start:stop])
        writer.writerows(zip(*cols))


def csv_text(table: Table, **kw) -> str:
    buf = io.StringIO(newline="")
    write_csv(table, buf, **kw)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# workbooks

def load_workbook(directory: str | os.PathLike, opts: IngestOptions | None = None, *,
                  schemas: Iterable[Schema] = ()) -> Workbook:
    """Load a directory of CSV sheets.

    ``workbook.json`` (optional) lists ``{"sheets": [{"name": .., "file": ..}]}``;
    without it every ``*.csv`` is a sheet named after its file stem, in name order.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ReadError(f"{directory} is not a directory")
    by_name = {s.table: s for s in schemas}
    manifest = directory / MANIFEST
    if manifest.exists():
        try:
            doc = json.loads(manifest.read_text(encoding="utf-8"))
            sheets = [(s["name"], directory / s["file"]) for s in doc["sheets"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"{manifest}: bad manifest ({exc})") from exc
    else:
        sheets = [(p.stem, p) for p in sorted(directory.glob("*.csv"))]
    tables = [load_csv(path, opts, schema=by_name.get(name), name=name) for name, path in sheets]
    return Workbook(tables)


def write_workbook(workbook: Workbook, directory: str | os.PathLike) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    sheets = []
    for t in workbook.tables:
        fname = f"{t.name}.csv"
        write_csv(t, directory / fname)
        sheets.append({"name": t.name, "file": fname})
    (directory / MANIFEST).write_text(json.dumps({"sheets": sheets}, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# type inference and coercion

_ORDER = (Kind.NUMBER, Kind.DATE, Kind.BOOLEAN)


def _parses_as(v: CellValue, kind: Kind) -> bool:
    k = kind_of(v)
    if k is kind:
        return True
    if k is not Kind.TEXT:
        return False
    if kind is Kind.NUMBER:
        return parse_number_parts(v) is not None
    if kind is Kind.DATE:
        return parse_date(v) is not None
    return parse_bool(v) is not None


def infer_types(table: Table, sample_size: int = 1000) -> Schema:
    """Infer a schema: the narrowest type (Number, Date, Boolean, else Text)
    that every non-null cell among the first ``sample_size`` rows parses as.

    ``nullable`` and the numeric ``range`` are taken from the whole column.
    Numbers with leading zeros never count as Number here.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be positive")
    specs = []
    for col in table.columns:
        nd = col.numeric if col._cells is None or Kind.TEXT not in col.kinds() else None
        if nd is not None and col.kinds() <= {Kind.NUMBER}:
            kind = Kind.NUMBER if nd.count else Kind.TEXT
        else:
            sample = [v for v in col.cells[:sample_size] if v is not None]
            kind = next((k for k in _ORDER if sample and all(_parses_as(v, k) for v in sample)), Kind.TEXT)
        nullable = bool(col.null_mask().any())
        rng = None
        if kind is Kind.NUMBER:
            values = _as_numbers(col)
            if values:
                rng = (min(values), max(values))
        specs.append(ColumnSpec(col.name, kind, nullable=nullable, range=rng))
    return Schema(table.name, tuple(_unique_specs(specs)))


def _unique_specs(specs):
    seen = set()
    for s in specs:
        if s.name not in seen:
            seen.add(s.name)
            yield s


def _as_numbers(col: Column):
    if col._cells is None or col.kinds() <= {Kind.NUMBER}:
        nd = col.numeric
        if nd is not None:
            if not nd.count:
                return []
            ints, scale = nd.aligned()
            live = ints[~nd.null]
            lo, hi = live.min(), live.max()
            return [parts_decimal(int(lo), scale), parts_decimal(int(hi), scale)]
    out = []
    for v in col.cells:
        if v is None:
            continue
        n = v if kind_of(v) is Kind.NUMBER else (parse_number(v) if isinstance(v, str) else None)
        if n is not None:
            out.append(n)
    return out


def coerce_table(table: Table, schema: Schema, opts: IngestOptions | None = None) -> Table:
    """Re-type cells to the declared column types where their text parses.

    Text columns take the canonical text of any non-text cell. Cells that do
    not parse are left as they are so validation can report them.
    """
    opts = opts or IngestOptions()
    cols = []
    for col in table.columns:
        spec = schema.spec(col.name)
        if spec is None or col.kinds() <= {spec.data_type}:
            cols.append(col)
            continue
        kind = spec.data_type
        patterns = opts.date_patterns
        if kind is Kind.DATE and spec.format_pattern and is_date_picture(spec.format_pattern):
            patterns = (spec.format_pattern,)
        out = []
        for v in col.cells:
            k = kind_of(v)
            if k is Kind.NULL or k is kind:
                out.append(v)
            elif kind is Kind.TEXT:
                out.append(render(v))
            elif k is Kind.TEXT:
                out.append(parse_as(v, kind, decimal_separator=opts.decimal_separator, date_patterns=patterns))
            else:
                out.append(v)
        cols.append(Column(col.name, out, normalize=False))
    return Table(table.name, cols, row_count=table.row_count, warnings=table.warnings)


# ---------------------------------------------------------------------------
# schema files

_FLAGS = {"nullable", "required", "pk", "primary_key", "casefold", "benford", "sequence"}
_KEYS = {"type", "nullable", "required", "range", "values", "size", "precision", "format", "unit",
         "default", "pk", "primary_key", "fk", "casefold", "benford", "sequence",
         "source", "frequency", "authority", "note"}
_ANNOTATIONS = ("source", "frequency", "authority", "note")
_DIRECTIVE = re.compile(r"\s*(table|column|rule)\b\s*(.*)\Z", re.IGNORECASE)


def load_schema(path: str | os.PathLike) -> Schema:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ReadError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path}: invalid UTF-8") from exc
    return parse_schema(text, default_table=path.stem)


def _bool_value(raw: str, key: str, line: int, col: int) -> bool:
    v = parse_bool(raw)
    if v is None:
        raise ParseError(f"{key} expects true or false, got {raw!r}", line, col)
    return v


def parse_schema(text: str, default_table: str = "table") -> Schema:
    """Parse schema-file text (grammar in the module docstring)."""
    table = default_table
    specs: list[ColumnSpec] = []
    rules = []
    names: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _DIRECTIVE.match(line)
        if m is None:
            raise ParseError(f"expected 'table', 'column' or 'rule', got {stripped.split()[0]!r}",
                             lineno, len(line) - len(line.lstrip()) + 1)
        directive, rest = m.group(1).lower(), m.group(2)
        rest_col = m.start(2) + 1
        if directive == "table":
            if not rest.strip():
                raise ParseError("table name missing", lineno, rest_col)
            table = rest.strip()
        elif directive == "column":
            name, _, attrs = rest.partition(":")
            name = name.strip()
            if not name:
                raise ParseError("column name missing", lineno, rest_col)
            if name in names:
                raise ConflictingRuleError(f"column {name!r} is specified twice", lineno, rest_col)
            names.add(name)
            specs.append(_parse_column(name, attrs, lineno, rest_col + len(rest) - len(attrs)))
        else:
            name, sep, body = rest.partition(":")
            if not sep or not name.strip():
                raise ParseError("expected 'rule <name>: ...'", lineno, rest_col)
            offset = rest_col - 1 + len(name) + 1
            rules.append(parse_rule(name.strip(), body, lineno, offset))
    return Schema(table, tuple(specs), tuple(rules))


def _parse_column(name: str, attrs: str, line: int, col0: int) -> ColumnSpec:
    try:
        lexer = shlex.shlex(attrs, posix=True)
        lexer.whitespace_split = True
        lexer.commenters = ""
        tokens = list(lexer)
    except ValueError as exc:
        raise ParseError(f"column {name!r}: {exc}", line, col0) from exc
    raw: dict[str, tuple[str | None, int]] = {}
    cursor = 0
    for tok in tokens:
        key, eq, value = tok.partition("=")
        at = attrs.find(key, cursor)
        col = col0 + max(at, 0)
        cursor = max(at, cursor) + 1
        key_l = key.lower()
        if key_l not in _KEYS:
            raise UnknownAttributeError(f"unknown attribute {key!r}", line, col)
        if not eq and key_l not in _FLAGS:
            raise ParseError(f"attribute {key!r} needs a value", line, col)
        if key_l in raw:
            raise ConflictingRuleError(f"attribute {key!r} given twice", line, col)
        raw[key_l] = (value if eq else None, col)

    def flag(key: str) -> bool | None:
        if key not in raw:
            return None
        value, col = raw[key]
        return True if value is None else _bool_value(value, key, line, col)

    kind = Kind.TEXT
    if "type" in raw:
        value, col = raw["type"]
        try:
            kind = Kind.parse(value)
        except ValueError:
            raise ParseError(f"unknown type {value!r}", line, col) from None
        if kind is Kind.NULL:
            raise ParseError("null is not a data type", line, col)

    nullable = flag("nullable")
    required = flag("required")
    if required is not None:
        if nullable is not None and nullable == required:
            raise ConflictingRuleError("nullable and required contradict", line, raw["required"][1])
        nullable = not required
    pk = bool(flag("pk")) or bool(flag("primary_key"))
    if pk and nullable:
        where = raw.get("nullable", raw.get("required", (None, col0)))[1]
        raise ConflictingRuleError(f"column {name!r}: a primary key cannot be nullable", line, where)

    fmt = raw.get("format", (None, 0))[0]
    patterns = (fmt,) if kind is Kind.DATE and fmt and is_date_picture(fmt) else (ISO_DATE,)
    if fmt and kind is not Kind.DATE or (fmt and not is_date_picture(fmt)):
        try:
            re.compile(fmt)
        except re.error as exc:
            raise ParseError(f"bad format regex: {exc}", line, raw["format"][1]) from exc

    def literal(text: str, col: int) -> CellValue:
        if kind is Kind.TEXT:
            return text
        v = parse_as(text, kind, date_patterns=patterns + (ISO_DATE,))
        if kind_of(v) is not kind:
            raise ParseError(f"{text!r} is not a {kind.label}", line, col)
        return v

    rng = None
    if "range" in raw:
        value, col = raw["range"]
        if kind not in (Kind.NUMBER, Kind.DATE):
            raise ConflictingRuleError(f"range applies to number and date columns, not {kind.label}", line, col)
        lo, sep, hi = value.partition("..")
        if not sep:
            raise ParseError("range must look like <min>..<max>", line, col)
        rng = (literal(lo, col) if lo else None, literal(hi, col) if hi else None)
    values = None
    if "values" in raw:
        value, col = raw["values"]
        values = tuple(literal(v, col) for v in value.split("|"))
    default = None
    if "default" in raw:
        value, col = raw["default"]
        default = literal(value, col)

    def positive_int(key: str) -> int | None:
        if key not in raw:
            return None
        value, col = raw[key]
        if not value.isdigit():
            raise ParseError(f"{key} must be a non-negative integer", line, col)
        return int(value)

    fk = None
    if "fk" in raw:
        value, col = raw["fk"]
        parent, dot, parent_col = value.partition(".")
        if not dot or not parent or not parent_col:
            raise ParseError("fk must look like <table>.<column>", line, col)
        fk = (parent, parent_col)

    annotations = tuple((k, raw[k][0]) for k in _ANNOTATIONS if k in raw)
    try:
        return ColumnSpec(
            name, kind, nullable=nullable, default_value=default, range=rng,
            restricted_values=values, max_size=positive_int("size"), format_pattern=fmt,
            unit=raw.get("unit", (None, 0))[0], is_primary_key=pk, foreign_key=fk,
            precision=positive_int("precision"), casefold=bool(flag("casefold")),
            benford=bool(flag("benford")), sequence=bool(flag("sequence")), annotations=annotations)
    except ConflictingRuleError as exc:
        raise ConflictingRuleError(str(exc), line, col0) from None


def format_schema(schema: Schema) -> str:
    """Render a schema back to schema-file text."""
    lines = [f"table {schema.table}"]
    for s in schema.columns:
        parts = [f"type={s.data_type.label}"]
        if s.is_primary_key:
            parts.append("pk")
        elif not s.nullable:
            parts.append("required")
        if s.range is not None:
            lo, hi = s.range
            parts.append(f"range={render(lo)}..{render(hi)}")
        if s.restricted_values is not None:
            parts.append("values=" + "|".join(render(v) for v in s.restricted_values))
        for key, val in (("size", s.max_size), ("precision", s.precision), ("format", s.format_pattern),
                         ("unit", s.unit), ("default", None if s.default_value is None else render(s.default_value))):
            if val is not None:
                parts.append(f"{key}={val}")
        if s.foreign_key:
            parts.append(f"fk={s.foreign_key[0]}.{s.foreign_key[1]}")
        for key in ("casefold", "benford", "sequence"):
            if getattr(s, key):
                parts.append(key)
        parts += [f"{k}={v}" for k, v in s.annotations]
        lines.append(f"column {s.name}: " + " ".join(shlex.quote(p) if " " in p else p for p in parts))
    for r in schema.rules:
        lines.append(f"rule {r.name}: {r}")
    return "\n".join(lines) + "\n"
