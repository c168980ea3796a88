"""Core data model: typed cells, addresses, columns, tables and column schemas.

Cell values are plain Python objects:

========  =============================================
Null      ``None``
Number    :class:`decimal.Decimal` (exact, keeps its precision)
Text      ``str`` (``""`` is a value, distinct from Null)
Date      :class:`datetime.date` or :class:`datetime.datetime`
Boolean   ``bool``
========  =============================================

Numeric columns additionally carry a columnar :class:`NumericData` form
(unscaled integers plus a per-cell scale) so that range, gap, Benford and
diff scans run over arrays instead of ``Decimal`` objects.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from datetime import date, datetime
from decimal import MAX_EMAX, MAX_PREC, MIN_EMIN, Context, Decimal
from typing import Any, Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import ConflictingRuleError, MissingColumnError

CellValue = Union[None, bool, Decimal, date, datetime, str]

# add/sub/mul/scaleb under this context never round
EXACT = Context(prec=MAX_PREC, Emax=MAX_EMAX, Emin=MIN_EMIN)

INT64_MAX = 2**63 - 1
_POW10 = np.array([10**k for k in range(19)], dtype=np.int64)
_LIMITS = np.array([INT64_MAX // 10**k for k in range(19)], dtype=np.int64)


class Kind(enum.IntEnum):
    """Cell variant. The integer order is the canonical cross-variant order."""

    NULL = 0
    BOOLEAN = 1
    NUMBER = 2
    DATE = 3
    TEXT = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str | Kind) -> Kind:
        if isinstance(text, Kind):
            return text
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown data type {text!r}") from None


def map_distinct(col: Column, fn, *, exact_numbers: bool = False) -> list:
    """``[fn(v) for v in col.cells]`` with ``fn`` evaluated once per distinct cell.

    Cells of different variants never share a result (``True`` and
    ``Decimal(1)`` are kept apart). Equal numbers of different scale do share
    one unless ``exact_numbers`` is set.
    """
    kinds = col.kinds()
    cells = col.cells
    if exact_numbers and Kind.NUMBER in kinds:
        return [fn(v) for v in cells]
    if Kind.BOOLEAN in kinds and Kind.NUMBER in kinds:
        keys = [(v.__class__, v) for v in cells]
        cache = dict.fromkeys(keys)
        for k in cache:
            cache[k] = fn(k[1])
    else:
        keys = cells
        cache = dict.fromkeys(keys)
        for k in cache:
            cache[k] = fn(k)
    return list(map(cache.__getitem__, keys))


_TYPE_KINDS = {type(None): Kind.NULL, bool: Kind.BOOLEAN, Decimal: Kind.NUMBER, str: Kind.TEXT,
               date: Kind.DATE, datetime: Kind.DATE}


def _type_kind(t: type) -> Kind:
    k = _TYPE_KINDS.get(t)
    if k is None:
        if issubclass(t, date):
            return Kind.DATE
        raise TypeError(f"not a cell type: {t.__name__}")
    return k


def kind_of(value: Any) -> Kind:
    if value is None:
        return Kind.NULL
    t = type(value)
    if t is bool:
        return Kind.BOOLEAN
    if t is Decimal:
        return Kind.NUMBER
    if t is str:
        return Kind.TEXT
    if isinstance(value, date):
        return Kind.DATE
    raise TypeError(f"not a cell value: {value!r}")


def cell(value: Any) -> CellValue:
    """Normalize a Python scalar into a cell value.

    ints become exact Decimals; floats go through their shortest repr, so
    ``cell(0.1) == Decimal("0.1")``.
    """
    if value is None or isinstance(value, (bool, str, date)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite number {value}")
        return value
    if isinstance(value, (int, np.integer)):
        return Decimal(int(value))
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if f != f or f in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite number {value}")
        return Decimal(repr(f))
    raise TypeError(f"unsupported cell value {value!r}")


def precision_of(number: Decimal) -> int:
    """Count of recorded fractional digits (``1.50`` -> 2)."""
    return max(0, -number.as_tuple().exponent)


def decimal_parts(number: Decimal) -> tuple[int, int]:
    """Split a Decimal into ``(unscaled, scale)`` with scale >= 0."""
    exp = number.as_tuple().exponent
    if exp >= 0:
        return int(number), 0
    return int(number.scaleb(-exp, EXACT)), -exp


def parts_decimal(unscaled: int, scale: int) -> Decimal:
    if scale == 0:
        return Decimal(unscaled)
    return Decimal(unscaled).scaleb(-scale, EXACT)


def render(value: CellValue) -> str:
    """Canonical text form of a cell, as written to CSV."""
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if type(value) is Decimal:
        return format(value, "f")
    if isinstance(value, date):
        return value.isoformat()
    return value


def date_key(value: date) -> tuple[int, int]:
    if isinstance(value, datetime):
        micros = ((value.hour * 60 + value.minute) * 60 + value.second) * 1_000_000
        return value.toordinal(), micros + value.microsecond
    return value.toordinal(), 0


def sort_key(value: CellValue) -> tuple:
    """Total canonical order: Null, Boolean, Number, Date, Text; natural order within.

    Also the grouping key for duplicate/equality logic: two cells share a key
    iff they are equal values of the same variant (``True`` never equals
    ``Decimal(1)``).
    """
    k = kind_of(value)
    if k is Kind.NULL:
        return (0, 0)
    if k is Kind.DATE:
        return (3, date_key(value))
    if k is Kind.BOOLEAN:
        return (1, int(value))
    return (int(k), value)


cell_key = sort_key


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def compare_values(a: CellValue, b: CellValue) -> Ordering:
    """Order two cells. Null sorts first; different variants are incomparable."""
    ka, kb = kind_of(a), kind_of(b)
    if ka is Kind.NULL or kb is Kind.NULL:
        if ka is kb:
            return Ordering.EQUAL
        return Ordering.LESS if ka is Kind.NULL else Ordering.GREATER
    if ka is not kb:
        return Ordering.INCOMPARABLE
    x, y = sort_key(a)[1], sort_key(b)[1]
    if x < y:
        return Ordering.LESS
    if x > y:
        return Ordering.GREATER
    return Ordering.EQUAL


def same_cell(a: CellValue, b: CellValue) -> bool:
    """Identity used for round-trips: same variant and same canonical text."""
    return kind_of(a) is kind_of(b) and render(a) == render(b)


# ---------------------------------------------------------------------------
# addresses

def column_letters(column: int) -> str:
    if column < 1:
        raise ValueError(f"column must be >= 1, got {column}")
    letters = []
    while column:
        column, rem = divmod(column - 1, 26)
        letters.append(chr(65 + rem))
    return "".join(reversed(letters))


def column_number(letters: str) -> int:
    if not letters or not letters.isalpha() or not letters.isascii():
        raise ValueError(f"bad column letters {letters!r}")
    n = 0
    for ch in letters.upper():
        n = n * 26 + (ord(ch) - 64)
    return n


@dataclass(frozen=True, order=True)
class CellAddress:
    sheet: str
    row: int
    column: int

    def __post_init__(self):
        if self.row < 1 or self.column < 1:
            raise ValueError(f"row and column are 1-based, got ({self.row}, {self.column})")

    @property
    def a1(self) -> str:
        return f"{column_letters(self.column)}{self.row}"

    def __str__(self) -> str:
        return f"{self.sheet}!{self.a1}" if self.sheet else self.a1


_A1 = re.compile(r"(?:(?P<sheet>.+)!)?(?P<col>[A-Za-z]+)(?P<row>[1-9][0-9]*)\Z")


def address_to_a1(addr: CellAddress) -> str:
    return addr.a1


def a1_to_address(text: str, sheet: str = "") -> CellAddress:
    m = _A1.match(text.strip())
    if not m:
        raise ValueError(f"not an A1 reference: {text!r}")
    return CellAddress(m.group("sheet") or sheet, int(m.group("row")), column_number(m.group("col")))


# ---------------------------------------------------------------------------
# columnar numbers

@dataclass(frozen=True, eq=False)
class NumericData:
    """Exact decimals as ``unscaled * 10**-scale``.

    ``unscaled`` is int64, or an object array of Python ints when a value does
    not fit. Null cells hold 0 and are marked in ``null``.
    """

    unscaled: np.ndarray
    scale: np.ndarray
    null: np.ndarray

    def __len__(self) -> int:
        return len(self.unscaled)

    @property
    def max_scale(self) -> int:
        live = self.scale[~self.null]
        return int(live.max()) if live.size else 0

    @property
    def count(self) -> int:
        return int(len(self.null) - self.null.sum())

    def value(self, i: int) -> Decimal | None:
        if self.null[i]:
            return None
        return parts_decimal(int(self.unscaled[i]), int(self.scale[i]))

    def decimals(self) -> list[Decimal | None]:
        us = self.unscaled.tolist()
        ss = self.scale.tolist()
        nulls = self.null.tolist()
        out = []
        for u, s, n in zip(us, ss, nulls):
            out.append(None if n else (Decimal(u) if s == 0 else Decimal(u).scaleb(-s, EXACT)))
        return out

    def aligned(self, scale: int | None = None) -> tuple[np.ndarray, int]:
        """Unscaled values brought to one common scale (nulls read as 0).

        Returns int64 when every shifted value fits, else an object array of
        Python ints. The second element is the common scale.
        """
        target = max(self.max_scale, scale or 0)
        shift = (target - self.scale.astype(np.int64))
        shift[self.null] = 0
        if self.unscaled.dtype != object and target <= 18:
            if not shift.any():
                out = self.unscaled.copy()
                out[self.null] = 0
                return out, target
            mag = np.abs(self.unscaled)
            if np.all(mag <= _LIMITS[shift]) and np.all(mag >= 0):
                out = self.unscaled * _POW10[shift]
                out[self.null] = 0
                return out, target
        pows = {int(k): 10**int(k) for k in np.unique(shift)}
        out = np.array([int(u) * pows[k] for u, k in zip(self.unscaled.tolist(), shift.tolist())], dtype=object)
        out[self.null] = 0
        return out, target

    @classmethod
    def from_values(cls, values: Sequence[CellValue]) -> NumericData | None:
        """Build from cells; None unless every non-null cell is a Number."""
        n = len(values)
        us: list[int] = [0] * n
        ss: list[int] = [0] * n
        null = np.zeros(n, dtype=bool)
        wide = False
        for i, v in enumerate(values):
            if v is None:
                null[i] = True
                continue
            if type(v) is not Decimal:
                return None
            u, s = decimal_parts(v)
            us[i] = u
            ss[i] = s
            if not wide and (u > INT64_MAX or u < -INT64_MAX):
                wide = True
        unscaled = np.array(us, dtype=object) if wide else np.array(us, dtype=np.int64)
        if n == 0:
            unscaled = np.zeros(0, dtype=np.int64)
        return cls(unscaled, np.array(ss, dtype=np.int16), null)


def scale_of(number: Decimal) -> int:
    return decimal_parts(number)[1]


# ---------------------------------------------------------------------------
# columns and tables

class Column:
    """A named, immutable sequence of cells.

    Built either from cell values or from :class:`NumericData`; the other
    form is derived lazily. ``table``/``index`` are set when the column is
    placed in a :class:`Table` so that column-level operations can produce
    cell addresses.
    """

    __slots__ = ("name", "table", "index", "_cells", "_numeric", "_numeric_ready", "_kinds")

    def __init__(self, name: str, cells: Iterable[Any] | None = None, *,
                 numeric: NumericData | None = None, normalize: bool = True):
        if not isinstance(name, str) or not name:
            raise ValueError("column name must be a non-empty string")
        self.name = name
        self.table = ""
        self.index = 0
        self._kinds = None
        if numeric is not None:
            if cells is not None:
                raise ValueError("pass cells or numeric, not both")
            self._cells = None
            self._numeric = numeric
            self._numeric_ready = True
        else:
            values = () if cells is None else cells
            self._cells = tuple(cell(v) for v in values) if normalize else tuple(values)
            self._numeric = None
            self._numeric_ready = False

    def bind(self, table: str, index: int) -> Column:
        new = object.__new__(Column)
        new.name = self.name
        new.table = table
        new.index = index
        new._cells = self._cells
        new._numeric = self._numeric
        new._numeric_ready = self._numeric_ready
        new._kinds = self._kinds
        return new

    def renamed(self, name: str) -> Column:
        new = self.bind(self.table, self.index)
        if not name:
            raise ValueError("column name must be a non-empty string")
        new.name = name
        return new

    @property
    def cells(self) -> tuple[CellValue, ...]:
        if self._cells is None:
            self._cells = tuple(self._numeric.decimals())
        return self._cells

    @property
    def numeric(self) -> NumericData | None:
        if not self._numeric_ready:
            self._numeric = NumericData.from_values(self._cells)
            self._numeric_ready = True
        return self._numeric

    def kinds(self) -> frozenset[Kind]:
        """Variants present among non-null cells."""
        if self._kinds is None:
            if self._cells is None:
                self._kinds = frozenset([Kind.NUMBER]) if self._numeric.count else frozenset()
            else:
                self._kinds = frozenset(_type_kind(t) for t in set(map(type, self._cells))) - {Kind.NULL}
        return self._kinds

    def null_mask(self) -> np.ndarray:
        if self._cells is None:
            return self._numeric.null
        return np.fromiter((v is None for v in self._cells), dtype=bool, count=len(self._cells))

    def __len__(self) -> int:
        return len(self._numeric) if self._cells is None else len(self._cells)

    def __getitem__(self, i: int) -> CellValue:
        if self._cells is None:
            return self._numeric.value(range(len(self._numeric))[i])
        return self._cells[i]

    def __iter__(self) -> Iterator[CellValue]:
        return iter(self.cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Column):
            return NotImplemented
        return (self.name == other.name and len(self) == len(other)
                and all(same_cell(a, b) for a, b in zip(self.cells, other.cells)))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Column({self.name!r}, n={len(self)})"


class Table:
    """Named rectangular grid of columns."""

    __slots__ = ("name", "columns", "row_count", "warnings")

    def __init__(self, name: str, columns: Iterable[Column] = (), *,
                 row_count: int | None = None, warnings: Sequence[Any] = ()):
        cols = tuple(columns)
        lengths = {len(c) for c in cols}
        if len(lengths) > 1:
            raise ValueError(f"table {name!r} is not rectangular: column lengths {sorted(lengths)}")
        n = lengths.pop() if cols else (row_count or 0)
        if row_count is not None and row_count != n:
            raise ValueError(f"row_count {row_count} does not match column length {n}")
        self.name = name
        self.columns = tuple(c.bind(name, i + 1) for i, c in enumerate(cols))
        self.row_count = n
        self.warnings = tuple(warnings)

    @classmethod
    def from_rows(cls, name: str, headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> Table:
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != len(headers):
                raise ValueError(f"row {r!r} has {len(r)} cells, expected {len(headers)}")
        cols = [Column(h, [r[j] for r in rows]) for j, h in enumerate(headers)]
        return cls(name, cols, row_count=len(rows))

    @property
    def headers(self) -> list[str]:
        return [c.name for c in self.columns]

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise MissingColumnError(f"table {self.name!r} has no column {name!r}")

    def column_index(self, name: str) -> int:
        return self.column(name).index

    def row(self, i: int) -> tuple[CellValue, ...]:
        """Cells of the 0-based row ``i``."""
        return tuple(c.cells[i] for c in self.columns)

    def rows(self) -> Iterator[tuple[CellValue, ...]]:
        return zip(*(c.cells for c in self.columns)) if self.columns else iter(())

    def renamed(self, name: str) -> Table:
        return Table(name, self.columns, row_count=self.row_count, warnings=self.warnings)

    @property
    def cell_count(self) -> int:
        return self.row_count * len(self.columns)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Table):
            return NotImplemented
        return (self.name == other.name and self.row_count == other.row_count
                and self.columns == other.columns)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Table({self.name!r}, rows={self.row_count}, columns={self.headers})"


# ---------------------------------------------------------------------------
# schema

@dataclass(frozen=True)
class ColumnSpec:
    """Per-column metadata used by validation and generation.

    ``nullable`` defaults to True, or False for primary-key columns; asking
    for a nullable primary key raises :class:`ConflictingRuleError`. Either
    side of ``range`` may be None for an open bound.
    """

    name: str
    data_type: Kind = Kind.TEXT
    nullable: bool | None = None
    default_value: CellValue = None
    range: tuple[CellValue, CellValue] | None = None
    restricted_values: tuple[CellValue, ...] | None = None
    max_size: int | None = None
    format_pattern: str | None = None
    unit: str | None = None
    is_primary_key: bool = False
    foreign_key: tuple[str, str] | None = None
    precision: int | None = None
    casefold: bool = False
    benford: bool = False
    sequence: bool = False
    annotations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "data_type", Kind.parse(self.data_type))
        if self.nullable is None:
            set_(self, "nullable", not self.is_primary_key)
        elif self.nullable and self.is_primary_key:
            raise ConflictingRuleError(f"column {self.name!r}: a primary key cannot be nullable")
        if self.data_type is Kind.NULL:
            raise ConflictingRuleError(f"column {self.name!r}: null is not a data type")
        if self.range is not None:
            if self.data_type not in (Kind.NUMBER, Kind.DATE):
                raise ConflictingRuleError(
                    f"column {self.name!r}: range applies to number and date columns only")
            lo, hi = (cell(v) for v in self.range)
            for bound in (lo, hi):
                if bound is not None and kind_of(bound) is not self.data_type:
                    raise ConflictingRuleError(
                        f"column {self.name!r}: range bound {bound!r} is not a {self.data_type.label}")
            if lo is not None and hi is not None and compare_values(lo, hi) is Ordering.GREATER:
                raise ConflictingRuleError(f"column {self.name!r}: range min {lo} exceeds max {hi}")
            set_(self, "range", (lo, hi))
        if self.restricted_values is not None:
            set_(self, "restricted_values", tuple(cell(v) for v in self.restricted_values))
        if self.default_value is not None:
            set_(self, "default_value", cell(self.default_value))
        if self.max_size is not None and self.max_size < 0:
            raise ConflictingRuleError(f"column {self.name!r}: size must be >= 0")
        if self.precision is not None and self.precision < 0:
            raise ConflictingRuleError(f"column {self.name!r}: precision must be >= 0")
        if self.foreign_key is not None:
            set_(self, "foreign_key", tuple(self.foreign_key))

    @property
    def annotation_map(self) -> dict[str, str]:
        return dict(self.annotations)


@dataclass(frozen=True)
class Schema:
    table: str
    columns: tuple[ColumnSpec, ...] = ()
    rules: tuple[Any, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rules", tuple(self.rules))
        seen = set()
        for spec in self.columns:
            if spec.name in seen:
                raise ConflictingRuleError(f"column {spec.name!r} is specified twice")
            seen.add(spec.name)

    def spec(self, name: str) -> ColumnSpec | None:
        for s in self.columns:
            if s.name == name:
                return s
        return None

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.columns]

    @property
    def primary_key(self) -> list[str]:
        return [s.name for s in self.columns if s.is_primary_key]


# ---------------------------------------------------------------------------
# JSON form of cells

def encode_cell(value: CellValue) -> dict:
    """``{"type": ..., "value": ...}`` with numbers and dates as exact strings."""
    k = kind_of(value)
    if k is Kind.NULL:
        return {"type": "null", "value": None}
    if k is Kind.BOOLEAN:
        return {"type": "boolean", "value": value}
    if k is Kind.DATE:
        return {"type": "datetime" if isinstance(value, datetime) else "date", "value": value.isoformat()}
    return {"type": k.label, "value": render(value)}


def decode_cell(doc: dict) -> CellValue:
    t, v = doc["type"], doc["value"]
    if t == "null":
        return None
    if t == "boolean":
        if not isinstance(v, bool):
            raise ValueError(f"bad boolean {v!r}")
        return v
    if t == "number":
        d = Decimal(v)
        if not d.is_finite():
            raise ValueError(f"bad number {v!r}")
        return d
    if t == "date":
        return date.fromisoformat(v)
    if t == "datetime":
        return datetime.fromisoformat(v)
    if t == "text":
        return str(v)
    raise ValueError(f"unknown cell type {t!r}")
