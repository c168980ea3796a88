"""Statistical and pattern checks over columns and tables.

All arithmetic on numbers is exact: numeric columns are scanned as scaled
integers (see :class:`~dqaudit.model.NumericData`) and means, shares and
quartiles are :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (BadBandsError, LengthMismatchError, NonOrderableError, NotNumericError,
                     TooFewValuesError)
from .findings import Finding
from .model import (CellAddress, CellValue, Column, ColumnSpec, Kind, NumericData, Ordering,
                    Schema, Table, compare_values, decimal_parts, kind_of, map_distinct, parts_decimal, render,
                    sort_key)

BENFORD_EXPECTED = tuple(math.log10(1 + 1 / d) for d in range(1, 10))
CHI2_CRITICAL_8DF = 15.507


def address(col: Column, i: int) -> CellAddress:
    """Address of 0-based row ``i`` of a column placed in a table."""
    return CellAddress(col.table, i + 1, max(col.index, 1))


def fraction_text(value: Fraction, places: int = 6) -> str:
    """Exact decimal text when it terminates within ``places`` digits, else rounded."""
    value = Fraction(value)
    for p in range(places + 1):
        scaled = value * 10**p
        if scaled.denominator == 1:
            return render(parts_decimal(int(scaled), p))
    scaled = round(value * 10**places)
    return render(parts_decimal(int(scaled), places))


def _numbers_only(col: Column) -> tuple[np.ndarray, NumericData]:
    """Row indices and numeric data of the Number cells of a column."""
    nd = col.numeric
    if nd is not None:
        rows = np.flatnonzero(~nd.null)
        return rows, NumericData(nd.unscaled[rows], nd.scale[rows], np.zeros(len(rows), bool))
    cells = col.cells
    rows = [i for i, v in enumerate(cells) if type(v) is Decimal]
    sub = NumericData.from_values([cells[i] for i in rows])
    return np.array(rows, dtype=np.int64), sub


def _require_numeric(col: Column) -> tuple[np.ndarray, NumericData]:
    if col.numeric is None and col.kinds() - {Kind.NUMBER}:
        raise NotNumericError(f"column {col.name!r} holds {sorted(k.label for k in col.kinds())} values")
    return _numbers_only(col)


# ---------------------------------------------------------------------------
# descriptive statistics

@dataclass(frozen=True)
class StatsSummary:
    count: int
    null_count: int
    min: CellValue
    max: CellValue
    mean: Fraction | None
    total: Decimal | None
    top_k: tuple[tuple[CellValue, int], ...]
    bottom_k: tuple[tuple[CellValue, int], ...]
    frequency: tuple[tuple[CellValue, int], ...]   # ascending value order

    def count_of(self, value: CellValue) -> int:
        key = sort_key(value)
        return next((n for v, n in self.frequency if sort_key(v) == key), 0)

    @property
    def mean_text(self) -> str | None:
        return None if self.mean is None else fraction_text(self.mean, 10)


def _grouped(col: Column) -> list[tuple[CellValue, int]]:
    """Distinct non-null values with counts, ascending in canonical order."""
    nd = col.numeric
    if nd is not None:
        values, counts, scale = _numeric_counts(nd)
        return [(parts_decimal(v, scale), c) for v, c in zip(values, counts)]
    return sorted(_tally(col), key=lambda vn: sort_key(vn[0]))


def _numeric_counts(nd: NumericData) -> tuple[list[int], list[int], int]:
    """Ascending distinct unscaled values, their counts and the common scale."""
    if not nd.count:
        return [], [], 0
    ints, scale = nd.aligned()
    live = ints[~nd.null]
    if live.dtype == object:
        tally = Counter(live.tolist())
        values = sorted(tally)
        return values, [tally[v] for v in values], scale
    values, counts = np.unique(live, return_counts=True)
    return values.tolist(), counts.tolist(), scale


def _tally(col: Column) -> list[tuple[CellValue, int]]:
    """Distinct non-null values of a non-numeric column with counts, unordered."""
    kinds = col.kinds()
    if len(kinds) == 1 and kinds <= {Kind.TEXT, Kind.BOOLEAN}:
        tally = Counter(col.cells)
        tally.pop(None, None)
        return list(tally.items())
    if Kind.BOOLEAN in kinds and len(kinds) > 1:
        tally = Counter((v.__class__, v) for v in col.cells if v is not None)
        distinct = [(v, n) for (_, v), n in tally.items()]
    else:
        tally = Counter(col.cells)
        tally.pop(None, None)
        distinct = list(tally.items())
    groups: dict[tuple, list] = {}
    for v, n in distinct:
        key = sort_key(v)
        slot = groups.get(key)
        if slot is None:
            groups[key] = [v, n]
        else:
            slot[1] += n
    return [(v, n) for v, n in groups.values()]


def descriptive_stats(column: Column, k: int = 10) -> StatsSummary:
    """Count, nulls, min/max, exact mean (numbers only), top/bottom ``k`` and frequencies.

    ``top_k`` lists the ``k`` largest distinct values, largest first;
    ``bottom_k`` the ``k`` smallest, smallest first. Values of different
    variants are ordered Boolean < Number < Date < Text.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = len(column)
    null_count = int(column.null_mask().sum())
    freq = _grouped(column)
    mean = total = None
    nd = column.numeric
    if nd is not None and nd.count:
        ints, scale = nd.aligned()
        live = ints[~nd.null]
        if live.dtype == object or (len(live) and int(np.abs(live).max()) > (2**62) // len(live)):
            s = sum(int(x) for x in live.tolist())
        else:
            s = int(live.sum())
        total = parts_decimal(s, scale)
        mean = Fraction(s, 10**scale) / nd.count
    return StatsSummary(
        count=n, null_count=null_count,
        min=freq[0][0] if freq else None, max=freq[-1][0] if freq else None,
        mean=mean, total=total,
        top_k=tuple(reversed(freq[-k:])), bottom_k=tuple(freq[:k]), frequency=tuple(freq))


# ---------------------------------------------------------------------------
# stratification and cross-tabulation

@dataclass(frozen=True)
class Strata:
    bands: tuple[tuple[CellValue, CellValue], ...]
    counts: tuple[int, ...]
    out_of_band: int
    skipped: int = 0        # non-null cells that are neither numbers nor dates


def stratify(column: Column, bands: Sequence[tuple[CellValue, CellValue]]) -> Strata:
    """Count values per half-open band ``[lo, hi)``.

    Bands must be non-empty, ascending and non-overlapping (touching is fine).
    """
    from .model import cell
    bands = tuple((cell(lo), cell(hi)) for lo, hi in bands)
    if not bands:
        raise BadBandsError("at least one band is required")
    kinds = {kind_of(b) for band in bands for b in band}
    if len(kinds) != 1 or not kinds <= {Kind.NUMBER, Kind.DATE}:
        raise BadBandsError("band bounds must all be numbers or all dates")
    kind = kinds.pop()
    for i, (lo, hi) in enumerate(bands):
        if compare_values(lo, hi) is not Ordering.LESS:
            raise BadBandsError(f"band {i + 1} is empty or reversed: [{render(lo)}, {render(hi)})")
        if i and compare_values(bands[i - 1][1], lo) is Ordering.GREATER:
            raise BadBandsError(f"band {i + 1} overlaps or precedes band {i}")
    keys = [sort_key(lo)[1] for lo, _ in bands]
    his = [sort_key(hi)[1] for _, hi in bands]
    counts = [0] * len(bands)
    out = skipped = 0
    for v in column.cells:
        if v is None:
            continue
        if kind_of(v) is not kind:
            skipped += 1
            continue
        x = sort_key(v)[1]
        j = bisect.bisect_right(keys, x) - 1
        if j >= 0 and x < his[j]:
            counts[j] += 1
        else:
            out += 1
    return Strata(bands, tuple(counts), out, skipped)


def cross_tabulate(col_a: Column, col_b: Column) -> dict[tuple[CellValue, CellValue], int]:
    """Counts of each observed ``(a, b)`` pair; Null is keyed as ``None``."""
    if len(col_a) != len(col_b):
        raise LengthMismatchError(f"columns have {len(col_a)} and {len(col_b)} cells")
    groups: dict[tuple, list] = {}
    for a, b in zip(col_a.cells, col_b.cells):
        key = (sort_key(a), sort_key(b))
        slot = groups.get(key)
        if slot is None:
            groups[key] = [(a, b), 1]
        else:
            slot[1] += 1
    return {pair: n for _, (pair, n) in sorted(groups.items(), key=lambda kv: kv[0])}


# ---------------------------------------------------------------------------
# duplicates

def column_codes(col: Column) -> np.ndarray:
    """Dense integer codes: equal cells share a code (Null is its own value)."""
    nd = col.numeric
    if nd is not None:
        ints, _ = nd.aligned()
        if ints.dtype != object:
            # nulls get a code of their own one past the largest value
            _, inv = np.unique(ints, return_inverse=True)
            inv = inv.astype(np.int64).ravel()
            if nd.null.any():
                inv = inv + 1
                inv[nd.null] = 0
            return inv
    kinds = col.kinds()
    mixed = len(kinds) > 1 and bool(kinds & {Kind.BOOLEAN, Kind.NUMBER})
    mapping: dict = {}
    setdefault = mapping.setdefault
    cells = col.cells
    if mixed:
        codes = [setdefault(sort_key(v), len(mapping)) for v in cells]
        return np.array(codes, dtype=np.int64)
    for i, v in enumerate(dict.fromkeys(cells)):
        mapping[v] = i
    return np.fromiter(map(mapping.__getitem__, cells), dtype=np.int64, count=len(cells))


def row_codes(columns: Sequence[Column]) -> np.ndarray:
    """One dense code per row; rows are equal on ``columns`` iff codes are equal."""
    n = len(columns[0])
    combined = np.zeros(n, dtype=np.int64)
    for col in columns:
        codes = column_codes(col)
        width = int(codes.max()) + 1 if n else 1
        combined = combined * width + codes
        _, combined = np.unique(combined, return_inverse=True)
        combined = combined.astype(np.int64).ravel()
    return combined


@dataclass(frozen=True)
class DuplicateReport:
    counts: tuple[int, ...]               # per row: rows sharing its key (itself included)
    groups: tuple[tuple[int, ...], ...]   # 1-based rows of each group, by first row
    key_columns: tuple[str, ...]


def find_duplicates(table: Table, key_columns: Sequence[str] = ()) -> DuplicateReport:
    """Rows identical on ``key_columns`` (all columns when empty).

    ``counts[i]`` is how many rows carry row ``i``'s key, the COUNTIF view;
    every row with a count of two or more belongs to exactly one group.
    """
    cols = [table.column(c) for c in key_columns] if key_columns else list(table.columns)
    names = tuple(c.name for c in cols)
    if not cols or table.row_count == 0:
        return DuplicateReport(tuple([1] * table.row_count) if cols else (), (), names)
    codes = row_codes(cols)
    _, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
    per_row = counts[inverse.ravel()]
    dup_rows = np.flatnonzero(per_row > 1)
    groups: dict[int, list[int]] = {}
    for r, c in zip(dup_rows.tolist(), codes[dup_rows].tolist()):
        groups.setdefault(c, []).append(r + 1)
    ordered = sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
    return DuplicateReport(tuple(per_row.tolist()), tuple(ordered), names)


# ---------------------------------------------------------------------------
# gaps

@dataclass(frozen=True)
class GapReport:
    duplicates: tuple[tuple[CellValue, tuple[CellAddress, ...]], ...]
    gaps: tuple[tuple[CellValue, int], ...]           # (after_value, missing_count)
    irregular: tuple[tuple[CellValue, CellValue], ...]  # (value, next_value) off the step grid
    sequential: int                                    # adjacent pairs exactly one step apart
    sequential_runs: int                               # maximal runs of such pairs
    pairs: int                                         # adjacent sorted pairs examined

    @property
    def missing_total(self) -> int:
        return sum(m for _, m in self.gaps)


def _ordinal_values(col: Column, step) -> tuple[np.ndarray, list, object, callable]:
    """Sortable integer keys, row indices, integer step and a key->value map."""
    nd = col.numeric
    kinds = col.kinds()
    if nd is not None:
        step = Decimal(str(step)) if not isinstance(step, Decimal) else step
        if step <= 0:
            raise ValueError("step must be positive")
        rows = np.flatnonzero(~nd.null)
        scale = max(nd.max_scale, decimal_parts(step)[1])
        ints, scale = nd.aligned(scale)
        step_int = int(step.scaleb(scale))
        return ints[rows], rows, step_int, lambda k: parts_decimal(int(k), scale)
    if kinds - {Kind.DATE}:
        raise NonOrderableError(f"column {col.name!r} is not numeric or date")
    step = Fraction(str(step)) if not isinstance(step, (int, Fraction)) else Fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    cells = col.cells
    rows = [i for i, v in enumerate(cells) if v is not None]
    timed = any(isinstance(cells[i], datetime) for i in rows)
    if not timed and step.denominator == 1:
        keys = np.array([cells[i].toordinal() for i in rows], dtype=np.int64)
        return keys, np.array(rows, dtype=np.int64), int(step), lambda k: date.fromordinal(int(k))
    day = 86_400_000_000
    epoch = datetime(1, 1, 1)

    def micros(v):
        o, us = (v.toordinal(), 0) if not isinstance(v, datetime) else (v.toordinal(), (
            (v.hour * 60 + v.minute) * 60 + v.second) * 1_000_000 + v.microsecond)
        return (o - 1) * day + us

    keys = np.array([micros(cells[i]) for i in rows], dtype=np.int64)
    step_us = step * day
    if step_us.denominator != 1:
        raise ValueError("date step must be a whole number of microseconds")
    return keys, np.array(rows, dtype=np.int64), int(step_us), lambda k: epoch + timedelta(microseconds=int(k))


def find_gaps(column: Column, step=1) -> GapReport:
    """Sort the non-null values and classify each adjacent difference ``d``.

    ``d == 0`` is a duplicate, ``d == step`` sequential, a positive multiple
    of ``step`` a gap of ``d/step - 1`` missing values, anything else an
    irregular step. Dates step in days.
    """
    keys, rows, step_int, to_value = _ordinal_values(column, step)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    sorted_rows = np.asarray(rows)[order]
    codes, missing = _kernels.classify_steps(sorted_keys, step_int)
    dup_groups: list[tuple[CellValue, tuple[CellAddress, ...]]] = []
    dup_idx = np.flatnonzero(codes == _kernels.DUPLICATE)
    if dup_idx.size:
        # consecutive duplicate pairs belong to the same group
        start = None
        prev = -2
        bounds = []
        for i in dup_idx.tolist():
            if i != prev + 1:
                if start is not None:
                    bounds.append((start, prev + 1))
                start = i
            prev = i
        bounds.append((start, prev + 1))
        for lo, hi in bounds:
            group_rows = sorted(sorted_rows[lo:hi + 1].tolist())
            dup_groups.append((to_value(sorted_keys[lo]), tuple(address(column, r) for r in group_rows)))
    gap_idx = np.flatnonzero(codes == _kernels.GAP)
    gaps = tuple((to_value(sorted_keys[i]), int(missing[i])) for i in gap_idx.tolist())
    irr_idx = np.flatnonzero(codes == _kernels.IRREGULAR)
    irregular = tuple((to_value(sorted_keys[i]), to_value(sorted_keys[i + 1])) for i in irr_idx.tolist())
    seq = codes == _kernels.SEQUENTIAL
    runs = int(seq[0]) + int(np.count_nonzero(seq[1:] & ~seq[:-1])) if seq.size else 0
    return GapReport(tuple(dup_groups), gaps, irregular, int(seq.sum()), runs, int(codes.size))


# ---------------------------------------------------------------------------
# Benford

@dataclass(frozen=True)
class BenfordResult:
    observed: tuple[int, ...]        # counts for digits 1..9
    expected: tuple[float, ...]      # probabilities for digits 1..9
    n: int
    chi_square: float
    mad: float
    flagged: bool
    insufficient: bool               # n below the minimum sample; never flagged

    @property
    def proportions(self) -> tuple[float, ...]:
        return tuple(o / self.n if self.n else 0.0 for o in self.observed)


def benford_from_digits(digits: np.ndarray, min_sample: int = 100) -> BenfordResult:
    counts = np.bincount(digits[digits > 0].astype(np.int64), minlength=10)[1:10]
    n = int(counts.sum())
    observed = tuple(int(c) for c in counts)
    if n == 0:
        return BenfordResult(observed, BENFORD_EXPECTED, 0, 0.0, 0.0, False, True)
    exp = np.array(BENFORD_EXPECTED)
    chi = float((((counts - exp * n) ** 2) / (exp * n)).sum())
    mad = float(np.abs(counts / n - exp).mean())
    insufficient = n < min_sample
    return BenfordResult(observed, BENFORD_EXPECTED, n, chi, mad,
                         (not insufficient) and chi > CHI2_CRITICAL_8DF, insufficient)


def benford(column: Column, min_sample: int = 100) -> BenfordResult:
    """First-digit test against ``log10(1 + 1/d)``.

    Zeros are not eligible. The digit is the first significant decimal digit
    of the stored value (``0.00456`` -> 4). Flagged when chi-square exceeds
    15.507 (8 degrees of freedom, alpha 0.05) and at least ``min_sample``
    values are eligible. The mean absolute deviation of proportions is also
    reported.
    """
    if min_sample < 1:
        raise ValueError("min_sample must be positive")
    _, nd = _require_numeric(column)
    return benford_from_digits(_kernels.leading_digits(nd.unscaled), min_sample)


def benford_finding(column: Column, result: BenfordResult) -> Finding | None:
    if not result.flagged:
        return None
    top = max(range(9), key=lambda d: result.observed[d] / result.n - result.expected[d])
    return Finding(
        "benford", column.table,
        f"leading digits deviate from Benford (chi-square {result.chi_square:.3f} > "
        f"{CHI2_CRITICAL_8DF}, MAD {result.mad:.5f}, n={result.n}); digit {top + 1} is over-represented",
        column=column.name, column_index=column.index,
        expected="chi-square <= 15.507")


# ---------------------------------------------------------------------------
# suspicious values

@dataclass(frozen=True)
class SuspiciousPatterns:
    nines_min_length: int | None = 2
    dates: tuple[date, ...] = (date(2001, 1, 1), date(1900, 1, 1), date(1999, 12, 31))
    text: tuple[str, ...] = ("TBD", "XXX", "N/A", "TEST")
    zero_outside_range: bool = True


DEFAULT_PATTERNS = SuspiciousPatterns()


def suspicious_in_column(col: Column, spec: ColumnSpec | None = None,
                         patterns: SuspiciousPatterns = DEFAULT_PATTERNS) -> list[Finding]:
    found: dict[int, str] = {}
    rows, nd = _numbers_only(col)
    if len(rows):
        if patterns.nines_min_length:
            hits = _kernels.all_nines(nd.unscaled, nd.scale, patterns.nines_min_length)
            for r in rows[hits].tolist():
                found[r] = "all-nines placeholder"
        if patterns.zero_outside_range and spec is not None and spec.range is not None \
                and spec.data_type is Kind.NUMBER and not _zero_in_range(spec.range):
            zeros = rows[(nd.unscaled == 0)]
            for r in zeros.tolist():
                found.setdefault(r, "zero outside the declared range")
    kinds = col.kinds()
    if Kind.DATE in kinds and patterns.dates:
        marked = {d.toordinal() for d in patterns.dates}
        midnight = datetime.min.time()

        def placeholder_date(v):
            return isinstance(v, date) and v.toordinal() in marked and (
                not isinstance(v, datetime) or v.time() == midnight)
        for i, hit in enumerate(map_distinct(col, placeholder_date)):
            if hit:
                found[i] = "placeholder date"
    if Kind.TEXT in kinds and patterns.text:
        marked_text = {t.casefold() for t in patterns.text}

        def placeholder_text(v):
            return type(v) is str and v.strip().casefold() in marked_text
        for i, hit in enumerate(map_distinct(col, placeholder_text)):
            if hit:
                found[i] = "placeholder text"
    cells = col.cells if col._cells is not None else None
    out = []
    for i in sorted(found):
        v = cells[i] if cells is not None else col[i]
        out.append(Finding("suspicious", col.table, f"suspicious value {render(v)} ({found[i]})",
                           addresses=(address(col, i),), column=col.name, observed=v,
                           column_index=col.index))
    return out


def _zero_in_range(rng) -> bool:
    lo, hi = rng
    return (lo is None or lo <= 0) and (hi is None or hi >= 0)


def find_suspicious(table: Table, patterns: SuspiciousPatterns | None = None,
                    schema: Schema | None = None) -> list[Finding]:
    """Placeholder-looking values: all-nines numbers (99, 99999), sentinel
    dates, TBD-style text, and zeros where the schema range excludes zero."""
    patterns = patterns or DEFAULT_PATTERNS
    out = []
    for col in table.columns:
        out += suspicious_in_column(col, schema.spec(col.name) if schema else None, patterns)
    return out


# ---------------------------------------------------------------------------
# dominance

def share_text(share: Fraction) -> str:
    """Two-decimal rendering, half-even: 4/5 gives ``0.80``."""
    return str((Decimal(share.numerator) / Decimal(share.denominator)).quantize(Decimal("0.01"), ROUND_HALF_EVEN))


def dominance(column: Column, threshold: float = 0.5, *, spec: ColumnSpec | None = None,
              min_count: int = 20, min_distinct: int = 3) -> Finding | None:
    """Flag a column where one valid value takes at least ``threshold`` of
    the non-null cells.

    Needs ``min_count`` non-null cells and a domain (restricted list, or the
    observed values when there is none) of at least ``min_distinct`` values;
    a two-valued column is never flagged.
    """
    share_min = Fraction(str(threshold))
    if not 0 < share_min <= 1:
        raise ValueError("threshold must be in (0, 1]")
    nd = column.numeric
    if nd is not None:
        values, counts, scale = _numeric_counts(nd)
    else:
        freq = _tally(column)
        values, counts = [v for v, _ in freq], [n for _, n in freq]
    total = sum(counts)
    if total < min_count:
        return None
    domain = len(spec.restricted_values) if spec is not None and spec.restricted_values else len(values)
    if domain < min_distinct:
        return None
    count = max(counts)
    # ties go to the smallest value
    value = min((v for v, n in zip(values, counts) if n == count), key=None if nd is not None else sort_key)
    if nd is not None:
        value = parts_decimal(value, scale)
    share = Fraction(count, total)
    if share < share_min:
        return None
    return Finding(
        "dominance", column.table,
        f"value {render(value)} has share {share_text(share)} ({count} of {total} non-null cells); "
        "valid but possibly incorrect",
        column=column.name, observed=value, column_index=column.index,
        expected=f"share < {fraction_text(share_min, 6)}")


# ---------------------------------------------------------------------------
# outliers

def quartiles(sorted_ints: np.ndarray) -> tuple[Fraction, Fraction]:
    """Q1 and Q3 by linear interpolation between closest ranks.

    For ``n`` sorted values ``x[0..n-1]`` and ``p`` in {1/4, 3/4}: ``h = (n-1)p``,
    ``Q = x[floor h] + (h - floor h) * (x[floor h + 1] - x[floor h])``. This is
    the common "type 7" definition (numpy's default ``linear`` method),
    evaluated here in exact rational arithmetic.
    """
    n = len(sorted_ints)
    out = []
    for p in (Fraction(1, 4), Fraction(3, 4)):
        h = (n - 1) * p
        lo = math.floor(h)
        x_lo = int(sorted_ints[lo])
        x_hi = int(sorted_ints[min(lo + 1, n - 1)])
        out.append(x_lo + (h - lo) * (x_hi - x_lo))
    return out[0], out[1]


def outlier_fences(column: Column, k: float = 1.5) -> tuple[Fraction, Fraction]:
    """Tukey fences ``[Q1 - k*IQR, Q3 + k*IQR]`` as exact fractions."""
    rows, nd = _require_numeric(column)
    if len(rows) < 4:
        raise TooFewValuesError(f"column {column.name!r} has {len(rows)} numbers, need at least 4")
    ints, scale = nd.aligned()
    q1, q3 = quartiles(np.sort(ints))
    kk = Fraction(str(k))
    unit = Fraction(1, 10**scale)
    iqr = q3 - q1
    return (q1 - kk * iqr) * unit, (q3 + kk * iqr) * unit


def outliers(column: Column, k: float = 1.5) -> list[Finding]:
    """Values outside the Tukey fences (see :func:`quartiles` for the method)."""
    if k <= 0:
        raise ValueError("k must be positive")
    rows, nd = _require_numeric(column)
    if len(rows) < 4:
        raise TooFewValuesError(f"column {column.name!r} has {len(rows)} numbers, need at least 4")
    ints, scale = nd.aligned()
    q1, q3 = quartiles(np.sort(ints))
    kk = Fraction(str(k))
    lo_f, hi_f = q1 - kk * (q3 - q1), q3 + kk * (q3 - q1)
    lo_i, hi_i = math.ceil(lo_f), math.floor(hi_f)
    if ints.dtype == object:
        flags = np.array([x < lo_i or x > hi_i for x in ints.tolist()], dtype=bool)
    else:
        flags = (ints < lo_i) | (ints > hi_i)
    unit = Fraction(1, 10**scale)
    lo_text, hi_text = fraction_text(lo_f * unit), fraction_text(hi_f * unit)
    out = []
    for j in np.flatnonzero(flags).tolist():
        v = parts_decimal(int(ints[j]), scale)
        out.append(Finding("outliers", column.table, f"value {render(v)} outside [{lo_text}, {hi_text}]",
                           addresses=(address(column, int(rows[j])),), column=column.name,
                           observed=v, expected=f"[{lo_text}, {hi_text}]", column_index=column.index))
    return out
