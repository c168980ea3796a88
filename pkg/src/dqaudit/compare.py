"""Table comparison and combination: cell diffs, row alignment, set membership,
unique extraction and match/merge."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

import numpy as np

from . import _kernels
from .analytics import row_codes
from .errors import DuplicateKeyError, ShapeMismatchError
from .model import EXACT, CellAddress, CellValue, Column, NumericData, Table, render, sort_key

MODES = ("position", "key", "sequence")


@dataclass(frozen=True)
class CellDiff:
    """One differing cell. ``delta`` is ``right - left`` when both are Numbers."""

    address: CellAddress               # position in the left table
    column: str
    left: CellValue
    right: CellValue
    delta: Decimal | None = None
    right_address: CellAddress | None = None


@dataclass(frozen=True)
class DiffResult:
    cell_diffs: tuple[CellDiff, ...]
    aligned_by: str
    shape_diff: str | None = None
    key: tuple[str, ...] = ()
    left_only_rows: tuple[int, ...] = ()      # 1-based rows of the left table
    right_only_rows: tuple[int, ...] = ()     # 1-based rows of the right table
    left_only_columns: tuple[str, ...] = ()
    right_only_columns: tuple[str, ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.cell_diffs or self.shape_diff or self.left_only_rows or self.right_only_rows
                    or self.left_only_columns or self.right_only_columns)

    @property
    def addresses(self) -> list[CellAddress]:
        return [d.address for d in self.cell_diffs]


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[tuple[int, int], ...]   # (left row, right row), 0-based
    deletions: tuple[int, ...]           # unpaired left rows
    insertions: tuple[int, ...]          # unpaired right rows


class _Comparer:
    def __init__(self, epsilon: Decimal | None, text_insensitive: bool):
        self.epsilon = None if epsilon is None else Decimal(str(epsilon))
        self.text_insensitive = text_insensitive

    def diff(self, a: CellValue, b: CellValue) -> tuple[bool, Decimal | None]:
        """(differs, delta)."""
        if type(a) is Decimal and type(b) is Decimal:
            delta = EXACT.subtract(b, a)
            if delta == 0 or (self.epsilon is not None and abs(delta) <= self.epsilon):
                return False, None
            return True, delta
        if self.text_insensitive and type(a) is str and type(b) is str:
            return " ".join(a.split()).casefold() != " ".join(b.split()).casefold(), None
        return sort_key(a) != sort_key(b), None


def _numeric_column_diff(left: Column, right: Column, cmp: _Comparer):
    """Row indices that differ, for two all-number columns of equal length."""
    ln, rn = left.numeric, right.numeric
    scale = max(ln.max_scale, rn.max_scale)
    li, _ = ln.aligned(scale)
    ri, _ = rn.aligned(scale)
    if li.dtype == object or ri.dtype == object:
        changed = np.array([a != b for a, b in zip(li.tolist(), ri.tolist())], dtype=bool)
    else:
        changed = li != ri
    changed = (changed & ~ln.null & ~rn.null) | (ln.null != rn.null)
    return np.flatnonzero(changed).tolist()


def _diff_rows(left: Table, right: Table, pairs, columns, cmp: _Comparer) -> list[CellDiff]:
    """Cell diffs for paired rows over (left_col, right_col) pairs."""
    out = []
    for lc, rc in columns:
        for li, ri in pairs:
            a, b = lc[li], rc[ri]
            differs, delta = cmp.diff(a, b)
            if differs:
                out.append(CellDiff(CellAddress(left.name, li + 1, lc.index), lc.name, a, b, delta,
                                    CellAddress(right.name, ri + 1, rc.index)))
    return out


def diff_tables(left: Table, right: Table, mode: str = "position", *, key: Sequence[str] = (),
                epsilon=None, text_insensitive: bool = False) -> DiffResult:
    """Cell-level comparison of two tables.

    ``position`` compares cell (r, c) with cell (r, c) and needs equal shapes.
    ``key`` pairs rows by the ``key`` columns (unique in both tables) and
    compares same-named columns. ``sequence`` pairs identical rows by longest
    common subsequence, then diffs the unpaired rows that sit in the same
    gap position by position.

    Numbers are compared exactly (``epsilon`` loosens that); other cells by
    value and variant, optionally ignoring case and whitespace for text.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    cmp = _Comparer(epsilon, text_insensitive)
    if mode == "position":
        return _diff_position(left, right, cmp)
    if mode == "key":
        return _diff_key(left, right, tuple(key), cmp)
    return _diff_sequence(left, right, cmp)


def _diff_position(left: Table, right: Table, cmp: _Comparer) -> DiffResult:
    if (left.row_count, len(left.columns)) != (right.row_count, len(right.columns)):
        raise ShapeMismatchError(
            f"{left.name} is {left.row_count}x{len(left.columns)}, {right.name} is "
            f"{right.row_count}x{len(right.columns)}; use key or sequence alignment")
    diffs = []
    for lc, rc in zip(left.columns, right.columns):
        if lc.numeric is not None and rc.numeric is not None and cmp.epsilon is None:
            rows = _numeric_column_diff(lc, rc, cmp)
            for i in rows:
                a, b = lc[i], rc[i]
                _, delta = cmp.diff(a, b)
                diffs.append(CellDiff(CellAddress(left.name, i + 1, lc.index), lc.name, a, b, delta,
                                      CellAddress(right.name, i + 1, rc.index)))
        else:
            identity = [(i, i) for i in range(left.row_count)]
            diffs += _diff_rows(left, right, identity, [(lc, rc)], cmp)
    diffs.sort(key=lambda d: (d.address.row, d.address.column))
    lnames, rnames = left.headers, right.headers
    return DiffResult(tuple(diffs), "position",
                      left_only_columns=tuple(n for n in lnames if n not in rnames),
                      right_only_columns=tuple(n for n in rnames if n not in lnames))


def _key_index(table: Table, key: Sequence[str]) -> tuple[dict[tuple, int], list[int]]:
    """Map each non-null key to its row; rows with a null key part are returned separately."""
    cols = [table.column(k) for k in key]
    index: dict[tuple, int] = {}
    null_rows = []
    for i, values in enumerate(zip(*(c.cells for c in cols))):
        if any(v is None for v in values):
            null_rows.append(i)
            continue
        k = tuple(sort_key(v) for v in values)
        if k in index:
            shown = ", ".join(render(v) for v in values)
            raise DuplicateKeyError(f"key ({shown}) occurs more than once in {table.name} "
                                    f"(rows {index[k] + 1} and {i + 1})")
        index[k] = i
    return index, null_rows


def _diff_key(left: Table, right: Table, key: tuple[str, ...], cmp: _Comparer) -> DiffResult:
    if not key:
        raise ValueError("key mode needs at least one key column")
    (li, lnull), (ri, rnull) = _key_index(left, key), _key_index(right, key)
    lnames, rnames = left.headers, right.headers
    shared = [n for n in lnames if n in rnames and n not in key]
    pairs = [(i, ri[k]) for k, i in li.items() if k in ri]
    columns = [(left.column(n), right.column(n)) for n in shared]
    diffs = _diff_rows(left, right, pairs, columns, cmp)
    diffs.sort(key=lambda d: (d.address.row, d.address.column))
    shape = None
    if left.row_count != right.row_count or len(lnames) != len(rnames):
        shape = (f"{left.name} is {left.row_count}x{len(lnames)}, "
                 f"{right.name} is {right.row_count}x{len(rnames)}")
    return DiffResult(
        tuple(diffs), "key", shape, key,
        left_only_rows=tuple(sorted([i + 1 for k, i in li.items() if k not in ri] + [i + 1 for i in lnull])),
        right_only_rows=tuple(sorted([i + 1 for k, i in ri.items() if k not in li] + [i + 1 for i in rnull])),
        left_only_columns=tuple(n for n in lnames if n not in rnames),
        right_only_columns=tuple(n for n in rnames if n not in lnames))


def _diff_sequence(left: Table, right: Table, cmp: _Comparer) -> DiffResult:
    al = align_by_sequence(left, right)
    # unpaired rows between the same two anchors are compared position by position
    anchors = [(-1, -1)] + list(al.pairs) + [(left.row_count, right.row_count)]
    paired_edits = []
    for (l0, r0), (l1, r1) in zip(anchors, anchors[1:]):
        dl, ir = range(l0 + 1, l1), range(r0 + 1, r1)
        paired_edits += list(zip(dl, ir))
    width = min(len(left.columns), len(right.columns))
    columns = list(zip(left.columns[:width], right.columns[:width]))
    diffs = _diff_rows(left, right, paired_edits, columns, cmp)
    extra = []
    if len(left.columns) != len(right.columns):
        longer, side = (left, "left") if len(left.columns) > len(right.columns) else (right, "right")
        for li, ri in paired_edits:
            for c in longer.columns[width:]:
                i = li if side == "left" else ri
                a = c[i] if side == "left" else None
                b = c[i] if side == "right" else None
                extra.append(CellDiff(CellAddress(left.name, li + 1, c.index), c.name, a, b, None,
                                      CellAddress(right.name, ri + 1, c.index)))
    diffs = sorted(diffs + extra, key=lambda d: (d.address.row, d.address.column))
    used_l = {li for li, _ in paired_edits}
    used_r = {ri for _, ri in paired_edits}
    shape = None
    if left.row_count != right.row_count or len(left.columns) != len(right.columns):
        shape = (f"{left.name} is {left.row_count}x{len(left.columns)}, "
                 f"{right.name} is {right.row_count}x{len(right.columns)}")
    return DiffResult(
        tuple(diffs), "sequence", shape,
        left_only_rows=tuple(i + 1 for i in al.deletions if i not in used_l),
        right_only_rows=tuple(i + 1 for i in al.insertions if i not in used_r),
        left_only_columns=tuple(n for n in left.headers if n not in right.headers),
        right_only_columns=tuple(n for n in right.headers if n not in left.headers))


def _shared_row_codes(left: Table, right: Table) -> tuple[np.ndarray, np.ndarray]:
    """Integer codes per row, equal across the two tables iff the rows are equal."""
    if len(left.columns) != len(right.columns) or not left.columns:
        n_l = left.row_count
        if not left.columns and not right.columns:
            return np.zeros(n_l, np.int64), np.zeros(right.row_count, np.int64)
        return np.arange(n_l, dtype=np.int64), np.arange(n_l, n_l + right.row_count, dtype=np.int64)
    joined = [Column(lc.name, lc.cells + rc.cells, normalize=False)
              for lc, rc in zip(left.columns, right.columns)]
    codes = row_codes(joined) if joined[0].cells else np.zeros(0, np.int64)
    return codes[:left.row_count], codes[left.row_count:]


def lcs_pairs(a: np.ndarray, b: np.ndarray) -> list[tuple[int, int]]:
    """Maximum matching of equal elements preserving order.

    Among optimal pairings the traceback takes a match as soon as one is
    available and otherwise skips the left element first when that keeps the
    optimum, so the result is deterministic.
    """
    n, m = len(a), len(b)
    pre = 0
    while pre < n and pre < m and a[pre] == b[pre]:
        pre += 1
    suf = 0
    while suf < n - pre and suf < m - pre and a[n - 1 - suf] == b[m - 1 - suf]:
        suf += 1
    pairs = [(i, i) for i in range(pre)]
    ca, cb = a[pre:n - suf], b[pre:m - suf]
    if len(ca) and len(cb):
        table = _kernels.lcs_suffix(ca, cb)
        i = j = 0
        while i < len(ca) and j < len(cb):
            if ca[i] == cb[j]:
                pairs.append((pre + i, pre + j))
                i += 1
                j += 1
            elif table[i + 1, j] >= table[i, j + 1]:
                i += 1
            else:
                j += 1
    pairs += [(n - suf + k, m - suf + k) for k in range(suf)]
    return pairs


def align_by_sequence(left: Table, right: Table) -> Alignment:
    """Pair whole-row-equal rows by longest common subsequence."""
    a, b = _shared_row_codes(left, right)
    pairs = lcs_pairs(a, b)
    pl = {p for p, _ in pairs}
    pr = {q for _, q in pairs}
    return Alignment(tuple(pairs), tuple(i for i in range(left.row_count) if i not in pl),
                     tuple(j for j in range(right.row_count) if j not in pr))


# ---------------------------------------------------------------------------
# membership, unique extraction, match/merge

@dataclass(frozen=True)
class Membership:
    in_both: tuple[CellValue, ...]
    only_a: tuple[CellValue, ...]
    only_b: tuple[CellValue, ...]


def set_membership(col_a: Column, col_b: Column) -> Membership:
    """Partition the distinct non-null values of two columns. Each part is in
    canonical value order."""
    ka = {sort_key(v): v for v in col_a.cells if v is not None}
    kb = {sort_key(v): v for v in col_b.cells if v is not None}
    both = sorted(ka.keys() & kb.keys())
    return Membership(tuple(ka[k] for k in both),
                      tuple(ka[k] for k in sorted(ka.keys() - kb.keys())),
                      tuple(kb[k] for k in sorted(kb.keys() - ka.keys())))


def take_rows(table: Table, rows: Sequence[int], name: str | None = None) -> Table:
    """New table with the given 0-based rows, in the given order."""
    idx = np.asarray(rows, dtype=np.int64)
    cols = []
    for c in table.columns:
        if c._cells is None:
            nd = c.numeric
            cols.append(Column(c.name, numeric=NumericData(nd.unscaled[idx], nd.scale[idx], nd.null[idx])))
        else:
            cells = c.cells
            cols.append(Column(c.name, [cells[i] for i in idx.tolist()], normalize=False))
    return Table(name or table.name, cols, row_count=len(idx))


def extract_unique(table: Table, columns: Sequence[str] = ()) -> Table:
    """Keep the first row of each distinct key (all columns when ``columns`` is empty)."""
    cols = [table.column(c) for c in columns] if columns else list(table.columns)
    if not cols or table.row_count == 0:
        return table
    codes = row_codes(cols)
    _, first = np.unique(codes, return_index=True)
    return take_rows(table, np.sort(first))


JOINS = ("inner", "left")


def match_merge(left: Table, right: Table, key: Sequence[str], join: str = "inner",
                right_key: Sequence[str] | None = None) -> Table:
    """Join ``right`` onto ``left`` by ``key``.

    Output columns are the left columns followed by the right non-key
    columns (suffixed ``_right`` when a name clashes). Rows keep left order;
    ``left`` join keeps unmatched left rows with Null fill. Null keys never
    match. The right key must be unique. ``right_key`` names the right
    table's key columns when they differ from the left ones.
    """
    if join not in JOINS:
        raise ValueError(f"join must be one of {JOINS}")
    key = tuple(key)
    if not key:
        raise ValueError("match_merge needs at least one key column")
    rkey = tuple(right_key) if right_key is not None else key
    if len(rkey) != len(key):
        raise ValueError("left and right keys differ in length")
    for k in key:
        left.column(k)
    rindex, _ = _key_index(right, rkey)
    lcols = [left.column(k) for k in key]
    rows: list[tuple[int, int | None]] = []
    for i, values in enumerate(zip(*(c.cells for c in lcols))):
        j = None if any(v is None for v in values) else rindex.get(tuple(sort_key(v) for v in values))
        if j is not None or join == "left":
            rows.append((i, j))
    taken = take_rows(left, [i for i, _ in rows])
    names = set(left.headers)
    extra = []
    for rc in right.columns:
        if rc.name in rkey:
            continue
        name = rc.name
        while name in names:
            name += "_right"
        names.add(name)
        cells = rc.cells
        extra.append(Column(name, [None if j is None else cells[j] for _, j in rows], normalize=False))
    return Table(left.name, list(taken.columns) + extra, row_count=len(rows))
