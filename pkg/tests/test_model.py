import string
from datetime import date, datetime
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dqaudit.errors import MissingColumnError
from dqaudit.model import (CellAddress, Column, ColumnSpec, Kind, NumericData, Ordering, Schema, Table,
                           a1_to_address, cell, column_letters, column_number, compare_values,
                           decode_cell, encode_cell, kind_of, render, sort_key)

from conftest import col


def letters_oracle(n):
    # bijective base-26, built by enumeration rather than arithmetic
    out, width = [], 1
    while len(out) < n:
        for combo in _combos(width):
            out.append(combo)
            if len(out) == n:
                break
        width += 1
    return out[n - 1]


def _combos(width):
    if width == 1:
        yield from string.ascii_uppercase
        return
    for head in string.ascii_uppercase:
        for tail in _combos(width - 1):
            yield head + tail


@pytest.mark.parametrize("row,column,a1", [(1, 1, "A1"), (10, 27, "AA10"), (5, 2, "B5")])
def test_a1_addresses(row, column, a1):
    assert CellAddress("s", row, column).a1 == a1
    assert str(CellAddress("s", row, column)) == f"s!{a1}"


def test_column_letters_match_enumeration():
    for n in (1, 26, 27, 52, 53, 702, 703, 1000):
        assert column_letters(n) == letters_oracle(n)


@given(st.integers(1, 20000), st.integers(1, 10**6))
def test_a1_round_trip(column, row):
    addr = CellAddress("sheet", row, column)
    assert a1_to_address(addr.a1, "sheet") == addr
    assert column_number(column_letters(column)) == column


@pytest.mark.parametrize("a,b,expected", [
    (Decimal(2), Decimal(10), Ordering.LESS),
    (None, Decimal(0), Ordering.LESS),
    ("5", Decimal(5), Ordering.INCOMPARABLE),
    (Decimal("1.0"), Decimal(1), Ordering.EQUAL),
    ("b", "a", Ordering.GREATER),
    (date(2020, 1, 2), date(2020, 1, 1), Ordering.GREATER),
    (None, None, Ordering.EQUAL),
])
def test_compare_values(a, b, expected):
    assert compare_values(a, b) is expected


def test_kinds():
    assert kind_of(None) is Kind.NULL
    assert kind_of(True) is Kind.BOOLEAN
    assert kind_of(Decimal(1)) is Kind.NUMBER
    assert kind_of(date(2020, 1, 1)) is Kind.DATE
    assert kind_of(datetime(2020, 1, 1, 5)) is Kind.DATE
    assert kind_of("x") is Kind.TEXT
    assert Kind.parse("Number") is Kind.NUMBER
    assert cell(3) == Decimal(3) and isinstance(cell(3), Decimal)


values = st.one_of(
    st.none(), st.booleans(), st.text(max_size=8),
    st.decimals(allow_nan=False, allow_infinity=False, places=3, min_value=-10**9, max_value=10**9),
    st.dates(), st.datetimes(),
)


@given(st.lists(values, max_size=30))
def test_sort_key_is_total_and_groups_kinds(cells):
    ordered = sorted(cells, key=sort_key)
    kinds = [kind_of(v) for v in ordered]
    assert kinds == sorted(kinds)


@given(values)
def test_encode_decode_round_trip(v):
    back = decode_cell(encode_cell(v))
    assert kind_of(back) is kind_of(v)
    assert back == v
    if isinstance(v, Decimal):
        assert render(back) == render(v)


@given(values, values)
def test_compare_antisymmetric(a, b):
    ab, ba = compare_values(a, b), compare_values(b, a)
    flip = {Ordering.LESS: Ordering.GREATER, Ordering.GREATER: Ordering.LESS}
    assert ba is flip.get(ab, ab)


def test_numeric_storage_keeps_scale():
    c = col([Decimal("1.50"), 2, None, Decimal("-0.125")])
    nd = c.numeric
    assert nd is not None
    assert nd.value(0) == Decimal("1.50") and render(nd.value(0)) == "1.50"
    assert nd.value(2) is None
    ints, scale = nd.aligned()
    assert scale == 3
    assert ints[~nd.null].tolist() == [1500, 2000, -125]
    assert nd.count == 3


def test_numeric_wide_values_fall_back_to_objects():
    big = Decimal("123456789012345678901234567890")
    nd = NumericData.from_values([big, Decimal(1)])
    assert nd.value(0) == big
    assert nd.unscaled.dtype == object


def test_text_column_has_no_numeric_view():
    assert col(["a", 1]).numeric is None


def test_table_binds_and_looks_up():
    t = Table.from_rows("t", ["a", "b"], [[1, "x"], [2, None]])
    assert t.row_count == 2 and t.cell_count == 4
    assert t.row(1) == (Decimal(2), None)
    assert t.column("b").index == 2 and t.column("b").table == "t"
    with pytest.raises(MissingColumnError):
        t.column("zz")
    assert t.column("a").null_mask().tolist() == [False, False]


def test_column_spec_defaults_and_schema():
    spec = ColumnSpec("id", Kind.NUMBER, is_primary_key=True)
    assert spec.nullable is False
    assert ColumnSpec("x").nullable is True
    schema = Schema("t", (spec, ColumnSpec("x")))
    assert schema.primary_key == ["id"] and schema.names == ["id", "x"]
    assert schema.spec("x").data_type is Kind.TEXT and schema.spec("nope") is None


def test_column_numeric_view_matches_cells():
    rng = np.random.default_rng(4)
    raw = [None if r < 0.1 else Decimal(int(r * 10**6)) / 100 for r in rng.random(500)]
    c = Column("x", raw)
    assert c.numeric.decimals() == raw
