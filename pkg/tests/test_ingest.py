import io
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dqaudit.errors import (ConflictingRuleError, EmptyInputError, EncodingError, ParseError, ReadError,
                            UnknownAttributeError)
from dqaudit.ingest import (IngestOptions, Workbook, coerce_table, csv_text, format_schema, infer_types,
                            load_csv, load_schema, load_workbook, parse_schema, read_csv_text, write_csv,
                            write_workbook)
from dqaudit.model import Kind, Table, kind_of, render, sort_key

from conftest import FIXTURES


def test_quoted_delimiter_without_header():
    t = read_csv_text('a,"b,c",3\n', IngestOptions(has_header=False))
    assert t.row(0) == ("a", "b,c", Decimal(3))
    assert t.headers == ["column_1", "column_2", "column_3"]


def test_null_token_and_embedded_newline():
    t = read_csv_text('h1,h2,h3\nx,,y\n"multi\nline",NA, z \n')
    assert t.row(0) == ("x", None, "y")
    assert t.row(1) == ("multi\nline", None, "z")


def test_short_and_long_rows_are_reported():
    t = read_csv_text("a,b,c\n1,2\n1,2,3,4\n")
    assert t.row(0) == (Decimal(1), Decimal(2), None)
    assert [(w.row, w.expected, w.found) for w in t.warnings] == [(1, 3, 2), (2, 3, 4)]


def test_nul_byte_is_a_parse_error():
    with pytest.raises(ParseError):
        read_csv_text("a\nx\x00y\n")


def test_empty_input():
    with pytest.raises(EmptyInputError):
        read_csv_text("")
    assert read_csv_text("a,b\n").row_count == 0


def test_read_errors(tmp_path):
    with pytest.raises(ReadError):
        load_csv(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_bytes(b"a,b\n\xff\xfe,1\n")
    with pytest.raises(EncodingError):
        load_csv(bad)
    t = load_csv(bad, IngestOptions(lossy=True))
    assert t.row(0)[0] == "��"


def test_options_validate():
    with pytest.raises(ValueError):
        IngestOptions(delimiter=";;")
    with pytest.raises(ValueError):
        IngestOptions(date_patterns=())


def test_locale_enables_two_digit_years():
    text = "d\n03/04/21\n"
    assert read_csv_text(text).row(0) == ("03/04/21",)
    assert read_csv_text(text, IngestOptions(locale="dmy")).row(0) == (date(2021, 4, 3),)
    assert read_csv_text(text, IngestOptions(locale="mdy")).row(0) == (date(2021, 3, 4),)


def test_decimal_comma_with_semicolon_delimiter():
    t = read_csv_text("a;b\n1,5;x\n", IngestOptions(delimiter=";", decimal_separator=","))
    assert t.row(0) == (Decimal("1.5"), "x")


def test_schema_typing_keeps_codes_and_flags_bad_cells():
    schema = parse_schema("column code: type=text\ncolumn n: type=number\n")
    t = read_csv_text("code,n\n007,12\n008,abc\n", schema=schema)
    assert t.row(0) == ("007", Decimal(12))
    assert t.row(1) == ("008", "abc")


@pytest.mark.parametrize("values,kind", [
    (["1", "2", "3"], Kind.NUMBER), (["1", "x"], Kind.TEXT), (["2020-01-01", ""], Kind.DATE),
    (["true", "FALSE"], Kind.BOOLEAN), (["", ""], Kind.TEXT),
])
def test_infer_types(values, kind):
    t = read_csv_text("c\n" + "\n".join(values) + "\n")
    spec = infer_types(t).spec("c")
    assert spec.data_type is kind
    assert spec.nullable is ("" in values)
    if values == ["1", "2", "3"]:
        assert spec.range == (Decimal(1), Decimal(3))


cell_text = st.one_of(
    st.sampled_from(["", "NA", "x", "true", "2020-05-06", "007", "a;b"]),
    st.integers(-10**6, 10**6).map(str),
    st.decimals(places=2, min_value=-1000, max_value=1000, allow_nan=False).map(str),
)


@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.lists(cell_text, min_size=3, max_size=3), min_size=1, max_size=15))
def test_infer_is_idempotent(rows):
    text = "a,b,c\n" + "\n".join(",".join(r) for r in rows) + "\n"
    t = read_csv_text(text)
    schema = infer_types(t)
    assert infer_types(coerce_table(t, schema)) == schema


def tables_equal(a: Table, b: Table):
    assert a.headers == b.headers and a.row_count == b.row_count
    for x, y in zip(a.rows(), b.rows()):
        assert [sort_key(v) for v in x] == [sort_key(v) for v in y]
        assert [render(v) for v in x if v is not None] == [render(v) for v in y if v is not None]


@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.lists(cell_text | st.text(st.characters(blacklist_characters="\x00"), max_size=6),
                         min_size=3, max_size=3), min_size=1, max_size=15))
def test_csv_round_trip(rows):
    text = "a,b,c\n" + "".join(",".join('"' + c.replace('"', '""') + '"' for c in r) + "\n" for r in rows)
    t = read_csv_text(text)
    if t.warnings:
        return
    tables_equal(t, read_csv_text(csv_text(t)))


def test_fixture_round_trip(tmp_path):
    for path in sorted(FIXTURES.glob("*.csv")):
        t = load_csv(path)
        out = tmp_path / path.name
        write_csv(t, out)
        tables_equal(t, load_csv(out))


def test_write_to_stream_uses_crlf():
    t = read_csv_text("a,b\n1,x\n")
    buf = io.StringIO()
    write_csv(t, buf)
    assert buf.getvalue() == "a,b\r\n1,x\r\n"


def test_workbook_round_trip(tmp_path):
    wb = Workbook([read_csv_text("a\n1\n", name="one"), read_csv_text("b\nx\n", name="two")])
    write_workbook(wb, tmp_path / "wb")
    back = load_workbook(tmp_path / "wb")
    assert back.names == ["one", "two"]
    tables_equal(back.table("two"), wb.table("two"))
    with pytest.raises(ValueError):
        Workbook([wb.table("one"), wb.table("one")])


def test_schema_file_basics():
    s = parse_schema("table t\ncolumn x: type=number range=0..100\ncolumn y\n")
    assert s.table == "t"
    assert s.spec("x").range == (Decimal(0), Decimal(100))
    y = s.spec("y")
    assert (y.data_type, y.nullable, y.range, y.restricted_values) == (Kind.TEXT, True, None, None)


def test_schema_file_fixture_round_trips():
    s = load_schema(FIXTURES / "people.dq")
    assert s.primary_key == ["id"]
    assert s.spec("dept").foreign_key == ("departments", "dept_id")
    assert s.spec("birth_date").range[0] == date(1900, 1, 1)
    assert parse_schema(format_schema(s)) == s


def test_schema_open_range_and_annotations():
    s = parse_schema('column x: type=number range=..10 source="field form" frequency=monthly\n')
    spec = s.spec("x")
    assert spec.range == (None, Decimal(10))
    assert spec.annotation_map == {"source": "field form", "frequency": "monthly"}


@pytest.mark.parametrize("text,error,line", [
    ("column x: type=number pk nullable", ConflictingRuleError, 1),
    ("column x: colour=red", UnknownAttributeError, 1),
    ("\ncolumn x: type=money", ParseError, 2),
    ("column x\ncolumn x", ConflictingRuleError, 2),
    ("bogus line", ParseError, 1),
    ("column x: type=number range=5", ParseError, 1),
    ("column x: type=text range=1..2", ConflictingRuleError, 1),
    ("column x: type=number\nrule r: expect x >", ParseError, 2),
    ("column x: type=number range=10..1", ConflictingRuleError, 1),
])
def test_schema_errors_have_positions(text, error, line):
    with pytest.raises(error) as info:
        parse_schema(text)
    assert info.value.line == line
    assert info.value.column >= 1


def test_values_are_typed_by_column_type():
    s = parse_schema("column n: type=number values=1|2|3\n")
    assert all(kind_of(v) is Kind.NUMBER for v in s.spec("n").restricted_values)
