from datetime import date, datetime
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from dqaudit.errors import ParseError
from dqaudit.model import Kind, render
from dqaudit.parsing import (is_date_picture, parse_as, parse_bool, parse_date, parse_generic,
                             parse_number)
from dqaudit.rules import parse_predicate, parse_rule


@pytest.mark.parametrize("text,value", [
    ("12", Decimal(12)), ("-3.50", Decimal("-3.50")), ("+7", Decimal(7)), ("0.00456", Decimal("0.00456")),
    ("-0", Decimal(0)), ("1e3", None), ("1,000", None), ("", None), ("007", None), (".5", None),
])
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_number_keeps_scale_and_separator():
    assert render(parse_number("2.500")) == "2.500"
    assert parse_number("1,5", ",") == Decimal("1.5")
    assert parse_number("007", leading_zeros=True) == 7


def test_leading_zero_codes_stay_text():
    assert parse_generic("007") == "007"
    assert parse_as("007", Kind.NUMBER) == Decimal(7)


@pytest.mark.parametrize("text,patterns,value", [
    ("2020-02-29", ("YYYY-MM-DD",), date(2020, 2, 29)),
    ("2021-02-29", ("YYYY-MM-DD",), None),
    ("31/12/1999", ("DD/MM/YYYY",), date(1999, 12, 31)),
    ("12/31/1999", ("MM/DD/YYYY",), date(1999, 12, 31)),
    ("01/02/20", ("DD/MM/YY",), date(2020, 2, 1)),
    ("2020-01-01 10:30", ("YYYY-MM-DD",), datetime(2020, 1, 1, 10, 30)),
])
def test_parse_date(text, patterns, value):
    assert parse_date(text, patterns) == value


def test_date_picture_detection():
    assert is_date_picture("YYYY-MM-DD")
    assert not is_date_picture("[A-Z]{3}")


def test_generic_order():
    assert parse_generic("12") == Decimal(12)
    assert parse_generic("2020-01-01") == date(2020, 1, 1)
    assert parse_generic("TRUE") is True and parse_bool("False") is False
    assert parse_generic("hello") == "hello"


@given(st.decimals(allow_nan=False, allow_infinity=False, places=4, min_value=-10**12, max_value=10**12))
def test_number_text_round_trip(v):
    text = render(v)
    back = parse_number(text)
    assert back == v and render(back) == text


@given(st.dates(min_value=date(1000, 1, 1)))
def test_iso_date_round_trip(d):
    assert parse_generic(d.isoformat()) == d


# rules

JOHN = 'when first_name in {John} expect gender = "M"'


@pytest.mark.parametrize("row,violated", [
    ({"first_name": "John", "gender": "F"}, True),
    ({"first_name": "John", "gender": "M"}, False),
    ({"first_name": "Mary", "gender": "F"}, False),
    ({"first_name": "John", "gender": None}, True),
])
def test_john_rule(row, violated):
    rule = parse_rule("john", JOHN)
    assert rule.columns == ["first_name", "gender"]
    holds = not rule.when.holds(row) or rule.expect.holds(row)
    assert holds is not violated


def test_predicate_operators():
    p = parse_predicate('a >= 3 and b != "x" and c not in {1, 2}')
    row = {"a": Decimal(4), "b": "y", "c": Decimal(3)}
    assert p.holds(row)
    assert not p.holds({**row, "a": Decimal(2)})
    assert not p.holds({**row, "c": Decimal(2)})
    assert not p.holds({**row, "a": None})         # ordering against null is false
    assert parse_predicate("d < 2020-06-01").holds({"d": date(2020, 1, 1)})
    assert parse_predicate("x = null").holds({"x": None})
    assert parse_predicate("`odd name` = 1").holds({"odd name": Decimal(1)})


def test_rule_text_round_trips():
    rule = parse_rule("r", JOHN)
    again = parse_rule("r", str(rule))
    assert again == rule


@pytest.mark.parametrize("body", ["expect", "when a = 1", "expect a ~ 1", "expect a in {1", 'expect a = "open'])
def test_rule_syntax_errors_carry_position(body):
    with pytest.raises(ParseError) as info:
        parse_rule("r", body, line=7, offset=10)
    assert info.value.line == 7
