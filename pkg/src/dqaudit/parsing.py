"""Text-to-cell parsing primitives shared by ingestion, schemas and rules."""

from __future__ import annotations

import re
from datetime import date, datetime
from decimal import Decimal
from functools import lru_cache

from .model import CellValue, Kind, parts_decimal

_ISO_DATE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}\Z")
_ISO_DATETIME = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}[T ][0-9]{2}:[0-9]{2}(?::[0-9]{2}(?:\.[0-9]{1,6})?)?\Z")

ISO_DATE = "YYYY-MM-DD"


@lru_cache(maxsize=None)
def number_pattern(decimal_separator: str = ".", leading_zeros: bool = False) -> re.Pattern:
    """Plain decimal literal. Leading zeros ("007") only match when allowed."""
    sep = re.escape(decimal_separator)
    whole = "[0-9]+" if leading_zeros else "(?:0|[1-9][0-9]*)"
    return re.compile(rf"([+-]?)({whole})(?:{sep}([0-9]+))?\Z")


def parse_number_parts(text: str, decimal_separator: str = ".",
                       leading_zeros: bool = False) -> tuple[int, int] | None:
    """``"-12.50"`` -> ``(-1250, 2)``; None when the text is not a number."""
    m = number_pattern(decimal_separator, leading_zeros).match(text)
    if m is None:
        return None
    sign, whole, frac = m.groups()
    frac = frac or ""
    unscaled = int(whole + frac)
    return (-unscaled if sign == "-" else unscaled), len(frac)


def parse_number(text: str, decimal_separator: str = ".", leading_zeros: bool = False) -> Decimal | None:
    parts = parse_number_parts(text, decimal_separator, leading_zeros)
    if parts is None:
        return None
    return parts_decimal(*parts)


def parse_bool(text: str) -> bool | None:
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    return None


# picture tokens, longest first
_TOKENS = (
    ("YYYY", "%Y", r"[0-9]{4}"),
    ("YY", "%y", r"[0-9]{2}"),
    ("MM", "%m", r"[0-9]{2}"),
    ("DD", "%d", r"[0-9]{2}"),
    ("hh", "%H", r"[0-9]{2}"),
    ("HH", "%H", r"[0-9]{2}"),
    ("mm", "%M", r"[0-9]{2}"),
    ("MI", "%M", r"[0-9]{2}"),
    ("ss", "%S", r"[0-9]{2}"),
)


def is_date_picture(pattern: str) -> bool:
    """Pictures like ``DD/MM/YYYY``: made of date tokens and separators only."""
    if "%" in pattern:
        return True
    rest = pattern
    for tok, _, _ in _TOKENS:
        rest = rest.replace(tok, "")
    return rest != pattern and not any(ch.isalnum() for ch in rest)


@lru_cache(maxsize=None)
def compile_date_pattern(pattern: str) -> tuple[re.Pattern | None, str, bool]:
    """Translate a picture (``YYYY-MM-DD``) or strptime pattern.

    Returns ``(regex, strptime_format, has_time)``. Pictures get a strict
    regex so that ``2020-1-5`` does not pass ``YYYY-MM-DD``.
    """
    if "%" in pattern:
        return None, pattern, any(t in pattern for t in ("%H", "%M", "%S", "%I"))
    fmt, rx, i = [], [], 0
    has_time = False
    while i < len(pattern):
        for tok, directive, tok_rx in _TOKENS:
            if pattern.startswith(tok, i):
                fmt.append(directive)
                rx.append(tok_rx)
                has_time = has_time or directive in ("%H", "%M", "%S")
                i += len(tok)
                break
        else:
            ch = pattern[i]
            fmt.append("%%" if ch == "%" else ch)
            rx.append(re.escape(ch))
            i += 1
    return re.compile("".join(rx) + r"\Z"), "".join(fmt), has_time


def two_digit_year(pattern: str) -> bool:
    if "%" in pattern:
        return "%y" in pattern
    return "YY" in pattern.replace("YYYY", "")


def parse_date_with(text: str, pattern: str) -> date | datetime | None:
    if pattern == ISO_DATE:
        return parse_iso(text)
    regex, fmt, has_time = compile_date_pattern(pattern)
    if regex is not None and not regex.match(text):
        return None
    try:
        parsed = datetime.strptime(text, fmt)
    except ValueError:
        return None
    return parsed if has_time else parsed.date()


def parse_iso(text: str) -> date | datetime | None:
    """ISO date, or ISO date-time when the text carries a time part."""
    try:
        if _ISO_DATE.match(text):
            return date.fromisoformat(text)
        if _ISO_DATETIME.match(text):
            return datetime.fromisoformat(text)
    except ValueError:
        return None
    return None


def parse_date(text: str, patterns=(ISO_DATE,)) -> date | datetime | None:
    for p in patterns:
        value = parse_date_with(text, p)
        if value is not None:
            return value
    return None


def parse_generic(text: str, *, decimal_separator: str = ".", date_patterns=(ISO_DATE,)) -> CellValue:
    """Infer a cell from text: Number, then Date, then Boolean, else Text.

    No null-token handling here; callers decide what counts as Null.
    """
    parts = parse_number_parts(text, decimal_separator)
    if parts is not None:
        return parse_number(text, decimal_separator)
    d = parse_date(text, date_patterns)
    if d is not None:
        return d
    b = parse_bool(text)
    if b is not None:
        return b
    return text


def parse_as(text: str, kind: Kind, *, decimal_separator: str = ".",
             date_patterns=(ISO_DATE,)) -> CellValue:
    """Parse text as a declared type; returns the text unchanged when it does not parse."""
    if kind is Kind.TEXT:
        return text
    if kind is Kind.NUMBER:
        v = parse_number(text, decimal_separator, leading_zeros=True)
    elif kind is Kind.DATE:
        v = parse_date(text, date_patterns)
    elif kind is Kind.BOOLEAN:
        v = parse_bool(text)
    else:
        v = None
    return text if v is None else v
