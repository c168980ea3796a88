"""Cross-field consistency rules: ``when <predicate> expect <predicate>``.

Predicate grammar::

    predicate  := comparison ("and" comparison)*
    comparison := column op literal | column ["not"] "in" "{" literal ("," literal)* "}"
    op         := "=" | "!=" | "<" | "<=" | ">" | ">="
    column     := bare word | `back-quoted name`
    literal    := "quoted text" | null | bare word (number, ISO date, true/false, else text)

Comparisons are two-valued. A Null cell equals only the ``null`` literal;
``!=`` holds whenever ``=`` does not; ordering against Null or against a
different variant is false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .errors import ParseError
from .model import CellValue, Kind, Ordering, compare_values, kind_of, render, sort_key
from .parsing import parse_generic

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<qname>`[^`]+`)
  | (?P<op>!=|<=|>=|=|<|>)
  | (?P<punct>[{},])
  | (?P<word>[^\s"`{},=!<>]+)
""", re.VERBOSE)

OPS = ("=", "!=", "<", "<=", ">", ">=", "in", "not in")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int

    @property
    def keyword(self) -> str | None:
        return self.text.lower() if self.kind == "word" else None


def tokenize(text: str, line: int = 0, offset: int = 0) -> list[Token]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), offset + pos))
        pos = m.end()
    return tokens


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str
    value: CellValue | tuple[CellValue, ...]

    def holds(self, v: CellValue) -> bool:
        op, lit = self.op, self.value
        if op in ("in", "not in"):
            key = sort_key(v)
            found = any(sort_key(x) == key for x in lit)
            return found if op == "in" else not found
        if op == "=":
            return _equal(v, lit)
        if op == "!=":
            return not _equal(v, lit)
        order = compare_values(v, lit)
        if v is None or lit is None or order is Ordering.INCOMPARABLE:
            return False
        return {
            "<": order is Ordering.LESS,
            "<=": order is not Ordering.GREATER,
            ">": order is Ordering.GREATER,
            ">=": order is not Ordering.LESS,
        }[op]

    def __str__(self) -> str:
        if isinstance(self.value, tuple):
            body = ", ".join(_literal_text(x) for x in self.value)
            return f"{self.column} {self.op} {{{body}}}"
        return f"{self.column} {self.op} {_literal_text(self.value)}"


def _equal(a: CellValue, b: CellValue) -> bool:
    return sort_key(a) == sort_key(b)


def _literal_text(v: CellValue) -> str:
    if v is None:
        return "null"
    if kind_of(v) is Kind.TEXT:
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return render(v)


@dataclass(frozen=True)
class Predicate:
    terms: tuple[Comparison, ...] = ()

    @property
    def columns(self) -> list[str]:
        out = []
        for t in self.terms:
            if t.column not in out:
                out.append(t.column)
        return out

    def holds(self, row: Mapping[str, CellValue]) -> bool:
        return all(t.holds(row[t.column]) for t in self.terms)

    def __str__(self) -> str:
        return " and ".join(str(t) for t in self.terms) if self.terms else "true"


@dataclass(frozen=True)
class ConsistencyRule:
    name: str
    when: Predicate
    expect: Predicate

    @property
    def columns(self) -> list[str]:
        out = list(self.when.columns)
        out += [c for c in self.expect.columns if c not in out]
        return out

    def __str__(self) -> str:
        if self.when.terms:
            return f"when {self.when} expect {self.expect}"
        return f"expect {self.expect}"


class _Parser:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.i = 0
        self.line = line

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or (self.tokens[self.i] if self.i < len(self.tokens) else None)
        col = tok.pos + 1 if tok else (self.tokens[-1].pos + len(self.tokens[-1].text) + 1 if self.tokens else 1)
        return ParseError(message, self.line, col)

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of rule")
        self.i += 1
        return tok

    def predicate(self, stop: str | None = None) -> Predicate:
        terms = [self.comparison()]
        while (tok := self.peek()) is not None and tok.keyword == "and":
            self.i += 1
            terms.append(self.comparison())
        tok = self.peek()
        if tok is not None and tok.keyword != stop:
            raise self.error(f"expected 'and'{' or ' + repr(stop) if stop else ''}, got {tok.text!r}")
        return Predicate(tuple(terms))

    def comparison(self) -> Comparison:
        tok = self.take()
        if tok.kind == "qname":
            column = tok.text[1:-1]
        elif tok.kind == "word" and tok.keyword not in ("and", "in", "not", "when", "expect"):
            column = tok.text
        else:
            raise self.error(f"expected a column name, got {tok.text!r}", tok)
        op_tok = self.take()
        if op_tok.kind == "op":
            return Comparison(column, op_tok.text, self.literal())
        if op_tok.keyword == "in":
            return Comparison(column, "in", self.literal_set())
        if op_tok.keyword == "not":
            nxt = self.take()
            if nxt.keyword != "in":
                raise self.error("expected 'in' after 'not'", nxt)
            return Comparison(column, "not in", self.literal_set())
        raise self.error(f"expected a comparison operator, got {op_tok.text!r}", op_tok)

    def literal(self) -> CellValue:
        tok = self.take()
        if tok.kind == "string":
            return _unquote(tok.text)
        if tok.kind == "word":
            if tok.keyword == "null":
                return None
            return parse_generic(tok.text)
        raise self.error(f"expected a literal, got {tok.text!r}", tok)

    def literal_set(self) -> tuple[CellValue, ...]:
        tok = self.take()
        if tok.text != "{":
            raise self.error("expected '{'", tok)
        values = []
        if (t := self.peek()) is not None and t.text == "}":
            self.i += 1
            return ()
        while True:
            values.append(self.literal())
            tok = self.take()
            if tok.text == "}":
                return tuple(values)
            if tok.text != ",":
                raise self.error("expected ',' or '}'", tok)


def parse_predicate(text: str, line: int = 0, offset: int = 0) -> Predicate:
    parser = _Parser(tokenize(text, line, offset), line)
    if not parser.tokens:
        raise ParseError("empty predicate", line, offset + 1)
    return parser.predicate()


def parse_rule(name: str, body: str, line: int = 0, offset: int = 0) -> ConsistencyRule:
    """Parse ``when <pred> expect <pred>`` (or just ``expect <pred>``)."""
    parser = _Parser(tokenize(body, line, offset), line)
    tok = parser.peek()
    if tok is None:
        raise ParseError(f"rule {name!r} is empty", line, offset + 1)
    when = Predicate()
    if tok.keyword == "when":
        parser.i += 1
        when = parser.predicate(stop="expect")
        tok = parser.peek()
    if tok is None or tok.keyword != "expect":
        raise parser.error("expected 'expect'", tok)
    parser.i += 1
    expect = parser.predicate()
    return ConsistencyRule(name, when, expect)
