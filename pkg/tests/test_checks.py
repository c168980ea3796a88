import random
from datetime import date
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from dqaudit.checks import (DEFAULT_CHECKS, AuditConfig, audit, check_ambiguity, check_atomicity,
                            check_completeness, check_consistency, check_primary_key,
                            check_referential_integrity, check_schema_binding, check_structure,
                            check_timeliness, check_validity)
from dqaudit.errors import NoKeyDefinedError
from dqaudit.findings import CHECKS, Dimension, Finding, Severity, exit_status
from dqaudit.ingest import load_csv, load_schema, parse_schema, read_csv_text
from dqaudit.model import Column, Table
from dqaudit.report import finding_line

from conftest import FIXTURES, table


def rows_of(findings):
    return [a.row for f in findings for a in f.addresses]


def test_completeness_examples():
    s = parse_schema("column v: type=number required\n")
    f = check_completeness(table(v=[1, None, 3]), s)
    assert len(f) == 1 and f[0].addresses[0].row == 2
    assert f[0].dimension is Dimension.COMPLETE
    assert check_completeness(table(v=[None, None]), parse_schema("column v: type=number\n")) == []


@settings(max_examples=40)
@given(st.lists(st.lists(st.one_of(st.none(), st.integers(0, 9)), min_size=3, max_size=3), max_size=40),
       st.lists(st.booleans(), min_size=3, max_size=3))
def test_completeness_matches_full_scan(rows, required):
    names = ["a", "b", "c"]
    t = Table.from_rows("t", names, rows)
    s = parse_schema("".join(f"column {n}: type=number{' required' if r else ''}\n" for n, r in zip(names, required)))
    expected = sorted((i + 1, j + 1) for i, r in enumerate(rows) for j, v in enumerate(r)
                      if v is None and required[j])
    got = sorted((a.row, a.column) for f in check_completeness(t, s) for a in f.addresses)
    assert got == expected


def test_range_values_format_examples():
    s = parse_schema("column v: type=number range=0..100\n")
    f = check_validity(table(v=[5, 101, -3]), s)
    assert rows_of(f) == [2, 3]
    assert {x.check_id for x in f} == {"range"}
    f = check_validity(table(v=["M", "X"]), parse_schema("column v: values=M|F\n"))
    assert rows_of(f) == [2] and f[0].check_id == "values"
    f = check_validity(table(v=["01/01/2020"]), parse_schema("column v: type=date format=YYYY-MM-DD\n"))
    assert [x.dimension for x in f] == [Dimension.CONFORMITY]


def test_range_bounds_are_inclusive_and_open():
    f = check_validity(table(v=[0, 100, Decimal("100.01")]), parse_schema("column v: type=number range=0..100\n"))
    assert rows_of(f) == [3]
    assert check_validity(table(v=[-10**20]), parse_schema("column v: type=number range=..5\n")) == []
    f = check_validity(table(v=[date(1899, 12, 31), date(1950, 1, 1)]),
                       parse_schema("column v: type=date range=1900-01-01..\n"))
    assert rows_of(f) == [1]


def test_type_size_precision_format():
    s = parse_schema("column n: type=number precision=2\ncolumn t: size=3 format=[A-Z]+\n")
    t = table(n=[Decimal("1.25"), Decimal("1.255"), "abc"], t=["ABC", "ABCD", "ab"])
    got = sorted((f.check_id, f.addresses[0].row) for f in check_validity(t, s))
    assert got == [("format", 3), ("precision", 2), ("size", 2), ("type", 3)]


@settings(max_examples=40)
@given(st.lists(st.one_of(st.none(), st.decimals(places=1, min_value=-50, max_value=150, allow_nan=False)), max_size=60))
def test_range_matches_scan(values):
    t = table(v=values)
    got = rows_of(check_validity(t, parse_schema("column v: type=number range=0..100\n")))
    assert got == [i + 1 for i, v in enumerate(values) if v is not None and not 0 <= v <= 100]


def test_primary_key_examples():
    s = parse_schema("column k: pk\n")
    f = check_primary_key(table(k=["A", "B", "A"]), s)
    assert len(f) == 1 and rows_of(f) == [1, 3]
    assert check_primary_key(table(k=["A", "B", "C"]), s) == []
    with pytest.raises(NoKeyDefinedError):
        check_primary_key(table(k=[1]), parse_schema("column k\n"))


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 5), st.sampled_from("xy")), max_size=40))
def test_composite_key_groups_match_hash_oracle(keys):
    t = Table.from_rows("t", ["a", "b"], keys)
    s = parse_schema("column a: type=number pk\ncolumn b: pk\n")
    groups = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(i + 1)
    expected = sorted(tuple(g) for g in groups.values() if len(g) > 1)
    got = sorted(tuple(sorted({a.row for a in f.addresses})) for f in check_primary_key(t, s))
    assert got == expected


def test_null_primary_key_is_reported():
    f = check_primary_key(table(k=[1, None]), parse_schema("column k: type=number pk\n"))
    assert rows_of(f) == [2]


def test_referential_integrity_examples():
    fk = parse_schema("column c: type=number fk=p.k\n").spec("c")
    parent = table("p", k=[1, 2, 3])
    f = check_referential_integrity(table("t", c=[1, 2, 5]), parent, fk)
    assert rows_of(f) == [3] and f[0].observed == 5
    assert check_referential_integrity(table("t", c=[3, 1, None]), parent, fk) == []


@settings(max_examples=40)
@given(st.lists(st.integers(0, 20), max_size=30), st.sets(st.integers(0, 20), max_size=15), st.booleans())
def test_referential_integrity_matches_set_difference(child, parent, as_text):
    conv = str if as_text else (lambda x: x)
    fk = parse_schema("column c: fk=p.k\n").spec("c")
    f = check_referential_integrity(table("t", c=[conv(x) for x in child]),
                                    table("p", k=[conv(x) for x in sorted(parent)]), fk)
    assert rows_of(f) == [i + 1 for i, x in enumerate(child) if x not in parent]


def test_scaled_foreign_keys_compare_by_value():
    fk = parse_schema("column c: type=number fk=p.k\n").spec("c")
    f = check_referential_integrity(table("t", c=[Decimal("1.0"), Decimal("2.5")]), table("p", k=[1, 2]), fk)
    assert rows_of(f) == [2]


JOHN = parse_schema('column first_name\ncolumn gender\nrule john: when first_name in {John} expect gender = "M"\n')


@pytest.mark.parametrize("first,gender,count", [("John", "F", 1), ("John", "M", 0), ("Mary", "F", 0)])
def test_consistency_rule(first, gender, count):
    f = check_consistency(table(first_name=[first], gender=[gender]), JOHN.rules)
    assert len(f) == count
    if f:
        assert f[0].dimension is Dimension.CONSISTENT
        assert [a.a1 for a in f[0].addresses] == ["A1", "B1"]


def test_unbound_rule_is_a_finding_not_a_crash():
    f = audit(table(first_name=["John"]), JOHN, config=AuditConfig(checks={"rule_binding", "consistency"}))
    assert [x.check_id for x in f] == ["rule_binding"]


def test_atomicity():
    f = check_atomicity(table(c=["red;blue", "red, white and blue", 5, "a|b"]))
    assert rows_of(f) == [1, 4]
    assert rows_of(check_atomicity(table(c=["a,b"]), [","])) == [1]


@pytest.mark.parametrize("headers,count,columns", [
    (["amount", "Amount"], 1, 2), (["a", "b", "c"], 0, 0), (["x", "x", "x"], 1, 3)])
def test_ambiguity(headers, count, columns):
    t = Table("t", [Column(h, [1]) for h in headers])
    f = check_ambiguity(t)
    assert len(f) == count
    if f:
        assert f[0].message.count("(") == columns


def test_structure_and_schema_binding():
    t = read_csv_text("a,b\n1\n", name="t")
    assert rows_of(check_structure(t)) == [1]
    f = check_schema_binding(t, parse_schema("column a\ncolumn z\n"))
    assert sorted((x.severity, x.column) for x in f) == [(Severity.WARNING, "b"), (Severity.ERROR, "z")]


def test_timeliness():
    day = 86400.0
    assert check_timeliness(table(), 0.0, 10, now=5 * day) == []
    assert len(check_timeliness(table(), 0.0, 10, now=11 * day)) == 1


def test_unknown_check_ids_are_rejected():
    with pytest.raises(ValueError):
        AuditConfig(checks={"nope"})


def test_every_check_id_is_registered():
    assert set(DEFAULT_CHECKS) | {"timeliness"} == set(CHECKS)
    for info in CHECKS.values():
        Finding(info.check_id, "t", "m")


def test_exit_status():
    warn = Finding("gaps", "t", "m")
    err = Finding("range", "t", "m")
    info = Finding("gaps", "t", "m", severity=Severity.INFO)
    assert exit_status([]) == 0 and exit_status([info]) == 0
    assert exit_status([warn, info]) == 1 and exit_status([warn, err]) == 2


def test_fixture_audit():
    schema = load_schema(FIXTURES / "people.dq")
    people = load_csv(FIXTURES / "people.csv", schema=schema, name="people")
    refs = {"departments": load_csv(FIXTURES / "departments.csv")}
    findings = audit(people, schema, refs=refs)
    assert [finding_line(f) for f in findings] == [
        "people!B1 [ERROR] consistency: rule john_is_male violated: first_name=John, gender=F"]
    no_ref = audit(people, schema)
    assert any(f.check_id == "foreign_key" and f.severity is Severity.WARNING for f in no_ref)


def random_table(seed, rows=300):
    rng = random.Random(seed)
    return Table.from_rows("r", ["id", "amount", "code", "when"], [
        [i if rng.random() > 0.02 else i - 1, rng.choice([None, rng.randint(-5, 500), 99999]),
         rng.choice(["A", "B", "A;B", None, "TBD"]), date(2020, 1, 1 + rng.randrange(28))]
        for i in range(1, rows + 1)])


def test_audit_is_deterministic_across_threads():
    schema = parse_schema("column id: type=number pk\ncolumn amount: type=number range=0..400 benford\n"
                          "column code: values=A|B\ncolumn when: type=date\n"
                          "rule r: when code = A expect amount < 300\n")
    t = random_table(3)
    cfg = AuditConfig(benford_min_sample=10)
    one = audit(t, schema, config=cfg, threads=1)
    assert one == audit(t, schema, config=cfg, threads=4) == audit(t, schema, config=cfg, threads=1)
    assert len({f.check_id for f in one}) >= 5


def test_severity_override():
    cfg = AuditConfig(checks={"range"}, severity_overrides={"range": Severity.INFO})
    f = audit(table(v=[500]), parse_schema("column v: type=number range=0..1\n"), config=cfg)
    assert [x.severity for x in f] == [Severity.INFO]
