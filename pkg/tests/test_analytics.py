import math
from collections import Counter
from datetime import date, datetime, timedelta
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqaudit import _kernels
from dqaudit.analytics import (BENFORD_EXPECTED, benford, benford_from_digits, cross_tabulate,
                               descriptive_stats, dominance, find_duplicates, find_gaps, find_suspicious,
                               outliers, quartiles, stratify, suspicious_in_column)
from dqaudit.errors import (BadBandsError, LengthMismatchError, NonOrderableError, NotNumericError,
                            TooFewValuesError)
from dqaudit.ingest import parse_schema
from dqaudit.model import Table, sort_key

from conftest import D, col, table


# descriptive statistics

def test_stats_examples():
    s = descriptive_stats(col(range(1, 11)))
    assert (s.min, s.max, s.mean) == (1, 10, Fraction(11, 2))
    assert s.mean_text == "5.5"
    assert [v for v, _ in descriptive_stats(col([5, 9, 2, 7]), k=3).top_k] == [9, 7, 5]
    assert [v for v, _ in descriptive_stats(col([5, 9, 2, 7]), k=3).bottom_k] == [2, 5, 7]


@settings(max_examples=50)
@given(st.lists(st.one_of(st.none(), st.decimals(places=2, min_value=-1000, max_value=1000, allow_nan=False)),
                max_size=50), st.integers(1, 5))
def test_stats_match_single_pass_oracle(values, k):
    s = descriptive_stats(col(values), k)
    count = nulls = 0
    total = Decimal(0)
    freq = {}
    lo = hi = None
    for v in values:
        if v is None:
            nulls += 1
            continue
        count += 1
        total += v
        freq[v] = freq.get(v, 0) + 1
        lo = v if lo is None or v < lo else lo
        hi = v if hi is None or v > hi else hi
    assert (s.count, s.null_count) == (len(values), nulls)
    assert sum(n for _, n in s.frequency) == s.count - s.null_count
    assert s.min == lo and s.max == hi
    if count:
        assert s.mean == Fraction(total) / count
        assert s.total == total
    assert dict(s.frequency) == freq
    by_value = sorted(freq.items())
    assert [v for v, _ in s.top_k] == [v for v, _ in by_value[::-1][:k]]


def test_stats_on_text_and_dates():
    s = descriptive_stats(col(["b", "a", "b", None]))
    assert s.mean is None and s.count_of("b") == 2 and s.min == "a"
    d = descriptive_stats(col([date(2020, 1, 2), date(2019, 5, 1)]))
    assert d.min == date(2019, 5, 1)


# stratification and cross tabulation

BANDS = [(D(0), D(10)), (D(10), D(20))]


def test_stratify_examples():
    s = stratify(col([5, 15, 12]), BANDS)
    assert s.counts == (1, 2) and s.out_of_band == 0
    assert stratify(col([10]), BANDS).counts == (0, 1)
    assert stratify(col([-1]), BANDS).out_of_band == 1


def test_stratify_rejects_bad_bands():
    with pytest.raises(BadBandsError):
        stratify(col([1]), [(D(0), D(10)), (D(5), D(20))])
    with pytest.raises(BadBandsError):
        stratify(col([1]), [(D(10), D(0))])
    with pytest.raises(BadBandsError):
        stratify(col([1]), [])


@given(st.lists(st.decimals(places=1, min_value=-5, max_value=40, allow_nan=False), max_size=60))
def test_stratify_counts_partition(values):
    s = stratify(col(values), BANDS)
    expected = [sum(1 for v in values if lo <= v < hi) for lo, hi in BANDS]
    assert list(s.counts) == expected
    assert sum(s.counts) + s.out_of_band == len(values)


def test_cross_tab_examples():
    assert cross_tabulate(col(list("MMF")), col(list("YNY"))) == {("M", "Y"): 1, ("M", "N"): 1, ("F", "Y"): 1}
    assert cross_tabulate(col([]), col([])) == {}
    with pytest.raises(LengthMismatchError):
        cross_tabulate(col([1]), col([]))


@settings(max_examples=30)
@given(st.lists(st.tuples(st.one_of(st.none(), st.sampled_from("abc")), st.integers(0, 3)), max_size=80))
def test_cross_tab_matches_nested_loop(pairs):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    got = cross_tabulate(col(a), col(b))
    distinct = {(x, y) for x, y in pairs}
    oracle = {}
    for x, y in distinct:
        oracle[(x, D(y))] = sum(1 for u, v in pairs if u == x and v == y)
    assert got == oracle


# duplicates and gaps

def test_duplicate_examples():
    r = find_duplicates(table(v=list("ABACA")))
    assert r.counts == (3, 1, 3, 1, 3) and r.groups == ((1, 3, 5),)
    assert find_duplicates(table(v=list("ABC"))).groups == ()


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from(["x", "y", None])), max_size=40))
def test_duplicates_match_sort_then_scan(rows):
    t = Table.from_rows("t", ["a", "b"], rows)
    r = find_duplicates(t)
    order = sorted(range(len(rows)), key=lambda i: (tuple(sort_key(v) for v in t.row(i)), i))
    groups, run = [], []
    for i in order:
        if run and t.row(run[-1]) != t.row(i):
            groups.append(run)
            run = []
        run.append(i)
    if run:
        groups.append(run)
    expected = sorted(tuple(j + 1 for j in g) for g in groups if len(g) > 1)
    assert sorted(r.groups) == expected
    sizes = {j: len(g) for g in groups for j in g}
    assert list(r.counts) == [sizes[i] for i in range(len(rows))]


def test_duplicates_on_key_columns():
    r = find_duplicates(table(a=[1, 1, 2], b=["x", "y", "x"]), ["a"])
    assert r.groups == ((1, 2),)


def test_gap_examples(backend):
    g = find_gaps(col([1, 2, 3, 5, 6, 9]))
    assert g.gaps == ((3, 1), (6, 2)) and g.duplicates == ()
    g = find_gaps(col([1, 1, 2, 4]))
    assert [v for v, _ in g.duplicates] == [1] and g.gaps == ((2, 1),)
    assert [a.row for a in g.duplicates[0][1]] == [1, 2]


def test_gaps_irregular_steps_and_dates(backend):
    g = find_gaps(col([Decimal("1.0"), Decimal("1.5"), Decimal("2.5")]), step=Decimal("0.5"))
    assert g.gaps == ((Decimal("1.5"), 1),)
    g = find_gaps(col([10, 13, 20]), step=2)
    assert len(g.irregular) == 2
    d0 = date(2021, 3, 1)
    g = find_gaps(col([d0, d0 + timedelta(1), d0 + timedelta(4)]))
    assert g.gaps == ((d0 + timedelta(1), 2),)
    with pytest.raises(NonOrderableError):
        find_gaps(col(["a", "b"]))


@settings(max_examples=60)
@given(st.lists(st.integers(1, 100), max_size=80))
def test_gaps_match_complement_oracle(values):
    g = find_gaps(col(values))
    present = set(values)
    if values:
        missing = set(range(min(values), max(values) + 1)) - present
        got = set()
        for after, n in g.gaps:
            got |= set(range(int(after) + 1, int(after) + 1 + n))
        assert got == missing
    counts = Counter(values)
    assert {int(v): len(a) for v, a in g.duplicates} == {v: n for v, n in counts.items() if n > 1}


# Benford

def test_benford_expected_and_degenerate():
    assert round(BENFORD_EXPECTED[0], 5) == 0.30103
    assert math.isclose(sum(BENFORD_EXPECTED), 1.0)
    r = benford(col([9] * 1000))
    assert r.proportions[8] == 1.0 and r.flagged


def test_benford_uses_exact_decimal_digits(backend):
    r = benford(col([Decimal("0.00456"), Decimal("-7.1"), 0, None]), min_sample=1)
    assert r.observed[3] == 1 and r.observed[6] == 1 and r.n == 2


def test_benford_small_sample_is_never_flagged():
    r = benford(col([9] * 10), min_sample=100)
    assert r.insufficient and not r.flagged


def test_benford_requires_numbers():
    with pytest.raises(NotNumericError):
        benford(col(["x"]))


def test_benford_backends_agree():
    rng = np.random.default_rng(1)
    ints = rng.integers(-10**15, 10**15, 5000, dtype=np.int64)
    assert np.array_equal(_kernels.NUMPY.leading_digits(ints), _kernels.leading_digits(ints))
    assert benford_from_digits(_kernels.NUMPY.leading_digits(ints)).chi_square == \
        benford_from_digits(_kernels.leading_digits(ints)).chi_square


# suspicious values, dominance, outliers

def test_suspicious_examples(backend):
    assert len(suspicious_in_column(col([99999]))) == 1
    assert len(suspicious_in_column(col([date(2001, 1, 1)]))) == 1
    assert suspicious_in_column(col([12345])) == []
    assert len(suspicious_in_column(col([Decimal("99.00"), Decimal("9"), "TBD", datetime(1900, 1, 1)]))) == 3


def test_zero_outside_range_is_suspicious():
    spec = parse_schema("column v: type=number range=1..10\n").spec("v")
    assert len(suspicious_in_column(col([0, 5]), spec)) == 1


def test_find_suspicious_over_table():
    t = table(a=[99, 1], b=["x", "TBD"])
    assert sorted(f.addresses[0].a1 for f in find_suspicious(t)) == ["A1", "B2"]


def test_dominance_examples():
    f = dominance(col(["BROKEN_LEG"] * 80 + [f"c{i}" for i in range(20)]), 0.5)
    assert f is not None and f.observed == "BROKEN_LEG" and "share 0.80" in f.message
    assert dominance(col(list("abcd") * 25)) is None
    assert dominance(col(["y"] * 60 + ["n"] * 40)) is None


def test_dominance_domain_from_restricted_values():
    spec = parse_schema("column v: values=y|n|u\n").spec("v")
    assert dominance(col(["y"] * 60 + ["n"] * 40), spec=spec) is not None


def test_outlier_examples():
    f = outliers(col([1, 2, 3, 4, 100]))
    assert [x.observed for x in f] == [100]
    assert outliers(col([7] * 10)) == []
    assert outliers(col([1, 2, 3, 4])) == []
    with pytest.raises(TooFewValuesError):
        outliers(col([1, 2, 3]))


def percentile_oracle(xs, p):
    # type-7: h = (n - 1) p, interpolate between floor and ceil order statistics
    xs = sorted(xs)
    h = (len(xs) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return Fraction(xs[lo]) + (h - lo) * (Fraction(xs[hi]) - Fraction(xs[lo]))


@settings(max_examples=60)
@given(st.lists(st.integers(-1000, 1000), min_size=4, max_size=60))
def test_outliers_match_percentile_oracle(values):
    q1, q3 = quartiles(np.array(sorted(values), dtype=np.int64))
    assert q1 == percentile_oracle(values, Fraction(1, 4))
    assert q3 == percentile_oracle(values, Fraction(3, 4))
    iqr = q3 - q1
    lo, hi = q1 - Fraction(3, 2) * iqr, q3 + Fraction(3, 2) * iqr
    expected = [i + 1 for i, v in enumerate(values) if v < lo or v > hi]
    assert [f.addresses[0].row for f in outliers(col(values))] == expected
