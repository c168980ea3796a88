import random
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqaudit.compare import (align_by_sequence, diff_tables, extract_unique, lcs_pairs, match_merge,
                             set_membership)
from dqaudit.errors import DuplicateKeyError, ShapeMismatchError
from dqaudit.model import Table, sort_key

from conftest import D, col, table


def test_identity_and_single_delta():
    a = table("a", x=[1, 2, 100], y=["p", "q", "r"])
    assert diff_tables(a, a).empty
    b = table("b", x=[1, 2, D("100.5")], y=["p", "q", "r"])
    d = diff_tables(a, b)
    assert [(c.address.a1, c.delta) for c in d.cell_diffs] == [("A3", Decimal("0.5"))]


def test_text_and_type_changes():
    a = table("a", x=["Abc", 1, None])
    b = table("b", x=["abc  ", "1", 5])
    d = diff_tables(a, b)
    assert [c.address.row for c in d.cell_diffs] == [1, 2, 3]
    assert all(c.delta is None for c in d.cell_diffs)
    d = diff_tables(table("a", x=["A  b"]), table("b", x=["a b"]), text_insensitive=True)
    assert d.empty


def test_epsilon():
    a, b = table("a", x=[D("1.00")]), table("b", x=[D("1.01")])
    assert not diff_tables(a, b).empty
    assert diff_tables(a, b, epsilon=D("0.01")).empty


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        diff_tables(table("a", x=[1]), table("b", x=[1, 2]))


def perturbed_pair(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 12), rng.randint(1, 5)
    names = [f"c{j}" for j in range(cols)]
    base = [[Decimal(rng.randint(-999, 999)) / 10 for _ in range(cols)] for _ in range(rows)]
    k = rng.randint(0, min(10, rows * cols))
    cells = rng.sample([(i, j) for i in range(rows) for j in range(cols)], k)
    other = [r[:] for r in base]
    expected = {}
    for i, j in cells:
        delta = Decimal(rng.choice([-1, 1]) * rng.randint(1, 5000)) / 100
        other[i][j] += delta
        expected[(i + 1, j + 1)] = delta
    return Table.from_rows("L", names, base), Table.from_rows("R", names, other), expected


@pytest.mark.parametrize("seed", range(25))
def test_diff_reports_exact_perturbations(seed):
    left, right, expected = perturbed_pair(seed)
    d = diff_tables(left, right)
    assert {(c.address.row, c.address.column): c.delta for c in d.cell_diffs} == expected


def test_key_mode():
    a = table("a", k=[1, 2, 3], v=["x", "y", "z"])
    b = table("b", k=[3, 2, 4], v=["z", "Y", "w"])
    d = diff_tables(a, b, "key", key=["k"])
    assert [(c.address.a1, c.right_address.a1) for c in d.cell_diffs] == [("B2", "B2")]
    assert d.left_only_rows == (1,) and d.right_only_rows == (3,)
    with pytest.raises(DuplicateKeyError):
        diff_tables(table("a", k=[1, 1]), a, "key", key=["k"])


def test_key_mode_null_keys_are_unmatched():
    d = diff_tables(table("a", k=[1, None]), table("b", k=[None, 1]), "key", key=["k"])
    assert d.left_only_rows == (2,) and d.right_only_rows == (1,)


def test_sequence_alignment_examples():
    a = table("a", x=[1, 2, 3])
    b = table("b", x=[1, 9, 2, 3])
    al = align_by_sequence(a, b)
    assert len(al.pairs) == 3 and al.insertions == (1,) and al.deletions == ()
    assert align_by_sequence(a, table("b", x=[7, 8])).pairs == ()


def lcs_length(a, b):
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(m):
            dp[i + 1][j + 1] = dp[i][j] + 1 if a[i] == b[j] else max(dp[i][j + 1], dp[i + 1][j])
    return dp[n][m]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), max_size=60), st.lists(st.integers(0, 6), max_size=60))
def test_lcs_pairs_match_dp_oracle(a, b):
    pairs = lcs_pairs(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    assert len(pairs) == lcs_length(a, b)
    assert all(a[i] == b[j] for i, j in pairs)
    assert all(p[0] < q[0] and p[1] < q[1] for p, q in zip(pairs, pairs[1:]))


@pytest.mark.parametrize("seed", range(8))
def test_random_edit_alignment(seed, backend):
    rng = random.Random(seed)
    a = [rng.randint(0, 30) for _ in range(rng.randint(50, 200))]
    b = a[:]
    for _ in range(rng.randint(1, 20)):
        op = rng.random()
        pos = rng.randrange(len(b) + 1)
        if op < 0.4:
            b.insert(pos, rng.randint(0, 30))
        elif op < 0.8 and b:
            del b[min(pos, len(b) - 1)]
        elif b:
            b[min(pos, len(b) - 1)] = rng.randint(0, 30)
    al = align_by_sequence(table("a", x=a), table("b", x=b))
    assert len(al.pairs) == lcs_length(a, b)
    assert len(al.pairs) + len(al.deletions) == len(a)
    assert len(al.pairs) + len(al.insertions) == len(b)


def test_membership_examples():
    m = set_membership(col([1, 2, 3]), col([2, 3, 4]))
    assert (m.in_both, m.only_a, m.only_b) == ((2, 3), (1,), (4,))
    m = set_membership(col([1, 2]), col([2, 1]))
    assert m.only_a == m.only_b == ()


@given(st.lists(st.one_of(st.none(), st.integers(0, 9)), max_size=30),
       st.lists(st.one_of(st.none(), st.integers(0, 9)), max_size=30))
def test_membership_matches_scan(a, b):
    m = set_membership(col(a), col(b))
    both = [x for x in sorted({v for v in a if v is not None}) if any(x == y for y in b)]
    only_a = [x for x in sorted({v for v in a if v is not None}) if all(x != y for y in b)]
    only_b = [y for y in sorted({v for v in b if v is not None}) if all(y != x for x in a)]
    assert list(m.in_both) == both and list(m.only_a) == only_a and list(m.only_b) == only_b


def test_unique_examples():
    assert extract_unique(table(v=list("ABA"))).column("v").cells == ("A", "B")
    t = table(v=list("ABC"))
    assert list(extract_unique(t).rows()) == list(t.rows())


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from(["x", None])), max_size=40))
def test_unique_keeps_first_occurrence_order(rows):
    t = Table.from_rows("t", ["a", "b"], rows)
    seen, expected = set(), []
    for r in t.rows():
        key = tuple(sort_key(v) for v in r)
        if key not in seen:
            seen.add(key)
            expected.append(r)
    assert list(extract_unique(t).rows()) == expected


def test_merge_examples():
    left = table("l", k=[1, 2, 3], v=["a", "b", "c"])
    right = table("r", k=[2, 3, 4], w=["x", "y", "z"])
    assert match_merge(left, right, ["k"]).row_count == 2
    outer = match_merge(left, right, ["k"], "left")
    assert outer.row_count == 3 and outer.row(0) == (1, "a", None)
    assert match_merge(left, table("r", id=[3], w=["q"]), ["k"], right_key=["id"]).row(0) == (3, "c", "q")


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 99)), max_size=20),
       st.dictionaries(st.integers(0, 8), st.integers(0, 99), max_size=9),
       st.sampled_from(["inner", "left"]))
def test_merge_matches_nested_loop_join(left_rows, right_map, join):
    left = Table.from_rows("l", ["k", "v"], left_rows)
    right = Table.from_rows("r", ["k", "v"], sorted(right_map.items()))
    got = list(match_merge(left, right, ["k"], join).rows())
    expected = []
    for k, v in left_rows:
        matches = [(rk, rv) for rk, rv in sorted(right_map.items()) if rk == k]
        for _, rv in matches:
            expected.append((k, v, rv))
        if not matches and join == "left":
            expected.append((k, v, None))
    assert got == expected
    assert match_merge(left, right, ["k"], join).headers == ["k", "v", "v_right"]
