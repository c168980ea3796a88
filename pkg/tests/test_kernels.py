import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqaudit import _kernels

pytestmark = pytest.mark.skipif(_kernels.JIT is None, reason="numba not installed")

int64s = st.lists(st.integers(-(2**63) + 1, 2**63 - 1), max_size=50)


def digits_oracle(values):
    return [int(str(abs(v))[0]) if v else 0 for v in values]


@settings(max_examples=80)
@given(int64s)
def test_leading_digits_agree(values):
    a = np.array(values, dtype=np.int64)
    expected = digits_oracle(values)
    assert _kernels.NUMPY.leading_digits(a).tolist() == expected
    assert _kernels.JIT.leading_digits(a).tolist() == expected


def nines_oracle(u, s, min_len):
    digits = str(abs(u))
    while s > 0 and digits.endswith("0") and len(digits) > 1:
        digits, s = digits[:-1], s - 1
    return u != 0 and len(digits) >= min_len and set(digits) == {"9"}


@settings(max_examples=80)
@given(st.lists(st.tuples(st.sampled_from([0, 9, 99, 990, 9999, 99990, 12, -999, 909, 10**18 - 1]),
                          st.integers(0, 3)), max_size=30), st.integers(1, 5))
def test_all_nines_agree(pairs, min_len):
    u = np.array([p[0] for p in pairs], dtype=np.int64)
    s = np.array([p[1] for p in pairs], dtype=np.int64)
    expected = [nines_oracle(int(a), int(b), min_len) for a, b in pairs]
    assert _kernels.NUMPY.all_nines(u, s, min_len).tolist() == expected
    assert _kernels.JIT.all_nines(u, s, min_len).tolist() == expected


@settings(max_examples=80)
@given(st.lists(st.integers(-1000, 1000), max_size=40), st.integers(1, 4))
def test_classify_steps_agree(values, step):
    a = np.sort(np.array(values, dtype=np.int64))
    c1, m1 = _kernels.NUMPY.classify_steps(a, step)
    c2, m2 = _kernels.JIT.classify_steps(a, np.int64(step))
    assert c1.tolist() == c2.tolist() and m1.tolist() == m2.tolist()
    for d, code, miss in zip(np.diff(a).tolist(), c1.tolist(), m1.tolist()):
        if d == 0:
            assert code == _kernels.DUPLICATE
        elif d == step:
            assert code == _kernels.SEQUENTIAL
        elif d % step == 0:
            assert code == _kernels.GAP and miss == d // step - 1
        else:
            assert code == _kernels.IRREGULAR


@settings(max_examples=60)
@given(st.lists(st.integers(0, 4), max_size=25), st.lists(st.integers(0, 4), max_size=25))
def test_lcs_tables_agree(a, b):
    x, y = np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
    assert np.array_equal(_kernels.NUMPY.lcs_suffix(x, y), _kernels.JIT.lcs_suffix(x, y))


def test_wide_values_use_object_path():
    big = np.array([10**30, -(7 * 10**25), 0], dtype=object)
    assert _kernels.leading_digits(big).tolist() == [1, 7, 0]
    assert _kernels.all_nines(np.array([10**20 - 1], dtype=object), np.array([0]), 2).tolist() == [True]


@pytest.mark.parametrize("flag,backend", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, backend):
    env = {**os.environ, "DQAUDIT_NO_JIT": flag}
    out = subprocess.run([sys.executable, "-c", "from dqaudit import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == backend
