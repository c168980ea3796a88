"""Hot numeric loops, compiled with numba when available.

Each kernel has a numba ``@njit`` body and a pure-numpy twin with the same
contract. The numpy path is used when numba is not installed, when the
environment variable ``DQAUDIT_NO_JIT`` is set to a true value, or when an
input is an object array (Python ints too wide for int64).

Gap classification codes returned by :func:`classify_steps`:
``0`` duplicate, ``1`` sequential, ``2`` gap, ``3`` irregular.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

DUPLICATE, SEQUENTIAL, GAP, IRREGULAR = 0, 1, 2, 3

_NO_JIT_FLAG = "DQAUDIT_NO_JIT"


def _jit_disabled() -> bool:
    return os.environ.get(_NO_JIT_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


# ---------------------------------------------------------------------------
# numpy implementations

def _np_leading_digits(unscaled):
    x = np.abs(unscaled)
    if x.dtype == object:
        return np.array([int(str(v)[0]) for v in x.tolist()], dtype=np.int8)
    x = x.astype(np.int64, copy=True)
    while True:
        big = x >= 10
        if not big.any():
            break
        x[big] //= 10
    return x.astype(np.int8)


def _np_all_nines(unscaled, scale, min_len):
    x = np.abs(unscaled)
    if x.dtype == object:
        out = np.zeros(len(x), dtype=np.bool_)
        for i, (v, s) in enumerate(zip(x.tolist(), scale.tolist())):
            digits = str(v)
            while s > 0 and digits.endswith("0") and len(digits) > 1:
                digits, s = digits[:-1], s - 1
            out[i] = len(digits) >= min_len and set(digits) == {"9"}
        return out
    x = x.astype(np.int64, copy=True)
    s = scale.astype(np.int64, copy=True)
    while True:
        strip = (s > 0) & (x % 10 == 0) & (x > 0)
        if not strip.any():
            break
        x[strip] //= 10
        s[strip] -= 1
    if min_len > 18:
        return np.zeros(len(x), dtype=np.bool_)
    targets = np.array([10**k for k in range(max(min_len, 1), 19)], dtype=np.int64)
    return np.isin(x + 1, targets) & (x > 0)


def _np_classify_steps(values, step):
    diffs = np.diff(values)
    n = len(diffs)
    codes = np.full(n, IRREGULAR, dtype=np.int8)
    missing = np.zeros(n, dtype=np.int64)
    if n == 0:
        return codes, missing
    codes[diffs == 0] = DUPLICATE
    codes[diffs == step] = SEQUENTIAL
    gap = (diffs > step) & (diffs % step == 0)
    codes[gap] = GAP
    missing[gap] = (diffs[gap] // step - 1).astype(np.int64)
    return codes, missing


def _np_lcs_suffix(a, b):
    """Suffix LCS lengths: ``table[i, j] = LCS(a[i:], b[j:])``.

    Row recurrence: ``L[i, j] = max over j' >= j of c[j']`` where
    ``c[j'] = L[i+1, j'+1] + 1`` on a match and ``L[i+1, j']`` otherwise.
    """
    n, m = len(a), len(b)
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        below = table[i + 1]
        cand = np.where(b == a[i], below[1:] + 1, below[:-1])
        table[i, :m] = np.maximum.accumulate(cand[::-1])[::-1]
    return table


NUMPY = SimpleNamespace(
    leading_digits=_np_leading_digits,
    all_nines=_np_all_nines,
    classify_steps=_np_classify_steps,
    lcs_suffix=_np_lcs_suffix,
)


# ---------------------------------------------------------------------------
# numba implementations

def _build_jit():
    from numba import njit

    @njit(cache=True)
    def leading_digits(unscaled):
        out = np.empty(unscaled.shape[0], np.int8)
        for i in range(unscaled.shape[0]):
            x = abs(unscaled[i])
            while x >= 10:
                x //= 10
            out[i] = x
        return out

    @njit(cache=True)
    def all_nines(unscaled, scale, min_len):
        out = np.zeros(unscaled.shape[0], np.bool_)
        for i in range(unscaled.shape[0]):
            x = abs(unscaled[i])
            s = scale[i]
            while s > 0 and x > 0 and x % 10 == 0:
                x //= 10
                s -= 1
            if x == 0:
                continue
            length = 0
            ok = True
            while x > 0:
                if x % 10 != 9:
                    ok = False
                    break
                x //= 10
                length += 1
            out[i] = ok and length >= min_len
        return out

    @njit(cache=True)
    def classify_steps(values, step):
        n = max(values.shape[0] - 1, 0)
        codes = np.empty(n, np.int8)
        missing = np.zeros(n, np.int64)
        for i in range(n):
            d = values[i + 1] - values[i]
            if d == 0:
                codes[i] = 0
            elif d == step:
                codes[i] = 1
            elif d > step and d % step == 0:
                codes[i] = 2
                missing[i] = d // step - 1
            else:
                codes[i] = 3
        return codes, missing

    @njit(cache=True)
    def lcs_suffix(a, b):
        n = a.shape[0]
        m = b.shape[0]
        table = np.zeros((n + 1, m + 1), np.int32)
        for i in range(n - 1, -1, -1):
            for j in range(m - 1, -1, -1):
                if a[i] == b[j]:
                    table[i, j] = table[i + 1, j + 1] + 1
                elif table[i + 1, j] >= table[i, j + 1]:
                    table[i, j] = table[i + 1, j]
                else:
                    table[i, j] = table[i, j + 1]
        return table

    return SimpleNamespace(
        leading_digits=leading_digits,
        all_nines=all_nines,
        classify_steps=classify_steps,
        lcs_suffix=lcs_suffix,
    )


try:
    JIT = _build_jit()
except ImportError:  # numba missing
    JIT = None

BACKEND = "numpy" if JIT is None or _jit_disabled() else "numba"
_ACTIVE = NUMPY if BACKEND == "numpy" else JIT


def _int64(*arrays) -> bool:
    return all(a.dtype == np.int64 for a in arrays)


def leading_digits(unscaled: np.ndarray) -> np.ndarray:
    """First significant decimal digit of each |value|; 0 for zero."""
    impl = _ACTIVE if _int64(unscaled) else NUMPY
    return impl.leading_digits(unscaled)


def all_nines(unscaled: np.ndarray, scale: np.ndarray, min_len: int = 2) -> np.ndarray:
    """True where every digit is 9 and there are at least ``min_len`` of them.

    Trailing fractional zeros are ignored (``99.0`` counts as ``99``).
    """
    if _int64(unscaled):
        return _ACTIVE.all_nines(unscaled, scale.astype(np.int64), int(min_len))
    return NUMPY.all_nines(unscaled, scale, int(min_len))


def classify_steps(sorted_values: np.ndarray, step: int):
    """Classify successive differences of an ascending array."""
    if _int64(sorted_values) and step <= np.iinfo(np.int64).max:
        return _ACTIVE.classify_steps(sorted_values, np.int64(step))
    return NUMPY.classify_steps(sorted_values, step)


def lcs_suffix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _ACTIVE.lcs_suffix(a.astype(np.int64), b.astype(np.int64))
