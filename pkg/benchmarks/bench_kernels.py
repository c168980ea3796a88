"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

The first numba call (compilation or cache load) is timed separately and
excluded from the per-call figures. Both backends are checked for identical
output before timing.
"""

import argparse
import time

import numpy as np

from dqaudit import _kernels


def _best(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000, help="array length")
    ap.add_argument("--lcs", type=int, default=1500, help="sequence length for the LCS table")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.JIT is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    amounts = rng.integers(-10**12, 10**12, args.n, dtype=np.int64)
    scales = rng.integers(0, 4, args.n).astype(np.int16)
    keys = np.sort(rng.integers(0, args.n * 2, args.n, dtype=np.int64))
    a = rng.integers(0, 50, args.lcs, dtype=np.int64)
    b = a.copy()
    b[rng.choice(args.lcs, args.lcs // 10, replace=False)] = 99
    cases = {
        "leading_digits": (amounts,),
        "all_nines": (amounts, scales.astype(np.int64), 2),
        "classify_steps": (keys, np.int64(1)),
        "lcs_suffix": (a, b),
    }

    print(f"{'kernel':<16}{'numpy s':>10}{'numba s':>10}{'speedup':>9}{'first call s':>14}")
    for name, call_args in cases.items():
        np_fn, jit_fn = getattr(_kernels.NUMPY, name), getattr(_kernels.JIT, name)
        t0 = time.perf_counter()
        jit_out = jit_fn(*call_args)
        first = time.perf_counter() - t0
        if not _same(np_fn(*call_args), jit_out):
            raise SystemExit(f"{name}: backends disagree")
        t_np = _best(np_fn, call_args, args.repeat)
        t_jit = _best(jit_fn, call_args, args.repeat)
        print(f"{name:<16}{t_np:>10.4f}{t_jit:>10.4f}{t_np / t_jit:>8.1f}x{first:>14.3f}")


if __name__ == "__main__":
    main()
