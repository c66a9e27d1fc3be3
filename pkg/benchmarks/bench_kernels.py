"""Time the numba kernels against their plain numpy/python twins.

    python benchmarks/bench_kernels.py [--repeat N]

Each pair runs on the same inputs; results must agree before timings count.
The first numba call (compilation or cache load) is excluded.
"""

import argparse
import time

import numpy as np

from eptas import _kernels as K


def _timed(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        fresh = [a.copy() if isinstance(a, np.ndarray) else a for a in args]
        t = time.perf_counter()
        out = fn(*fresh)
        best = min(best, time.perf_counter() - t)
    return best, out, fresh


def _conv_case(rng):
    f = rng.integers(0, 5, size=(9, 9, 9)).astype(np.float64)
    g = rng.integers(0, 5, size=(9, 9, 9)).astype(np.float64)
    out_shape = tuple(a + b - 1 for a, b in zip(f.shape, g.shape))
    strides = np.cumprod((1,) + out_shape[:0:-1])[::-1]
    off_f = (np.argwhere(np.ones(f.shape, bool)) * strides).sum(axis=1).astype(np.int64)
    off_g = (np.argwhere(np.ones(g.shape, bool)) * strides).sum(axis=1).astype(np.int64)
    out = np.zeros(int(np.prod(out_shape)))
    return (f.ravel(), off_f, g.ravel(), off_g, out), lambda res, args: args[-1]


def _pair_case(rng):
    P = rng.integers(-6, 7, size=(600, 3)).astype(np.int64)
    lo = np.array([-8, -8, -8], dtype=np.int64)
    shape = np.array([17, 17, 17], dtype=np.int64)
    mask = np.zeros(int(np.prod(shape)), dtype=np.uint8)
    parent = np.zeros((0, 2), dtype=np.int64)
    return (P, lo, shape, mask, parent, False), lambda res, args: args[3]


def _ip_case(rng):
    A = rng.integers(-2, 3, size=(3, 6)).astype(np.int64)
    b = np.array([40, 40, 40], dtype=np.int64)  # usually infeasible: full enumeration
    return (A, b, 14), lambda res, args: res


def _bnb_case(rng):
    p = np.sort(rng.integers(1, 100, size=13))[::-1].astype(np.int64)
    return (p, 4, int(p.sum()), int(-(-p.sum() // 4))), lambda res, args: res


CASES = {
    "conv_accumulate": _conv_case,
    "pair_sums": _pair_case,
    "first_ip_solution": _ip_case,
    "bnb_makespan": _bnb_case,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9}")
    for name, make in CASES.items():
        call_args, result_of = make(rng)
        nb = getattr(K, f"{name}_nb")
        py = getattr(K, f"{name}_py")
        _timed(nb, call_args, 1)  # compile / load cache
        t_nb, r_nb, a_nb = _timed(nb, call_args, args.repeat)
        t_py, r_py, a_py = _timed(py, call_args, args.repeat)
        if not np.array_equal(np.asarray(result_of(r_nb, a_nb)), np.asarray(result_of(r_py, a_py))):
            raise SystemExit(f"{name}: numba and numpy results differ")
        print(f"{name:<20} {t_nb:12.5f} {t_py:12.5f} {t_py / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
