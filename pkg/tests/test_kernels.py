"""The compiled and plain versions of every kernel agree."""

import numpy as np
import pytest

from eptas import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def test_pair_sums_and_find_split():
    rng = np.random.default_rng(1)
    P = np.unique(rng.integers(-3, 4, size=(40, 2)), axis=0).astype(np.int64)
    lo = np.array([-4, -4], dtype=np.int64)
    shape = np.array([9, 9], dtype=np.int64)
    outs = []
    for fn in (K.pair_sums_nb, K.pair_sums_py):
        mask = np.zeros(81, dtype=np.uint8)
        parent = np.full((81, 2), -1, dtype=np.int64)
        fn(P, lo, shape, mask, parent, True)
        outs.append((mask, parent))
    np.testing.assert_array_equal(outs[0][0], outs[1][0])
    np.testing.assert_array_equal(outs[0][1], outs[1][1])
    mask, parent = outs[0]
    for idx in np.flatnonzero(mask):
        a, b = parent[idx]
        assert np.array_equal(np.unravel_index(idx, (9, 9)) + lo, P[a] + P[b])
    # a point present in P splits as P[a] + (w - P[a]) with both parts in P
    small = np.zeros(81, dtype=np.uint8)
    for p in P:
        if (np.abs(p) <= 4).all():
            small[np.ravel_multi_index(tuple(p - lo), (9, 9))] = 1
    w = P[0] + P[1]
    a1 = K.find_split_nb(P, w, lo, shape, small)
    a2 = K.find_split_py(P, w, lo, shape, small)
    assert a1 == a2 >= 0
    assert np.array_equal(P[a1] + (w - P[a1]), w)


def test_first_ip_solution():
    rng = np.random.default_rng(2)
    for _ in range(30):
        A = rng.integers(-2, 3, size=(2, 4)).astype(np.int64)
        b = rng.integers(0, 6, size=2).astype(np.int64)
        x1 = K.first_ip_solution_nb(A, b, 8)
        x2 = K.first_ip_solution_py(A, b, 8)
        assert np.array_equal(x1, x2)
        if x1[0] >= 0:
            assert np.array_equal(A @ x1, b)


def test_bnb_makespan():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = np.sort(rng.integers(1, 30, size=9))[::-1].astype(np.int64)
        m = int(rng.integers(2, 4))
        ub, lb = int(p.sum()), int(-(-p.sum() // m))
        assert K.bnb_makespan_nb(p, m, ub, lb) == K.bnb_makespan_py(p, m, ub, lb)


def test_conv_accumulate():
    f = np.array([1.0, 2.0, 3.0])
    g = np.array([4.0, 5.0])
    off = np.array([0, 1, 2], dtype=np.int64)
    off_g = np.array([0, 1], dtype=np.int64)
    a = np.zeros(4)
    b = np.zeros(4)
    K.conv_accumulate_nb(f, off, g, off_g, a)
    K.conv_accumulate_py(f, off, g, off_g, b)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, [4, 13, 22, 15])


def test_dispatch_follows_flag():
    assert (K.bnb_makespan is K.bnb_makespan_nb) == K.USE_NUMBA
