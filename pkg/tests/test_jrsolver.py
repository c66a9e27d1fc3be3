from fractions import Fraction

import numpy as np
import pytest

from eptas.jrsolver import HypercubeBox, ResourceError, brute_force_ip, side_length, solve_ip


def test_side_length():
    assert [side_length(t) for t in (1, 2, 3, 4, 5)] == [3, 7, 5, 9, 13]
    with pytest.raises(ValueError):
        side_length(0)


def test_box_point_counts():
    # radius (S + 1) / 2 with S = 5: five points around an integer, six otherwise
    r = Fraction(3)
    assert HypercubeBox.around([Fraction(4)], r).shape == (5,)
    assert HypercubeBox.around([Fraction(9, 2)], r).shape == (6,)
    assert HypercubeBox.around([Fraction(17, 4)], r).shape == (6,)
    b = HypercubeBox.around([Fraction(1)], r, floor=np.array([0]))
    assert b.lo.tolist() == [0] and b.hi.tolist() == [3]
    assert b.index([2]) == (2,) and b.index([5]) is None


def test_examples():
    sol = solve_ip([[1]], [3])
    assert sol is not None and sol.x.tolist() == [3]
    assert solve_ip([[2]], [3]) is None
    sol = solve_ip([[2, 1], [0, 1]], [3, 1])
    assert sol.x.tolist() == [1, 1]
    z = brute_force_ip([[1, -1]], [0], 4)
    assert z.x.tolist() == [0, 0]


def test_argument_checks():
    with pytest.raises(ValueError):
        solve_ip([[1]], [-1])
    with pytest.raises(ValueError):
        solve_ip([[1, -1]], [1])  # max_norm needed
    with pytest.raises(ValueError):
        solve_ip([[3]], [3], t=2)
    with pytest.raises(ValueError):
        solve_ip([[1]], [1, 1])


@pytest.mark.parametrize("method", ["fft", "sparse"])
@pytest.mark.parametrize("witness", ["store", "recompute"])
def test_modes_agree(method, witness):
    rng = np.random.default_rng(11)
    for _ in range(60):
        A = rng.integers(-2, 3, size=(2, 4))
        b = rng.integers(0, 8, size=2)
        # solve_ip searches up to 2^ceil(log2(max_norm)) columns: use a power of two
        ref = brute_force_ip(A, b, 16)
        got = solve_ip(A, b, max_norm=16, method=method, witness=witness)
        assert (got is None) == (ref is None)
        if got is not None:
            assert np.array_equal(A @ got.x, b) and (got.x >= 0).all()


def test_store_mode_keeps_parents():
    tables = []
    sol = solve_ip([[1, 2], [1, 0]], [5, 3], witness="store", tables=tables)
    assert sol is not None and np.array_equal(np.array([[1, 2], [1, 0]]) @ sol.x, [5, 3])
    assert len(tables) == 4  # K = ceil(log2 8) = 3, levels 0..3
    assert all(t.parent is not None for t in tables[:-1])
    # every marked point's parents re-sum to it
    for j in range(len(tables) - 1):
        t, nxt = tables[j], tables[j + 1]
        P = nxt.points()
        for flat in np.flatnonzero(t.mask.ravel()):
            a, c = t.parent[flat]
            pt = np.array(np.unravel_index(flat, t.box.shape)) + t.box.lo
            assert np.array_equal(P[a] + P[c], pt)


def test_level_count():
    tables = []
    solve_ip(np.eye(3, dtype=int), [5, 5, 5], tables=tables)
    assert len(tables) == 5  # max_norm 15 -> K = 4


def test_resource_cap():
    A = np.eye(4, dtype=int)
    with pytest.raises(ResourceError):
        solve_ip(A, [9, 9, 9, 9], max_volume=10)


def test_side_five_misses_a_solution_that_side_seven_finds():
    # columns of l1-norm 3 at most; the t - 3/2 bound is for set systems
    A = np.array([[1, -1, 0, 0, -1, -1], [-2, -2, 2, -1, -2, 0]])
    b = np.array([6, 6])
    ref = brute_force_ip(A, b, 16)
    assert ref is not None and np.array_equal(A @ ref.x, b)
    assert side_length(3) == 5
    assert solve_ip(A, b, max_norm=16) is None
    sol = solve_ip(A, b, max_norm=16, side=7)
    assert sol is not None and np.array_equal(A @ sol.x, b)
