"""Feasibility of {A x = b, x >= 0 integral} by doubling over right-hand sides.

Level K holds 0 and the single columns. Level j holds every point of a small
lattice box around b / 2^j that is a sum of two level-(j+1) points; the
sumset is a boolean self-convolution. A solution with at most 2^K columns
splits into two halves whose images stay within twice the hereditary
discrepancy of b / 2, which is what bounds the box. b is feasible iff it is
marked at level 0, and a witness is read off by splitting points level by
level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .configip import IPSolution
from .convolution import fast_length, fft_convolve


def side_length(t: int) -> int:
    """Lattice points per axis of the box for columns of l1-norm at most t.

    For t >= 3 the hereditary discrepancy is at most t - 3/2, giving
    4 herdisc - 1 = 4t - 7; for t = 1, 2 the plain bound herdisc < t gives 4t - 1.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    return 4 * t - 7 if t >= 3 else 4 * t - 1


@dataclass(frozen=True)
class HypercubeBox:
    """Lattice points p with |p_i - center_i| < radius on every axis.

    With radius (S + 1) / 2 an integral center gives exactly S points per
    axis; a fractional center can give S + 1.
    """

    center: tuple[Fraction, ...]
    radius: Fraction
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def around(cls, center: Sequence[Fraction], radius, floor=None, ceil=None) -> "HypercubeBox":
        radius = Fraction(radius)
        lo = np.array([math.floor(c - radius) + 1 for c in center], dtype=np.int64)
        hi = np.array([math.ceil(c + radius) - 1 for c in center], dtype=np.int64)
        if floor is not None:
            lo = np.maximum(lo, floor)
        if ceil is not None:
            hi = np.minimum(hi, ceil)
        return cls(tuple(center), radius, lo, hi)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.maximum(self.hi - self.lo + 1, 0))

    @property
    def empty(self) -> bool:
        return bool((self.hi < self.lo).any())

    @property
    def volume(self) -> int:
        return int(np.prod(self.shape, dtype=object))

    def index(self, point) -> tuple[int, ...] | None:
        off = np.asarray(point) - self.lo
        if (off < 0).any() or (off > self.hi - self.lo).any():
            return None
        return tuple(int(v) for v in off)


@dataclass
class LevelTable:
    level: int
    box: HypercubeBox
    mask: np.ndarray  # bool array of box.shape
    parent: np.ndarray | None = None  # flat index -> (a, b) into the next level's points

    def points(self) -> np.ndarray:
        return np.argwhere(self.mask).astype(np.int64) + self.box.lo

    @property
    def count(self) -> int:
        return int(self.mask.sum())


class ResourceError(RuntimeError):
    """A configured size limit was exceeded; distinct from infeasibility."""


def _sumset(src: LevelTable, box: HypercubeBox, method: str, store: bool):
    """(src + src) restricted to box, as a bool mask (and optional parents)."""
    shape = box.shape
    P = src.points()
    k = len(P)
    conv_shape = tuple(2 * s - 1 for s in src.mask.shape)
    fft_cost = 8 * math.prod(fast_length(s) for s in conv_shape) * max(1, math.log2(max(2, math.prod(conv_shape))))
    if method == "auto":
        method = "sparse" if store or k * (k + 1) // 2 <= fft_cost else "fft"
    if method == "sparse":
        flat = np.zeros(math.prod(shape), dtype=np.uint8)
        parent = np.full((flat.size, 2), -1, dtype=np.int64) if store else np.zeros((0, 2), dtype=np.int64)
        _kernels.pair_sums(P, box.lo, np.array(shape, dtype=np.int64), flat, parent, store)
        return flat.reshape(shape).astype(bool), (parent if store else None)
    conv = fft_convolve(src.mask.astype(np.float64), src.mask.astype(np.float64))
    hit = conv > 0.5
    out = np.zeros(shape, dtype=bool)
    # sum of offsets u, v in src maps to point 2*src.lo + (u + v)
    base = box.lo - 2 * src.box.lo
    dst, srcs = [], []
    for ax in range(len(shape)):
        s0 = max(0, int(base[ax]))
        s1 = min(conv_shape[ax], int(base[ax]) + shape[ax])
        if s1 <= s0:
            return out, None
        srcs.append(slice(s0, s1))
        dst.append(slice(s0 - int(base[ax]), s1 - int(base[ax])))
    out[tuple(dst)] = hit[tuple(srcs)]
    return out, None


def solve_ip(A, b, *, t: int | None = None, max_norm: int | None = None,
             side: int | None = None, method: str = "auto", witness: str = "recompute",
             max_volume: int | None = None, tables: list | None = None) -> IPSolution | None:
    """Decide A x = b over non-negative integers and return a witness.

    ``max_norm`` bounds the l1-norm of the solutions searched for; only
    solutions with at most 2^ceil(log2(max_norm)) columns are considered. It
    may be omitted when A has no negative entry (then sum(b) is used).
    ``side`` overrides the box side length, which defaults to
    ``side_length(t)``.
    ``method`` selects the sumset: "fft", "sparse" or "auto" by estimated
    cost. ``witness`` is "store" (parent pairs kept per level) or
    "recompute" (splits searched while unwinding). Pass a list as ``tables``
    to receive the level tables.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    b = np.asarray(b, dtype=np.int64).ravel()
    r, n = A.shape
    if b.shape[0] != r:
        raise ValueError(f"rhs has {b.shape[0]} entries, matrix has {r} rows")
    if (b < 0).any():
        raise ValueError("right-hand side must be non-negative")
    if witness not in ("store", "recompute"):
        raise ValueError(f"unknown witness mode {witness!r}")
    l1 = np.abs(A).sum(axis=0)
    tmax = int(l1.max()) if n else 1
    if t is None:
        t = max(tmax, 1)
    elif tmax > t:
        raise ValueError(f"column l1-norm {tmax} exceeds the declared bound t={t}")
    if max_norm is None:
        if (A < 0).any():
            raise ValueError("max_norm is required when A has negative entries")
        max_norm = int(b.sum())
    max_norm = max(int(max_norm), 1)
    K = max(0, math.ceil(math.log2(max_norm)))
    if side is None:
        side = side_length(t)
    radius = Fraction(side + 1, 2)

    # rows without negative entries keep every partial sum within [0, b_r]
    nonneg = (A >= 0).all(axis=1)
    nonpos = (A <= 0).all(axis=1)
    colmin = np.minimum(A.min(axis=1), 0) if n else np.zeros(r, dtype=np.int64)
    colmax = np.maximum(A.max(axis=1), 0) if n else np.zeros(r, dtype=np.int64)

    def box_at(j: int) -> HypercubeBox:
        cnt = 1 << (K - j)
        floor = cnt * colmin
        ceil = cnt * colmax
        floor = np.where(nonneg, np.maximum(floor, 0), floor)
        ceil = np.where(nonneg, np.minimum(ceil, b), ceil)
        floor = np.where(nonpos, np.maximum(floor, np.minimum(b, 0)), floor)
        center = [Fraction(int(v), 1 << j) for v in b]
        return HypercubeBox.around(center, radius, floor, ceil)

    levels: list[LevelTable | None] = [None] * (K + 1)
    box = box_at(K)
    if box.empty:
        return None
    if max_volume is not None and box.volume > max_volume:
        raise ResourceError(f"box volume {box.volume} exceeds limit {max_volume}")
    mask = np.zeros(box.shape, dtype=bool)
    for v in [np.zeros(r, dtype=np.int64)] + [A[:, c] for c in range(n)]:
        idx = box.index(v)
        if idx is not None:
            mask[idx] = True
    levels[K] = LevelTable(K, box, mask)
    for j in range(K - 1, -1, -1):
        box = box_at(j)
        if box.empty:
            return None
        if max_volume is not None and box.volume > max_volume:
            raise ResourceError(f"box volume {box.volume} exceeds limit {max_volume}")
        mask, parent = _sumset(levels[j + 1], box, method, witness == "store")
        levels[j] = LevelTable(j, box, mask, parent)
        if not mask.any():
            return None
    if tables is not None:
        tables.extend(levels)
    top = levels[0]
    idx = top.box.index(b)
    if idx is None or not top.mask[idx]:
        return None
    x = _unwind(A, levels, b)
    if (x < 0).any() or not np.array_equal(A @ x, b):
        raise RuntimeError("reconstructed witness does not satisfy A x = b")
    return IPSolution(x)


def _unwind(A: np.ndarray, levels: list[LevelTable], b: np.ndarray) -> np.ndarray:
    r, n = A.shape
    K = len(levels) - 1
    column_of = {}
    for c in range(n):
        column_of.setdefault(tuple(int(v) for v in A[:, c]), c)
    points: list[np.ndarray | None] = [None] * (K + 1)
    flat_masks: list[np.ndarray | None] = [None] * (K + 1)
    memo: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}

    def split(j: int, w: np.ndarray):
        lv = levels[j]
        nxt = levels[j + 1]
        P = points[j + 1]
        if P is None:
            P = points[j + 1] = nxt.points()
        if lv.parent is not None:
            flat = np.ravel_multi_index(tuple(w - lv.box.lo), lv.box.shape)
            a, c = lv.parent[flat]
            return P[a], P[c]
        if flat_masks[j + 1] is None:
            flat_masks[j + 1] = nxt.mask.ravel().astype(np.uint8)
        a = _kernels.find_split(P, w, nxt.box.lo, np.array(nxt.box.shape, dtype=np.int64), flat_masks[j + 1])
        if a < 0:
            raise RuntimeError(f"point {w.tolist()} at level {j} has no split")
        return P[a], w - P[a]

    def rec(j: int, w: np.ndarray) -> np.ndarray:
        key = (j, tuple(int(v) for v in w))
        if key in memo:
            return memo[key]
        x = np.zeros(n, dtype=np.int64)
        if j == len(levels) - 1:
            if any(key[1]):
                x[column_of[key[1]]] += 1
        else:
            u, v = split(j, w)
            x = rec(j + 1, u) + rec(j + 1, v)
        memo[key] = x
        return x

    return rec(0, b.astype(np.int64))


def brute_force_ip(A, b, l1_cap: int) -> IPSolution | None:
    """Exhaustive search over every x >= 0 with sum(x) <= l1_cap."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    b = np.asarray(b, dtype=np.int64).ravel()
    if A.shape[1] == 0:
        return IPSolution(np.zeros(0, dtype=np.int64)) if not b.any() else None
    x = _kernels.first_ip_solution(np.ascontiguousarray(A), b, int(l1_cap))
    if x[0] < 0:
        return None
    return IPSolution(np.asarray(x, dtype=np.int64))
