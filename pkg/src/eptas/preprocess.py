"""Job classes for a makespan guess T, huge-job pairing and small-job filling."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import Instance, Number


def check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    return eps


@dataclass(frozen=True)
class JobPartition:
    """small: p <= eps*T, huge: p >= (1-2eps)*T and p > T/2, large: everything between.

    The p > T/2 condition only bites for eps >= 1/4, where two jobs of size
    (1-2eps)*T could otherwise share a machine and the pairing would be wrong.
    """

    instance: Instance
    T: Fraction
    eps: Fraction
    small: tuple[int, ...]
    large: tuple[int, ...]
    huge: tuple[int, ...]


def classify(inst: Instance, T, eps) -> JobPartition:
    eps = check_eps(eps)
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    small, large, huge = [], [], []
    lo, hi = eps * T, (1 - 2 * eps) * T
    for j, p in enumerate(inst.p):
        if p <= lo:
            small.append(j)
        elif p >= hi and 2 * p > T:
            huge.append(j)
        else:
            large.append(j)
    return JobPartition(inst, T, eps, tuple(small), tuple(large), tuple(huge))


@dataclass(frozen=True)
class HugePairing:
    """psi maps each huge job to its partner large job (or None)."""

    psi: dict[int, int | None]
    consumed: frozenset[int]


def pair_huge(part: JobPartition) -> HugePairing:
    """Give each huge job, largest first, the largest unused large job that still fits."""
    p = part.instance.p
    order = lambda j: (-p[j], j)
    free = sorted(part.large, key=order)
    psi: dict[int, int | None] = {}
    for h in sorted(part.huge, key=order):
        partner = None
        for pos, j in enumerate(free):
            if p[h] + p[j] <= part.T:
                partner = free.pop(pos)
                break
        psi[h] = partner
    return HugePairing(psi, frozenset(v for v in psi.values() if v is not None))


def assign_small_greedy(loads: Sequence[Number], jobs: Iterable[tuple[int, Number]]):
    """Put each (job, p) on the currently least loaded machine.

    Returns (placement dict job -> machine, new loads). Ties go to the lower
    machine index.
    """
    heap = [(load, i) for i, load in enumerate(loads)]
    heapq.heapify(heap)
    placed = {}
    for j, p in jobs:
        load, i = heapq.heappop(heap)
        placed[j] = i
        heapq.heappush(heap, (load + p, i))
    new = list(loads)
    for load, i in heap:
        new[i] = load
    return placed, new
