"""Classical heuristics: LPT, first-fit decreasing, MULTIFIT and DJMS."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import Instance, Number, Schedule, as_rational


def _decreasing(p: Sequence[Number]) -> list[int]:
    # stable: equal times keep index order
    return sorted(range(len(p)), key=lambda j: -p[j])


def _lpt_assign(p: Sequence[Number], m: int) -> list[int]:
    heap = [(0, i) for i in range(m)]
    a = [0] * len(p)
    for j in _decreasing(p):
        load, i = heapq.heappop(heap)
        a[j] = i
        heapq.heappush(heap, (load + p[j], i))
    return a


def _ffd_assign(p: Sequence[Number], m: int, T) -> list[int] | None:
    loads = [0] * m
    a = [0] * len(p)
    for j in _decreasing(p):
        for i in range(m):
            if loads[i] + p[j] <= T:
                loads[i] += p[j]
                a[j] = i
                break
        else:
            return None
    return a


def lpt(inst: Instance) -> Schedule:
    """Longest processing time first onto the least loaded machine."""
    return Schedule(inst, tuple(_lpt_assign(inst.p, inst.m)))


def ffd_pack(inst: Instance, T) -> Schedule | None:
    """First-fit decreasing into m bins of capacity T, or None if a job fits nowhere."""
    if T <= 0:
        raise ValueError("capacity must be positive")
    a = _ffd_assign(inst.p, inst.m, as_rational(T))
    return None if a is None else Schedule(inst, tuple(a))


@dataclass(frozen=True)
class MultifitParams:
    rounds: int = 10

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


def multifit_lower(p: Sequence[Number], m: int) -> Number:
    """max(sum/m, p_1, p_m + p_{m+1}) with p sorted non-increasingly."""
    q = sorted(p, reverse=True)
    lb = max(Fraction(sum(q)) / m, q[0])
    if len(q) > m:
        lb = max(lb, q[m - 1] + q[m])
    return as_rational(lb)


def multifit(inst: Instance, params: MultifitParams = MultifitParams()) -> Schedule:
    """Binary search on the FFD capacity between the lower bound and LPT."""
    base = lpt(inst)
    u = base.makespan
    lo = multifit_lower(inst.p, inst.m)
    best: Schedule | None = None
    if inst.is_integral():
        lo_i, hi_i = math.ceil(lo), int(u)
        while lo_i <= hi_i:
            mid = (lo_i + hi_i) // 2
            s = ffd_pack(inst, mid)
            if s is not None:
                best, hi_i = s, mid - 1
            else:
                lo_i = mid + 1
    else:
        lo_q, hi_q = Fraction(lo), Fraction(u)
        for _ in range(params.rounds):
            mid = (lo_q + hi_q) / 2
            s = ffd_pack(inst, mid)
            if s is not None:
                best, hi_q = s, mid
            else:
                lo_q = mid
    if best is None or best.makespan > u:
        return base
    return best


def djms(inst: Instance, params: MultifitParams = MultifitParams()) -> Schedule:
    """Repeated MULTIFIT, closing machines that reach the current lower bound.

    Each round schedules the active jobs on the active machines, takes the
    least loaded machine whose load reaches the lower bound of the active
    part, and closes every machine with exactly that load together with its
    jobs. If no machine reaches the bound the most loaded one is closed, so
    every round closes at least one machine.
    """
    assign = [0] * inst.n
    jobs = list(range(inst.n))
    machines = list(range(inst.m))
    while machines:
        if not jobs:
            break
        k = len(machines)
        sub = Instance(k, tuple(inst.p[j] for j in jobs))
        s = multifit(sub, params)
        lb = multifit_lower(sub.p, k)
        loads = s.loads
        reaching = [i for i in range(k) if loads[i] >= lb]
        if reaching:
            level = min(loads[i] for i in reaching)
        else:
            level = max(loads)
        closed = {i for i in range(k) if loads[i] == level}
        if len(closed) == k or k == 1:
            closed = set(range(k))
        keep_jobs = []
        for local, j in enumerate(jobs):
            i = s.assignment[local]
            if i in closed:
                assign[j] = machines[i]
            else:
                keep_jobs.append(j)
        jobs = keep_jobs
        machines = [mach for i, mach in enumerate(machines) if i not in closed]
    return Schedule(inst, tuple(assign))
