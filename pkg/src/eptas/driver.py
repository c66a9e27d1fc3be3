"""Dual-approximation search for the makespan, exact oracle and benchmark runs."""

from __future__ import annotations

import csv
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .baselines import djms, lpt, multifit
from .configip import build_reduced_ip, expand_solution, schedule_from_configs
from .instance import ClassSpec, Instance, Schedule, as_rational, generate_class, lower_bound
from .jrsolver import ResourceError, solve_ip
from .preprocess import check_eps, classify, pair_huge
from .rounding.scheme import RoundedInstance, RoundingScheme, round_jobs, standard_scheme

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LrtpConfig:
    """eps: precision; eps_prime: stop when R <= (1 + eps_prime) L.

    ``scheme`` is None for the standard boundary grid, otherwise a rounding
    scheme for this eps (any T; it is rescaled). ``max_volume`` caps the
    lattice box of the IP solver and ``time_limit`` the wall time of one
    search, both raising ResourceError when exceeded.
    """

    eps: Fraction = Fraction(1, 4)
    eps_prime: Fraction = Fraction(1, 10_000)
    scheme: RoundingScheme | None = None
    max_volume: int | None = 50_000_000
    time_limit: float | None = None
    side: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "eps", check_eps(self.eps))
        ep = Fraction(self.eps_prime)
        if ep <= 0:
            raise ValueError("eps_prime must be positive")
        object.__setattr__(self, "eps_prime", ep)
        if self.scheme is not None and self.scheme.eps is not None and self.scheme.eps != self.eps:
            raise ValueError(f"scheme was built for eps={self.scheme.eps}, not {self.eps}")

    def base_scheme(self) -> RoundingScheme:
        """The rounding scheme normalised to T = 1."""
        if self.scheme is None:
            return _standard(self.eps)
        return self.scheme.scaled(1)


@lru_cache(maxsize=32)
def _standard(eps: Fraction) -> RoundingScheme:
    return standard_scheme(eps, 1)


@lru_cache(maxsize=8192)
def _solve_rounded(base: RoundingScheme, histogram: tuple[int, ...], m_eff: int,
                   max_volume: int | None, side: int | None):
    """Configurations (one per used machine) covering the histogram, or None."""
    ip = build_reduced_ip(base, RoundedInstance(histogram, {}, m_eff), active_only=True, surplus=False)
    sol = solve_ip(ip.A, ip.b, max_norm=ip.max_norm, max_volume=max_volume, side=side)
    if sol is None:
        return None
    return tuple(sorted(expand_solution(ip, sol).elements()))


def feasible_schedule(inst: Instance, T, cfg: LrtpConfig) -> Schedule | None:
    """A schedule with makespan <= (1 + eps) T, or None when T is too small.

    Huge jobs get their own machine (with at most one partner), the remaining
    large jobs are rounded and packed through the compressed configuration
    IP, and small jobs fill up greedily.
    """
    T = Fraction(T)
    eps = cfg.eps
    part = classify(inst, T, eps)
    if len(part.huge) > inst.m:
        return None
    pairing = pair_huge(part)
    rest = [j for j in part.large if j not in pairing.consumed]
    m_eff = inst.m - len(part.huge)
    base = cfg.base_scheme()
    if rest:
        if m_eff == 0:
            return None
        rounded = round_jobs(((j, Fraction(inst.p[j]) / T) for j in rest), base, m_eff)
        configs = _solve_rounded(base, rounded.histogram, m_eff, cfg.max_volume, cfg.side)
        if configs is None:
            return None
    else:
        rounded = RoundedInstance((0,) * base.d, {}, m_eff)
        configs = ()
    sched = schedule_from_configs(list(configs), rounded, pairing, part)
    if sched.makespan > (1 + eps) * T:
        return None
    return sched


def lrtp_solve(inst: Instance, cfg: LrtpConfig = LrtpConfig(), trace: list | None = None) -> Schedule:
    """Binary search on the guess T in [LB, 2 LB] until R <= (1 + eps') L.

    Returns the schedule of the smallest successful guess, so the makespan
    is at most (1 + eps)(1 + eps') OPT. ``trace`` collects (T, success) pairs.
    """
    start = time.monotonic()
    lb = Fraction(lower_bound(inst))
    lo, hi = lb, 2 * lb
    best: Schedule | None = None
    while (1 + cfg.eps_prime) * lo < hi:
        if cfg.time_limit is not None and time.monotonic() - start > cfg.time_limit:
            raise ResourceError(f"time limit of {cfg.time_limit}s exceeded")
        T = (lo + hi) / 2
        s = feasible_schedule(inst, T, cfg)
        if trace is not None:
            trace.append((T, s is not None))
        if s is not None:
            hi, best = T, s
        else:
            lo = T
    if best is None:
        best = feasible_schedule(inst, hi, cfg)
        if trace is not None:
            trace.append((hi, best is not None))
    if best is None:
        warnings.warn("no schedule found at 2*LB; returning the LPT schedule", RuntimeWarning)
        best = lpt(inst)
    return best


def solve_or_fallback(inst: Instance, cfg: LrtpConfig) -> tuple[Schedule, bool]:
    """lrtp_solve, or the best baseline when a resource cap is hit. Second value: fell back."""
    try:
        return lrtp_solve(inst, cfg), False
    except ResourceError as exc:
        warnings.warn(f"{exc}; returning the best baseline schedule", RuntimeWarning)
        cands = [lpt(inst), multifit(inst), djms(inst)]
        return min(cands, key=lambda s: s.makespan), True


def exact_opt(inst: Instance, max_jobs: int = 14) -> Fraction | int:
    """Optimal makespan by depth-first branch and bound."""
    if inst.n > max_jobs:
        raise ValueError(f"exact_opt handles at most {max_jobs} jobs, got {inst.n}")
    den = math.lcm(*(Fraction(v).denominator for v in inst.p))
    p = np.array(sorted((int(Fraction(v) * den) for v in inst.p), reverse=True), dtype=np.int64)
    upper = min(lpt(inst).makespan, multifit(inst).makespan)
    ub = int(Fraction(upper) * den)
    lb = math.ceil(Fraction(lower_bound(inst)) * den)
    m = min(inst.m, inst.n)
    best = _kernels.bnb_makespan(p, m, ub, lb)
    return as_rational(Fraction(int(best), den))


# --- benchmark ---------------------------------------------------------------

CSV_HEADER = ["family", "m", "n", "U", "better", "equal", "avg_quot", "avg_time"]


@dataclass
class BenchRow:
    family: str
    m: int
    n: int
    U: tuple[int, int]
    better: int
    equal: int
    avg_quot: float
    avg_time: float
    failures: int = 0


@dataclass
class InstanceResult:
    lrtp: Fraction
    lpt: Fraction
    multifit: Fraction
    djms: Fraction
    seconds: float
    failed: bool = False


def run_instance(inst: Instance, cfg: LrtpConfig) -> InstanceResult:
    t0 = time.perf_counter()
    failed = False
    try:
        lr = lrtp_solve(inst, cfg).makespan
    except ResourceError:
        lr, failed = None, True
    dt = time.perf_counter() - t0
    a, b, c = lpt(inst).makespan, multifit(inst).makespan, djms(inst).makespan
    if lr is None:
        lr = min(a, b, c)
    return InstanceResult(lr, a, b, c, dt, failed)


def summarize(spec: ClassSpec, results: Sequence[InstanceResult]) -> BenchRow:
    better = sum(1 for r in results if not r.failed and r.lrtp < min(r.lpt, r.multifit, r.djms))
    equal = sum(1 for r in results if not r.failed and r.lrtp == min(r.lpt, r.multifit, r.djms))
    denom = min(sum(r.lpt for r in results), sum(r.multifit for r in results), sum(r.djms for r in results))
    quot = float(Fraction(sum(r.lrtp for r in results)) / Fraction(denom)) if results else 1.0
    avg_time = sum(r.seconds for r in results) / len(results) if results else 0.0
    return BenchRow(spec.family, spec.m, spec.n, spec.U, better, equal, quot, avg_time,
                    sum(r.failed for r in results))


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("EPTAS_WORKERS", "1") or 1)
    return max(1, workers)


def bench_run(classes: Iterable[ClassSpec], cfg: LrtpConfig, out: str | Path | None = None,
              workers: int | None = None) -> list[BenchRow]:
    """Run LRTP and the three baselines on every instance of every class.

    Instances run in parallel when ``workers`` (default: EPTAS_WORKERS) is
    above one; rows keep the order of ``classes``.
    """
    workers = _worker_count(workers)
    rows = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for spec in classes:
            insts = generate_class(spec)
            if pool is None:
                results = [run_instance(i, cfg) for i in insts]
            else:
                results = list(pool.map(run_instance, insts, [cfg] * len(insts)))
            row = summarize(spec, results)
            if row.failures:
                log.warning("%s m=%d n=%d: %d instances hit resource limits", spec.family, spec.m,
                            spec.n, row.failures)
            rows.append(row)
    finally:
        if pool is not None:
            pool.shutdown()
    if out is not None:
        write_csv(rows, out)
    return rows


def write_csv(rows: Iterable[BenchRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.family, r.m, r.n, f"[{r.U[0]},{r.U[1]}]", r.better, r.equal,
                        f"{r.avg_quot:.2f}", f"{r.avg_time:.4f}"])
