"""Search for rounding schemes with few sizes and the smallest eps.

For fixed (eps, d, L) we look for sizes 1 - 2eps >= x_0 > ... > x_{d-1} = eps
(T = 1) with (1+eps) x_0 >= 1 - 2eps and (1+eps) x_{i+1} >= x_i, such that
every multiset of L+1 sizes either does not fit (sum > 1) or contains a pair
whose sum is another size. The discrete part (which equalities x_a + x_b = x_k
hold, which multisets are pushed above 1) is enumerated by depth-first
branch and bound; each node is a linear feasibility problem with strict
inequalities, solved as "maximise the common slack s" with HiGHS. A leaf's
point is then rationalised and checked exactly, so every returned scheme is
verified in rational arithmetic. The outer loop bisects on eps.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .scheme import RoundingScheme, support_bound, verify_scheme

log = logging.getLogger(__name__)

Triple = tuple[int, int, int]


class SearchLimit(RuntimeError):
    """The node budget of one feasibility test ran out."""


@dataclass
class _Model:
    eps: Fraction
    d: int
    L: int
    pin_bottom: bool

    def __post_init__(self):
        d, e = self.d, float(self.eps)
        rows, rhs = [], []

        def row(coefs, b):
            r = np.zeros(d + 1)
            for i, c in coefs:
                r[i] += c
            rows.append(r)
            rhs.append(b)

        row([(0, 1)], 1 - 2 * e)
        row([(0, -(1 + e))], -(1 - 2 * e))
        if not self.pin_bottom:
            row([(d - 1, 1)], e * (1 + e))
        for i in range(d - 1):
            row([(i, 1), (i + 1, -(1 + e))], 0)
            row([(i + 1, 1), (i, -1), (d, 1)], 0)  # strictly decreasing, margin s
        self.A_base = np.array(rows)
        self.b_base = np.array(rhs)
        self.clauses = np.array(list(itertools.combinations_with_replacement(range(d), self.L + 1)),
                                dtype=np.int64).reshape(-1, self.L + 1)
        self.pair_clauses: dict[tuple[int, int], np.ndarray] = {}
        pairs_of = []
        acc: dict[tuple[int, int], list[int]] = {}
        for ci, S in enumerate(self.clauses):
            cnt: dict[int, int] = {}
            for v in S:
                cnt[int(v)] = cnt.get(int(v), 0) + 1
            ps = [(a, b) for a in cnt for b in cnt if a < b or (a == b and cnt[a] >= 2)]
            pairs_of.append(sorted(ps))
            for p in ps:
                acc.setdefault(p, []).append(ci)
        self.pairs_of = pairs_of
        self.pair_clauses = {p: np.array(v, dtype=np.int64) for p, v in acc.items()}
        # number of branching options of a clause: targets k < a for each pair (a, b)
        self.n_options = np.array([sum(a for a, _ in ps) for ps in pairs_of], dtype=np.int64)

    def solve(self, Z: tuple[Triple, ...], covered: tuple[int, ...]):
        """Max-slack point for the node, or None if the strict system is infeasible."""
        d = self.d
        A = [self.A_base]
        b = [self.b_base]
        if covered:
            C = np.zeros((len(covered), d + 1))
            for r, ci in enumerate(covered):
                np.add.at(C[r], self.clauses[ci], -1.0)
            C[:, d] = 1.0
            A.append(C)
            b.append(np.full(len(covered), -1.0))
        eq_rows, eq_rhs = [], []
        if self.pin_bottom:
            r = np.zeros(d + 1)
            r[d - 1] = 1
            eq_rows.append(r)
            eq_rhs.append(float(self.eps))
        for a, bb, k in Z:
            r = np.zeros(d + 1)
            r[a] += 1
            r[bb] += 1
            r[k] -= 1
            eq_rows.append(r)
            eq_rhs.append(0.0)
        c = np.zeros(d + 1)
        c[d] = -1
        res = linprog(c, A_ub=np.vstack(A), b_ub=np.concatenate(b),
                      A_eq=np.array(eq_rows) if eq_rows else None,
                      b_eq=np.array(eq_rhs) if eq_rhs else None,
                      bounds=[(0, 1)] * d + [(-1, 1)], method="highs")
        if res.status != 0 or -res.fun <= 1e-9:
            return None
        return res.x[:d], -res.fun


def scheme_feasible(eps, d: int, L: int, *, pin_bottom: bool = True,
                    node_limit: int = 2_000_000) -> RoundingScheme | None:
    """A verified scheme with d sizes and support bound L for this eps, or None.

    With ``pin_bottom`` the smallest size is fixed to eps, so every job above
    eps T can be rounded down; otherwise it is only bounded by eps(1+eps).
    """
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 3):
        raise ValueError("eps must lie in (0, 1/3)")
    if d < 1 or L < 1:
        raise ValueError("need d >= 1 and L >= 1")
    model = _Model(eps, d, L, pin_bottom)
    n_clauses = len(model.clauses)
    stack: list[tuple[tuple[Triple, ...], tuple[int, ...]]] = [((), ())]
    seen = set()
    nodes = 0
    while stack:
        Z, covered = stack.pop()
        key = (frozenset(Z), frozenset(covered))
        if key in seen:
            continue
        seen.add(key)
        nodes += 1
        if nodes > node_limit:
            raise SearchLimit(f"more than {node_limit} nodes at eps={float(eps)}")
        sol = model.solve(Z, covered)
        if sol is None:
            continue
        x, s = sol
        blocked = np.zeros(n_clauses, dtype=bool)
        for a, b, _ in Z:
            blocked[model.pair_clauses.get((a, b), [])] = True
        if covered:
            blocked[list(covered)] = True
        sums = x[model.clauses].sum(axis=1)
        open_ = np.flatnonzero(~blocked & (sums <= 1 + s / 2))
        if open_.size == 0:
            scheme = _exact_witness(x, Z, eps, d, L, pin_bottom)
            if scheme is not None:
                log.debug("eps=%s feasible after %d nodes", eps, nodes)
                return scheme
            continue
        ci = int(open_[np.argmin(model.n_options[open_])])
        opts = []
        for a, b in model.pairs_of[ci]:
            for k in range(a):
                opts.append((abs(x[k] - x[a] - x[b]), (a, b, k)))
        opts.sort()
        children = [(Z + (t,), covered) for _, t in opts]
        children.append((Z, covered + (ci,)))
        stack.extend(reversed(children))
    log.debug("eps=%s infeasible after %d nodes", eps, nodes)
    return None


def _rref_solve(rows: list[list[Fraction]], rhs: list[Fraction], n: int):
    """Reduced row echelon form; returns (pivot columns, reduced rows, reduced rhs)."""
    M = [r[:] + [v] for r, v in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        f = M[r][col]
        M[r] = [v / f for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                g = M[i][col]
                M[i] = [a - g * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(M)):
        if M[i][n] != 0:
            return None
    return pivots, M[:r]


def _exact_witness(x: np.ndarray, Z, eps: Fraction, d: int, L: int, pin_bottom: bool):
    """Rational point near x satisfying the equalities of Z exactly, checked exactly."""
    rows, rhs = [], []
    if pin_bottom:
        r = [Fraction(0)] * d
        r[d - 1] = Fraction(1)
        rows.append(r)
        rhs.append(eps)
    for a, b, k in Z:
        r = [Fraction(0)] * d
        r[a] += 1
        r[b] += 1
        r[k] -= 1
        rows.append(r)
        rhs.append(Fraction(0))
    # non-strict constraints that are tight at x must hold with equality
    e = float(eps)
    tight = 1e-9
    if abs(x[0] - (1 - 2 * e)) < tight:
        rows.append([Fraction(1)] + [Fraction(0)] * (d - 1))
        rhs.append(1 - 2 * eps)
    if abs((1 + e) * x[0] - (1 - 2 * e)) < tight:
        rows.append([1 + eps] + [Fraction(0)] * (d - 1))
        rhs.append(1 - 2 * eps)
    if not pin_bottom and abs(x[-1] - e * (1 + e)) < tight:
        rows.append([Fraction(0)] * (d - 1) + [Fraction(1)])
        rhs.append(eps * (1 + eps))
    for i in range(d - 1):
        if abs(x[i] - (1 + e) * x[i + 1]) < tight:
            r = [Fraction(0)] * d
            r[i] = Fraction(1)
            r[i + 1] = -(1 + eps)
            rows.append(r)
            rhs.append(Fraction(0))
    red = _rref_solve(rows, rhs, d) if rows else ([], [])
    if red is None:
        return None
    pivots, M = red
    free = [i for i in range(d) if i not in pivots]
    for den in (10**6, 10**8, 10**10, 10**12, 10**14):
        val = [Fraction(0)] * d
        for i in free:
            val[i] = Fraction(float(x[i])).limit_denominator(den)
        for row, p in zip(M, pivots):
            val[p] = row[d] - sum(row[i] * val[i] for i in free)
        if any(a <= b for a, b in zip(val, val[1:])) or val[-1] <= 0:
            continue
        triples = [(a, b, k) for a in range(d) for b in range(a, d) for k in range(a)
                   if val[a] + val[b] == val[k]]
        bound = support_bound(val, triples, 1)
        if bound > L:
            continue
        scheme = RoundingScheme(tuple(val), tuple(triples), bound, eps, Fraction(1))
        if verify_scheme(scheme).ok:
            return scheme
    return None


def optimize_scheme(d: int, L: int, eps_lo=Fraction(1, 100), eps_hi=Fraction(1, 2), tol=1.5e-5, *,
                    pin_bottom: bool = True, node_limit: int = 2_000_000,
                    progress: Callable[[Fraction, bool], None] | None = None):
    """Bisect on eps for the smallest value admitting a scheme; returns (eps, scheme).

    The bracket is exact rational arithmetic and eps_hi itself is assumed
    feasible, as in plain bisection. Midpoints of 1/3 or more count as
    infeasible since the large range (eps, 1 - 2eps) is then empty. Raises
    ValueError when no midpoint succeeds.
    """
    lo = Fraction(str(eps_lo)) if isinstance(eps_lo, float) else Fraction(eps_lo)
    hi = Fraction(str(eps_hi)) if isinstance(eps_hi, float) else Fraction(eps_hi)
    tol = Fraction(str(tol)) if isinstance(tol, float) else Fraction(tol)
    if not 0 < lo < hi:
        raise ValueError("need 0 < eps_lo < eps_hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    best = None
    while hi - lo > tol:
        mid = (lo + hi) / 2
        w = None
        if mid < Fraction(1, 3):
            w = scheme_feasible(mid, d, L, pin_bottom=pin_bottom, node_limit=node_limit)
        if progress:
            progress(mid, w is not None)
        if w is not None:
            hi, best = mid, w
        else:
            lo = mid
    if best is None:
        raise ValueError(f"no scheme with d={d}, L={L} for any tested eps in [{float(eps_lo)}, {float(eps_hi)}]")
    return hi, best
