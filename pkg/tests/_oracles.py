"""Independent reference implementations used across the tests."""

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from eptas.rounding import RoundedInstance, RoundingScheme, support_bound


def random_scheme(rng, max_d: int = 4) -> RoundingScheme:
    """Sizes on a 1/20 grid in [3/20, 14/20], with every exact sum as a triple."""
    d = int(rng.integers(1, max_d + 1))
    grid = [Fraction(k, 20) for k in range(3, 15)]
    if d >= 3 and rng.random() < 0.6:
        # force a merge: two small sizes and their sum
        a, b = sorted(rng.choice(range(3, 8), size=2, replace=True).tolist())
        chosen = {Fraction(a, 20), Fraction(b, 20), Fraction(a + b, 20)}
        rest = [g for g in grid if g not in chosen]
        while len(chosen) < d:
            chosen.add(rest[int(rng.integers(len(rest)))])
    else:
        chosen = set(rng.choice(grid, size=d, replace=False).tolist())
    sizes = tuple(sorted(chosen, reverse=True))
    triples = tuple((a, b, k) for a in range(len(sizes)) for b in range(a, len(sizes))
                    for k in range(len(sizes)) if sizes[a] + sizes[b] == sizes[k])
    return RoundingScheme(sizes, triples, support_bound(sizes, triples, 1))


def random_rounded(rng, scheme, max_jobs: int = 7, max_m: int = 3) -> RoundedInstance:
    hist = [0] * scheme.d
    for _ in range(int(rng.integers(1, max_jobs + 1))):
        hist[int(rng.integers(scheme.d))] += 1
    return RoundedInstance(tuple(hist), {}, int(rng.integers(1, max_m + 1)))


def pack(items, m: int, cap):
    """Bins (lists of item indices) packing all items into m bins of capacity cap, or None."""
    den = math.lcm(*(Fraction(v).denominator for v in items), Fraction(cap).denominator)
    w = [int(Fraction(v) * den) for v in items]
    c = int(Fraction(cap) * den)
    order = sorted(range(len(w)), key=lambda i: -w[i])
    loads = [0] * m
    bins: list[list[int]] = [[] for _ in range(m)]

    def rec(pos):
        if pos == len(order):
            return True
        i = order[pos]
        tried = set()
        for b in range(m):
            if loads[b] in tried or loads[b] + w[i] > c:
                continue
            tried.add(loads[b])
            loads[b] += w[i]
            bins[b].append(i)
            if rec(pos + 1):
                return True
            loads[b] -= w[i]
            bins[b].pop()
        return False

    return [list(b) for b in bins] if rec(0) else None


def packing_configs(scheme, rounded):
    """Plain configuration solution from a brute-force packing, or None."""
    items = [i for i, k in enumerate(rounded.histogram) for _ in range(k)]
    bins = pack([scheme.sizes[i] for i in items], rounded.m_effective, scheme.T)
    if bins is None:
        return None
    out = Counter()
    for b in bins:
        if b:
            c = [0] * scheme.d
            for pos in b:
                c[items[pos]] += 1
            out[tuple(c)] += 1
    return out


def brute_makespan(p, m):
    """Optimal makespan by trying every assignment (tiny instances only)."""
    best = None
    for a in np.ndindex(*([m] * len(p))):
        loads = [0] * m
        for j, i in enumerate(a):
            loads[i] += p[j]
        v = max(loads)
        best = v if best is None or v < best else best
    return best
