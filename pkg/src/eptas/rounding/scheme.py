"""Rounding schemes: the geometric/arithmetic boundary grid and general schemes.

A scheme is a strictly decreasing list of sizes x_0 > ... > x_{d-1}, a set of
triples (i1, i2, i) with x_i1 + x_i2 = x_i, and a support bound L: every
multiset of sizes that fits into T and has more than L elements contains a
pair (i1, i2) of some triple. Everything is exact rational arithmetic.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class RoundingScheme:
    sizes: tuple[Fraction, ...]
    triples: tuple[Triple, ...]
    L: int
    eps: Fraction | None = None
    T: Fraction = Fraction(1)
    labels: tuple[tuple[int, int], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        sizes = tuple(Fraction(s) for s in self.sizes)
        if any(s <= 0 for s in sizes):
            raise ValueError("sizes must be positive")
        if any(a <= b for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly decreasing")
        triples = tuple(sorted({(int(a), int(b), int(k)) for a, b, k in self.triples}))
        for a, b, k in triples:
            if not (0 <= a <= b < len(sizes) and 0 <= k < len(sizes)):
                raise ValueError(f"bad triple {(a, b, k)}")
            if sizes[a] + sizes[b] != sizes[k]:
                raise ValueError(f"triple {(a, b, k)}: {sizes[a]} + {sizes[b]} != {sizes[k]}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "triples", triples)
        object.__setattr__(self, "T", Fraction(self.T))
        if self.eps is not None:
            object.__setattr__(self, "eps", Fraction(self.eps))

    @property
    def d(self) -> int:
        return len(self.sizes)

    def scaled(self, T) -> "RoundingScheme":
        """Same scheme for capacity T (sizes scale with T)."""
        T = Fraction(T)
        if T == self.T:
            return self
        f = T / self.T
        return RoundingScheme(tuple(s * f for s in self.sizes), self.triples, self.L,
                              self.eps, T, self.labels)

    def key(self) -> tuple:
        """Scale-free identity, used for caching derived tables."""
        return (tuple(s / self.T for s in self.sizes), self.triples)


def _ceil_log2(q: Fraction) -> int:
    """Smallest i >= 0 with 2^i >= q."""
    i = 0
    while (1 << i) < q:
        i += 1
    return i


def standard_scheme(eps, T=1) -> RoundingScheme:
    """Boundaries b_{i,k} = 2^i eps T + k eps^2 2^i T below (1 - 2 eps) T.

    Triples are the same-interval pairs of equal parity,
    b_{i,k1} + b_{i,k2} = b_{i+1,(k1+k2)/2}, whenever the target is a boundary.
    L is the exact largest size of a fitting multiset with no reducible pair.
    """
    eps, T = Fraction(eps), Fraction(T)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if T <= 0:
        raise ValueError("T must be positive")
    if eps >= Fraction(1, 3):
        return RoundingScheme((), (), 0, eps, T, ())
    top = (1 - 2 * eps) * T
    imax = _ceil_log2((1 - 2 * eps) / eps)
    kmax = math.ceil(1 / eps) - 1
    pts = {}
    for i in range(imax + 1):
        for k in range(kmax + 1):
            b = 2**i * eps * T + k * eps * eps * 2**i * T
            if b < top:
                pts[(i, k)] = b
    labels = sorted(pts, key=lambda ik: -pts[ik])
    index = {ik: n for n, ik in enumerate(labels)}
    sizes = tuple(pts[ik] for ik in labels)
    triples = []
    for (i, k1) in pts:
        for k2 in range(k1, kmax + 1, 2):
            if (i, k2) in pts and (i + 1, (k1 + k2) // 2) in pts:
                a, b = sorted((index[(i, k1)], index[(i, k2)]))
                triples.append((a, b, index[(i + 1, (k1 + k2) // 2)]))
    L = support_bound(sizes, triples, T)
    return RoundingScheme(sizes, tuple(triples), L, eps, T, tuple(labels))


def interval_bound(eps) -> int:
    """ceil(1/eps) * (ceil(log2((1-2eps)/eps)) + 1), the size-count bound."""
    eps = Fraction(eps)
    return math.ceil(1 / eps) * (_ceil_log2((1 - 2 * eps) / eps) + 1)


# --- configurations --------------------------------------------------------

def _integer_sizes(sizes: Sequence[Fraction], T: Fraction) -> tuple[list[int], int]:
    den = math.lcm(*(s.denominator for s in sizes), T.denominator) if sizes else 1
    return [int(s * den) for s in sizes], int(T * den)


def iter_configs(sizes: Sequence[Fraction], T, max_items: int | None = None) -> Iterator[tuple[int, ...]]:
    """All non-zero count vectors c with sum_i c_i x_i <= T, lexicographic order."""
    w, cap = _integer_sizes([Fraction(s) for s in sizes], Fraction(T))
    d = len(w)
    c = [0] * d
    limit = max_items if max_items is not None else cap

    def rec(i, room, items):
        if i == d:
            if items:
                yield tuple(c)
            return
        top = min(room // w[i], limit - items)
        for v in range(top + 1):
            c[i] = v
            yield from rec(i + 1, room - v * w[i], items + v)
        c[i] = 0

    yield from rec(0, cap, 0)


def reducible(c: Sequence[int], triples: Iterable[Triple]) -> bool:
    for a, b, _ in triples:
        if (c[a] >= 2) if a == b else (c[a] >= 1 and c[b] >= 1):
            return True
    return False


def reducing_triple(c: Sequence[int], triples: Iterable[Triple]) -> Triple | None:
    for t in triples:
        a, b, _ = t
        if (c[a] >= 2) if a == b else (c[a] >= 1 and c[b] >= 1):
            return t
    return None


@lru_cache(maxsize=64)
def _irreducible_cached(key) -> tuple[tuple[int, ...], ...]:
    sizes, triples = key
    return tuple(c for c in iter_configs(sizes, 1) if not reducible(c, triples))


def irreducible_configs(sizes: Sequence[Fraction], triples: Sequence[Triple], T) -> tuple[tuple[int, ...], ...]:
    T = Fraction(T)
    return _irreducible_cached((tuple(Fraction(s) / T for s in sizes), tuple(sorted(triples))))


def support_bound(sizes: Sequence[Fraction], triples: Sequence[Triple], T) -> int:
    """Largest element count of a fitting multiset without a reducible pair."""
    return max((sum(c) for c in irreducible_configs(sizes, triples, T)), default=0)


# --- rounding jobs ---------------------------------------------------------

@dataclass(frozen=True)
class RoundedInstance:
    histogram: tuple[int, ...]
    job_map: dict[int, int]
    m_effective: int = 0

    def jobs_by_size(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.histogram]
        for j in sorted(self.job_map):
            out[self.job_map[j]].append(j)
        return out


def round_jobs(jobs: Iterable[tuple[int, object]], scheme: RoundingScheme, m_effective: int = 0) -> RoundedInstance:
    """Map each job to the largest size not exceeding it (closed on the left)."""
    asc = list(reversed(scheme.sizes))
    d = scheme.d
    lo = hi = None
    if scheme.eps is not None:
        lo, hi = scheme.eps * scheme.T, (1 - 2 * scheme.eps) * scheme.T
    hist = [0] * d
    job_map = {}
    for j, p in jobs:
        p = Fraction(p)
        # jobs in [(1-2eps)T, T/2] count as large once eps >= 1/4
        if lo is not None and not (lo < p < hi or lo < p <= scheme.T / 2):
            raise ValueError(f"job {j} with p={p} lies outside the large range ({lo}, {hi})")
        pos = bisect.bisect_right(asc, p) - 1
        if pos < 0:
            raise ValueError(f"job {j} with p={p} is below the smallest size")
        idx = d - 1 - pos
        job_map[j] = idx
        hist[idx] += 1
    return RoundedInstance(tuple(hist), job_map, m_effective)


# --- verification ----------------------------------------------------------

@dataclass
class VerifyReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def verify_scheme(scheme: RoundingScheme, eps=None, T=None) -> VerifyReport:
    """Check ranges, gaps, triple identities and the support closure.

    Range and gap checks need eps; they are skipped when neither the argument
    nor the scheme provides one.
    """
    if T is not None:
        scheme = scheme.scaled(T)
    T = scheme.T
    eps = Fraction(eps) if eps is not None else scheme.eps
    x = scheme.sizes
    bad: list[str] = []
    if eps is not None and x:
        if x[0] > (1 - 2 * eps) * T:
            bad.append(f"range: x_0 = {x[0]} exceeds (1-2eps)T = {(1 - 2 * eps) * T}")
        if (1 + eps) * x[0] < (1 - 2 * eps) * T:
            bad.append(f"range: (1+eps) x_0 = {(1 + eps) * x[0]} below (1-2eps)T = {(1 - 2 * eps) * T}")
        if x[-1] > eps * (1 + eps) * T:
            bad.append(f"range: x_{len(x) - 1} = {x[-1]} exceeds eps(1+eps)T = {eps * (1 + eps) * T}")
        for i in range(len(x) - 1):
            if (1 + eps) * x[i + 1] < x[i]:
                bad.append(f"gap: (1+eps) x_{i + 1} < x_{i}")
    for a, b, k in scheme.triples:
        if x[a] + x[b] != x[k]:
            bad.append(f"triple {(a, b, k)} does not add up")
    worst = None
    for c in irreducible_configs(x, scheme.triples, T):
        if sum(c) > scheme.L and (worst is None or sum(c) > sum(worst)):
            worst = c
    if worst is not None:
        bad.append(f"closure: configuration {worst} has {sum(worst)} > L={scheme.L} items and no reducible pair")
    return VerifyReport(bad)


# --- scheme files ----------------------------------------------------------

def dump_scheme(scheme: RoundingScheme) -> str:
    lines = ["# rounding scheme: sizes in decreasing order, triples as i1 i2 i"]
    if scheme.eps is not None:
        lines.append(f"eps {scheme.eps}")
    lines.append(f"T {scheme.T}")
    lines.append(f"L {scheme.L}")
    lines.append("sizes " + " ".join(str(s) for s in scheme.sizes))
    for a, b, k in scheme.triples:
        lines.append(f"triple {a} {b} {k}")
    return "\n".join(lines) + "\n"


def load_scheme(text: str) -> RoundingScheme:
    eps, T, L, sizes, triples = None, Fraction(1), None, None, []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *vals = line.split()
        try:
            if key == "eps":
                eps = Fraction(vals[0])
            elif key == "T":
                T = Fraction(vals[0])
            elif key == "L":
                L = int(vals[0])
            elif key == "sizes":
                sizes = tuple(Fraction(v) for v in vals)
            elif key == "triple":
                a, b, k = (int(v) for v in vals)
                triples.append((min(a, b), max(a, b), k))
            else:
                raise ValueError(f"unknown key {key!r}")
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise ValueError(f"scheme file line {no}: {exc}") from None
    if sizes is None or L is None:
        raise ValueError("scheme file needs 'sizes' and 'L' lines")
    return RoundingScheme(sizes, tuple(triples), L, eps, T)
