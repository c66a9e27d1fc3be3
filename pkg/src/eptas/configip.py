"""Configuration IPs over rounded sizes and the moves between them.

The compressed system keeps only configurations without a reducible pair
(by default) and adds one reduction column per triple (i1, i2, i): it supplies
one unit of each source size and consumes one unit of the merged size i. A
solution of the compressed system is turned back into a plain configuration
multiset by ``expand_solution``; ``reduce_solution`` goes the other way.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .instance import Schedule
from .preprocess import HugePairing, JobPartition, assign_small_greedy
from .rounding.scheme import (RoundedInstance, RoundingScheme, Triple, irreducible_configs,
                              iter_configs, reducing_triple)

Config = tuple[int, ...]


@lru_cache(maxsize=64)
def _capped_configs(key, cap):
    sizes, _ = key
    return tuple(sorted(iter_configs(sizes, 1, cap)))


def enumerate_configs(scheme: RoundingScheme, T=None, support_cap: int | None = None) -> list[Config]:
    """All configurations for capacity T (default: the scheme's), optionally with at most
    ``support_cap`` items, in lexicographic order of the count vectors."""
    if T is not None:
        scheme = scheme.scaled(T)
    return list(_capped_configs(scheme.key(), support_cap))


def reduced_configs(scheme: RoundingScheme) -> list[Config]:
    """Configurations without a reducible pair, lexicographic order."""
    return sorted(irreducible_configs(scheme.sizes, scheme.triples, scheme.T))


@dataclass(frozen=True)
class Column:
    kind: str  # "config" | "reduction" | "surplus" | "machine"
    vector: tuple[int, ...]
    config: Config | None = None
    triple: Triple | None = None


def reduction_vector(triple: Triple, d: int) -> list[int]:
    a, b, k = triple
    v = [0] * d
    v[a] += 1
    v[b] += 1
    v[k] -= 1
    return v


@dataclass(frozen=True)
class ReducedIP:
    """Equality system A x = b over size rows plus one machine row (last)."""

    scheme: RoundingScheme
    rows: tuple[int, ...]
    columns: tuple[Column, ...]
    A: np.ndarray
    b: np.ndarray
    histogram: tuple[int, ...]
    m_effective: int
    max_norm: int
    config_index: dict[Config, int] = field(compare=False, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def count(self, kind: str) -> int:
        return sum(1 for c in self.columns if c.kind == kind)

    def dump(self) -> str:
        """Plain text matrix: one line per column with its tag."""
        r, n = self.A.shape
        head = " ".join(f"size{i}" for i in self.rows) + " machine"
        out = [f"# reduced IP rows={r} cols={n} max_norm={self.max_norm}",
               f"rows {head}",
               "rhs " + " ".join(str(v) for v in self.b)]
        for j, col in enumerate(self.columns):
            tag = col.kind
            if col.triple is not None:
                tag += " " + ",".join(map(str, col.triple))
            out.append(f"col {j} {tag} : " + " ".join(str(v) for v in self.A[:, j]))
        return "\n".join(out) + "\n"


def active_rows(scheme: RoundingScheme, histogram) -> tuple[int, ...]:
    """Sizes with demand, closed under merging (targets of triples with both sources active)."""
    act = {i for i, v in enumerate(histogram) if v > 0}
    grown = True
    while grown:
        grown = False
        for a, b, k in scheme.triples:
            if a in act and b in act and k not in act:
                act.add(k)
                grown = True
    return tuple(sorted(act))


def build_reduced_ip(scheme: RoundingScheme, rounded: RoundedInstance, *,
                     family: str = "irreducible", active_only: bool = False,
                     surplus: bool = True) -> ReducedIP:
    """Compressed configuration IP for the rounded instance.

    ``family`` picks the configuration columns: "irreducible" keeps the
    configurations without a reducible pair, "support" keeps every
    configuration with at most L items. With ``active_only`` the rows are
    limited to sizes that carry demand (closed under merging); dropping the
    other rows does not change feasibility. ``surplus=False`` leaves out the
    surplus columns, asking for exact coverage; that is feasible whenever the
    covering version is, because dropping items from a configuration keeps it
    a configuration without reducible pairs.
    """
    d = scheme.d
    if len(rounded.histogram) != d:
        raise ValueError("histogram length does not match the scheme")
    if family == "irreducible":
        configs = reduced_configs(scheme)
    elif family == "support":
        configs = enumerate_configs(scheme, support_cap=scheme.L)
    else:
        raise ValueError(f"unknown configuration family {family!r}")
    rows = active_rows(scheme, rounded.histogram) if active_only else tuple(range(d))
    inside = set(rows)
    outside = [i for i in range(d) if i not in inside]
    cols: list[Column] = []
    for c in configs:
        if any(c[i] for i in outside):
            continue
        cols.append(Column("config", tuple(c[i] for i in rows) + (1,), config=c))
    for t in scheme.triples:
        if all(i in inside for i in t):
            v = reduction_vector(t, d)
            cols.append(Column("reduction", tuple(v[i] for i in rows) + (0,), triple=t))
    if surplus:
        for pos, i in enumerate(rows):
            v = [0] * (len(rows) + 1)
            v[pos] = -1
            cols.append(Column("surplus", tuple(v)))
    cols.append(Column("machine", (0,) * len(rows) + (1,)))
    A = np.array([c.vector for c in cols], dtype=np.int64).T.reshape(len(rows) + 1, len(cols))
    b = np.array([rounded.histogram[i] for i in rows] + [rounded.m_effective], dtype=np.int64)
    n_large = sum(rounded.histogram)
    index = {c.config: j for j, c in enumerate(cols) if c.kind == "config"}
    # configs + machine slack = m_eff and at most one reduction per job suffice
    max_norm = max(1, rounded.m_effective + n_large)
    return ReducedIP(scheme, rows, tuple(cols), A, b, tuple(rounded.histogram),
                     rounded.m_effective, max_norm, index)


@dataclass(frozen=True)
class IPSolution:
    x: np.ndarray
    feasible: bool = True

    def support(self) -> dict[int, int]:
        return {int(j): int(v) for j, v in enumerate(self.x) if v}


def coverage(configs: Mapping[Config, int], d: int) -> list[int]:
    cov = [0] * d
    for c, k in configs.items():
        for i in range(d):
            cov[i] += k * c[i]
    return cov


def check_conf_solution(scheme: RoundingScheme, configs: Mapping[Config, int],
                        histogram, m: int) -> None:
    """Raise ValueError unless ``configs`` is a feasible plain configuration solution."""
    d = scheme.d
    for c, k in configs.items():
        if k < 0:
            raise ValueError("negative multiplicity")
        if k and sum(c[i] * scheme.sizes[i] for i in range(d)) > scheme.T:
            raise ValueError(f"{c} exceeds the capacity")
    if sum(configs.values()) > m:
        raise ValueError(f"uses {sum(configs.values())} machines, only {m} available")
    cov = coverage(configs, d)
    for i in range(d):
        if cov[i] < histogram[i]:
            raise ValueError(f"size {i} covered {cov[i]} times, demand {histogram[i]}")


def reduce_solution(ip: ReducedIP, configs: Mapping[Config, int]) -> IPSolution:
    """Rewrite a plain configuration solution into a solution of ``ip``.

    Slots of sizes that are not rows of ``ip`` carry no demand and are
    dropped first; without surplus columns, extra slots beyond the demand are
    dropped too. Then every configuration outside the column set is split
    repeatedly: a reducible pair (i1, i2) is replaced by one slot of the
    merged size i, and the reduction column (i1, i2, i) is used once. Each
    split removes exactly one item.
    """
    scheme = ip.scheme
    check_conf_solution(scheme, configs, ip.histogram, ip.m_effective)
    copies = _trim(ip, configs)
    x = np.zeros(len(ip.columns), dtype=np.int64)
    red_col = {c.triple: j for j, c in enumerate(ip.columns) if c.kind == "reduction"}
    for c in copies:
        if not any(c):
            continue
        while c not in ip.config_index:
            t = reducing_triple(c, scheme.triples)
            if t is None:
                raise ValueError(f"configuration {c} has no reducible pair and no column")
            a, b, i = t
            nc = list(c)
            nc[a] -= 1
            nc[b] -= 1
            nc[i] += 1
            c = tuple(nc)
            x[red_col[t]] += 1
        x[ip.config_index[c]] += 1
    resid = ip.b - ip.A @ x
    # surplus columns carry -1 on their row; the machine slack +1 on the last row
    for j, col in enumerate(ip.columns):
        if col.kind == "surplus":
            x[j] = -resid[col.vector.index(-1)]
        elif col.kind == "machine":
            x[j] = resid[-1]
    if (x < 0).any() or not np.array_equal(ip.A @ x, ip.b):
        raise RuntimeError("reduction produced an inconsistent solution")
    return IPSolution(x)


def _trim(ip: ReducedIP, configs: Mapping[Config, int]) -> list[Config]:
    """One entry per machine, restricted to the rows of ``ip`` (and to the demand
    when the system has no surplus columns)."""
    rows = set(ip.rows)
    copies = [[v if i in rows else 0 for i, v in enumerate(c)]
              for c in sorted(configs) for _ in range(configs[c])]
    if not any(col.kind == "surplus" for col in ip.columns):
        cov = coverage(Counter(tuple(c) for c in copies), ip.scheme.d)
        extra = [have - need for have, need in zip(cov, ip.histogram)]
        for i, e in enumerate(extra):
            for c in copies:
                if e <= 0:
                    break
                take = min(e, c[i])
                c[i] -= take
                e -= take
    return [tuple(c) for c in copies]


def expand_solution(ip: ReducedIP, sol: IPSolution) -> Counter:
    """Turn a solution of ``ip`` into a plain configuration multiset.

    Reduction columns are undone from the largest merged size down: each use
    of (i1, i2, i) takes a configuration holding a slot of size i and replaces
    that slot by one slot of i1 and one of i2. The merged slot can only come
    from a configuration or from a reduction into a larger size, and those are
    undone earlier, so a partner configuration always exists.
    """
    x = np.asarray(sol.x)
    if not np.array_equal(ip.A @ x, ip.b) or (x < 0).any():
        raise ValueError("not a solution of this system")
    configs: Counter = Counter()
    pending: list[tuple[Triple, int]] = []
    for j, col in enumerate(ip.columns):
        if x[j] <= 0:
            continue
        if col.kind == "config":
            configs[col.config] += int(x[j])
        elif col.kind == "reduction":
            pending.append((col.triple, int(x[j])))
    pending.sort(key=lambda tk: (tk[0][2], tk[0]))
    for (a, b, i), k in pending:
        for _ in range(k):
            partner = next((c for c in sorted(configs) if configs[c] > 0 and c[i] >= 1), None)
            if partner is None:
                raise RuntimeError(f"no configuration holds a slot of size {i} for reduction {(a, b, i)}")
            nc = list(partner)
            nc[i] -= 1
            nc[a] += 1
            nc[b] += 1
            configs[partner] -= 1
            if configs[partner] == 0:
                del configs[partner]
            configs[tuple(nc)] += 1
    return configs


def schedule_from_configs(configs: Mapping[Config, int] | Iterable[Config], rounded: RoundedInstance,
                          pairing: HugePairing, part: JobPartition) -> Schedule:
    """Concrete schedule: huge jobs (with partners), one machine per configuration,
    then small jobs greedily onto the least loaded machine."""
    inst = part.instance
    if isinstance(configs, Mapping):
        machines_cfg = [c for c in sorted(configs) for _ in range(configs[c])]
    else:
        machines_cfg = list(configs)
    n_huge = len(part.huge)
    if n_huge + len(machines_cfg) > inst.m:
        raise ValueError("configuration solution needs more machines than available")
    queues = rounded.jobs_by_size()
    machines: list[list[int]] = [[] for _ in range(inst.m)]
    order = sorted(part.huge, key=lambda j: (-inst.p[j], j))
    for i, h in enumerate(order):
        machines[i].append(h)
        if pairing.psi.get(h) is not None:
            machines[i].append(pairing.psi[h])
    for pos, c in enumerate(machines_cfg):
        mach = machines[n_huge + pos]
        for s, k in enumerate(c):
            take = queues[s][:k]
            del queues[s][:k]
            mach.extend(take)
    left = [j for q in queues for j in q]
    if left:
        raise ValueError(f"configurations do not cover jobs {left}")
    loads = [sum((inst.p[j] for j in mach), 0) for mach in machines]
    placed, _ = assign_small_greedy(loads, ((j, inst.p[j]) for j in part.small))
    for j, i in placed.items():
        machines[i].append(j)
    return Schedule.from_machines(inst, machines)
