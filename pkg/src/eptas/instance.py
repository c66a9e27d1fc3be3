"""Problem instances, schedules, text I/O and random instance families."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Number = int | Fraction


def as_rational(value) -> Number:
    """Exact rational for ints, Fractions and decimal strings; ints stay ints."""
    if isinstance(value, bool):
        raise TypeError("bool is not a processing time")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        value = repr(value)
    q = Fraction(value)
    return q.numerator if q.denominator == 1 else q


class ParseError(ValueError):
    """Malformed instance text; the message names the offending line."""


@dataclass(frozen=True)
class Instance:
    """m identical machines and n jobs with positive processing times p."""

    m: int
    p: tuple[Number, ...]

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"machine count must be a positive integer, got {self.m!r}")
        p = tuple(as_rational(v) for v in self.p)
        if not p:
            raise ValueError("an instance needs at least one job")
        if any(v <= 0 for v in p):
            raise ValueError("processing times must be positive")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def total(self) -> Number:
        return sum(self.p)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self.p)


@dataclass(frozen=True)
class Schedule:
    """Assignment of every job to a machine (0-based machine indices)."""

    instance: Instance
    assignment: tuple[int, ...]
    loads: tuple[Number, ...] = field(init=False, compare=False)

    def __post_init__(self):
        a = tuple(int(i) for i in self.assignment)
        inst = self.instance
        if len(a) != inst.n:
            raise ValueError(f"assignment covers {len(a)} jobs, instance has {inst.n}")
        loads = [0] * inst.m
        for j, i in enumerate(a):
            if not 0 <= i < inst.m:
                raise ValueError(f"job {j} assigned to machine {i} outside 0..{inst.m - 1}")
            loads[i] += inst.p[j]
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "loads", tuple(as_rational(v) for v in loads))

    @property
    def makespan(self) -> Number:
        return max(self.loads)

    @classmethod
    def from_machines(cls, instance: Instance, machines: Iterable[Iterable[int]]) -> "Schedule":
        """Build from per-machine job lists."""
        a = [-1] * instance.n
        for i, jobs in enumerate(machines):
            for j in jobs:
                if a[j] != -1:
                    raise ValueError(f"job {j} assigned twice")
                a[j] = i
        if -1 in a:
            raise ValueError(f"job {a.index(-1)} is unassigned")
        return cls(instance, tuple(a))

    def machines(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.instance.m)]
        for j, i in enumerate(self.assignment):
            out[i].append(j)
        return out


def parse_instance(text: str) -> Instance:
    """Read "m n" on the first line and n processing times on the second."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not lines[0]:
        raise ParseError("line 1: empty document, expected header 'm n'")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"line 1: expected header 'm n', got {lines[0]!r}")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"line 1: header values must be integers, got {lines[0]!r}") from None
    if m < 1 or n < 1:
        raise ParseError(f"line 1: m and n must be positive, got m={m} n={n}")
    body = lines[1] if len(lines) > 1 else ""
    if any(ln for ln in lines[2:]):
        raise ParseError("line 3: unexpected content after the job line")
    tokens = body.split()
    if len(tokens) != n:
        raise ParseError(f"line 2: expected {n} jobs, found {len(tokens)}")
    p = []
    for tok in tokens:
        try:
            v = as_rational(tok)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"line 2: cannot read processing time {tok!r}") from None
        if v <= 0:
            raise ParseError(f"line 2: processing time {tok!r} is not positive")
        p.append(v)
    return Instance(m, tuple(p))


def write_instance(inst: Instance) -> str:
    return f"{inst.m} {inst.n}\n" + " ".join(str(v) for v in inst.p)


def lower_bound(inst: Instance) -> Number:
    """max(p_max, sum(p)/m), a lower bound on the optimal makespan."""
    return as_rational(max(max(inst.p), Fraction(inst.total) / inst.m))


FAMILIES = ("E1", "E2", "E3", "E4", "BIG")


@dataclass(frozen=True)
class ClassSpec:
    """One instance class: n jobs uniform on [lo, hi] for m machines."""

    family: str
    m: int
    n: int
    lo: int
    hi: int
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.m < 1 or self.n < 1 or self.count < 0:
            raise ValueError("m, n must be positive and count non-negative")
        if self.lo < 1 or self.hi < self.lo:
            raise ValueError(f"bad interval [{self.lo},{self.hi}]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def U(self) -> tuple[int, int]:
        return (self.lo, self.hi)


def generate_class(spec: ClassSpec) -> list[Instance]:
    """Instances of a class, reproducible from ``spec.seed``.

    Instance k draws from numpy's PCG64 generator seeded with ``seed ^ k``, so
    any single instance can be regenerated on its own.
    """
    out = []
    for k in range(spec.count):
        rng = np.random.Generator(np.random.PCG64(spec.seed ^ k))
        p = rng.integers(spec.lo, spec.hi, size=spec.n, endpoint=True)
        out.append(Instance(spec.m, tuple(int(v) for v in p)))
    return out


def family_classes(family: str, count: int = 100, seed: int = 0) -> list[ClassSpec]:
    """All (m, n, U) classes of an experiment family."""
    rows: list[tuple[int, int, int, int]] = []
    if family == "E1":
        for lo, hi in ((1, 20), (20, 50)):
            for m in (3, 4, 5):
                for n in (2 * m, 3 * m, 5 * m):
                    rows.append((m, n, lo, hi))
    elif family == "E2":
        for m in (2, 3):
            for n in (10, 30, 50, 100):
                rows.append((m, n, 100, 800))
        for m in (4, 6, 8, 10):
            for n in (30, 50, 100):
                rows.append((m, n, 100, 800))
    elif family == "E3":
        for lo, hi in ((1, 100), (100, 200)):
            for m in (3, 5, 8, 10):
                for n in (3 * m + 1, 3 * m + 2, 4 * m + 1, 4 * m + 2, 5 * m + 1, 5 * m + 2):
                    rows.append((m, n, lo, hi))
    elif family == "E4":
        for lo, hi in ((1, 20), (20, 50), (1, 100), (50, 100), (100, 200), (100, 800)):
            rows.append((2, 10, lo, hi))
            rows.append((3, 9, lo, hi))
    elif family == "BIG":
        for m in (25, 50, 75, 100):
            rows.append((m, 4 * m, 1, 1000))
    else:
        raise ValueError(f"unknown family {family!r}")
    return [ClassSpec(family, m, n, lo, hi, count, seed) for m, n, lo, hi in rows]


def sub_instance(inst: Instance, jobs: Sequence[int], m: int) -> Instance:
    """Instance restricted to ``jobs`` on ``m`` machines."""
    return Instance(m, tuple(inst.p[j] for j in jobs))
