"""Mixed-integer model of the rounding-scheme search, written as a CPLEX LP file.

Variables: sizes x_i in [0, 1]; y_S = 1 when the (L+1)-set S of size indices
fits into capacity 1; z_{a,b,k} = 1 when x_a + x_b = x_k. Every fitting S must
contain a pair of some active z. The objective minimises sum y + sum z.

The dialect is the usual one read by CPLEX, Gurobi, HiGHS, SCIP and glpk:
sections Minimize / Subject To / Bounds / Binary / End, named rows, long
expressions wrapped onto indented continuation lines.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

_WRAP = 78


def _num(v) -> str:
    f = float(v)
    return str(int(f)) if f == int(f) else repr(f)


def _expr(terms) -> str:
    """Linear expression from (coefficient, name) pairs."""
    out = []
    for c, name in terms:
        c = float(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{_num(mag)} {name}"
        out.append(f"{sign} {body}")
    if not out:
        return "0 x0"
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else s


def _wrap(line: str) -> list[str]:
    """Break a row before signed terms so lines stay within _WRAP chars."""
    units: list[str] = []
    for w in line.split():
        if w in ("+", "-") or not units:
            units.append(w)
        else:
            units[-1] += " " + w
    lines, cur = [], " " + units[0]
    for u in units[1:]:
        if len(cur) + 1 + len(u) > _WRAP:
            lines.append(cur)
            cur = "   " + u
        else:
            cur = f"{cur} {u}"
    lines.append(cur)
    return lines


def _y(S) -> str:
    return "y_" + "_".join(str(i) for i in S)


def _z(a, b, k) -> str:
    return f"z_{a}_{b}_{k}"


def emit_milp(d: int, L: int, eps, *, multisets: bool = False, pin_bottom: bool = False,
              delta=Fraction(1, 10**6)) -> str:
    """LP-format text of the scheme MILP for (d, L, eps).

    y ranges over the C(d, L+1) sets of distinct indices, or over all
    multisets when ``multisets`` is set (then repeated sizes are covered by
    z_{a,a,k} too). ``delta`` is the margin that turns the strict
    inequalities (fitting threshold, decreasing sizes) into closed ones.
    ``pin_bottom`` fixes x_{d-1} = eps instead of bounding it by eps(1+eps).
    """
    if d < 1 or L < 1:
        raise ValueError("need d >= 1 and L >= 1")
    eps = Fraction(eps)
    delta = Fraction(delta)
    xs = [f"x{i}" for i in range(d)]
    pick = itertools.combinations_with_replacement if multisets else itertools.combinations
    sets = list(pick(range(d), L + 1))
    # k must exceed both summands, so only k < a <= b can ever be active
    zs = [(a, b, k) for a in range(d) for b in range(a, d) for k in range(a)]
    big_y = L + 2  # |sum x - 1| <= L over [0, 1]^(L+1)
    big_z = 2

    rows: list[tuple[str, str, str, str]] = []

    def row(name, terms, sense, rhs):
        rows.append((name, _expr(terms), sense, _num(rhs)))

    row("range_top", [(1 + eps, xs[0])], ">=", 1 - 2 * eps)
    row("range_cap", [(1, xs[0])], "<=", 1 - 2 * eps)
    if pin_bottom:
        row("pin_bottom", [(1, xs[-1])], "=", eps)
    else:
        row("range_bottom", [(1, xs[-1])], "<=", eps * (1 + eps))
    for i in range(d - 1):
        row(f"gap_{i}", [(1 + eps, xs[i + 1]), (-1, xs[i])], ">=", 0)
        row(f"order_{i}", [(1, xs[i]), (-1, xs[i + 1])], ">=", delta)
    for S in sets:
        terms = [(1, xs[i]) for i in S]
        merged: dict[str, Fraction] = {}
        for c, n in terms:
            merged[n] = merged.get(n, 0) + c
        terms = [(c, n) for n, c in merged.items()]
        name = _y(S)
        # y = 0 forces sum > 1; y = 1 forces sum <= 1
        row(f"fit_lo_{name}", terms + [(big_y, name)], ">=", 1 + delta)
        row(f"fit_hi_{name}", terms + [(big_y, name)], "<=", 1 + big_y)
    for a, b, k in zs:
        name = _z(a, b, k)
        lhs = [(1, xs[a]), (1, xs[b])] if a != b else [(2, xs[a])]
        lhs.append((-1, xs[k]))
        row(f"sum_hi_{name}", lhs + [(big_z, name)], "<=", big_z)
        row(f"sum_lo_{name}", lhs + [(-big_z, name)], ">=", -big_z)
    for S in sets:
        cnt = {i: S.count(i) for i in set(S)}
        cover = [(1, _z(a, b, k)) for a, b, k in zs
                 if a in cnt and b in cnt and (a != b or cnt[a] >= 2)]
        row(f"reduce_{_y(S)}", cover + [(-1, _y(S))], ">=", 0)

    out = [f"\\ rounding scheme model: d={d} L={L} eps={eps}",
           f"\\ {len(sets)} y variables, {len(zs)} z variables",
           "Minimize"]
    obj = [(1, _y(S)) for S in sets] + [(1, _z(*t)) for t in zs]
    out += _wrap("obj: " + (_expr(obj) if obj else "0 x0"))
    out.append("Subject To")
    for name, expr, sense, rhs in rows:
        out += _wrap(f"{name}: {expr} {sense} {rhs}")
    out.append("Bounds")
    out += [f" 0 <= {x} <= 1" for x in xs]
    binaries = [_y(S) for S in sets] + [_z(*t) for t in zs]
    if binaries:
        out.append("Binary")
        cur = ""
        for name in binaries:
            if cur and len(cur) + 1 + len(name) > _WRAP:
                out.append(cur)
                cur = ""
            cur = f"{cur} {name}"
        out.append(cur)
    out.append("End")
    return "\n".join(out) + "\n"
