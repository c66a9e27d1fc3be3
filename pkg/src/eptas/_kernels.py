"""Hot inner loops.

Each kernel exists twice: a numba-compiled version and a plain numpy/python
version with the same signature. The compiled one is used when numba imports
and the environment variable ``EPTAS_NO_NUMBA`` is unset (or "0"). Both
versions stay importable as ``<name>_nb`` / ``<name>_py`` for the benchmark
and for cross-checking in tests.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("EPTAS_NO_NUMBA", "0").lower() in ("", "0", "false", "no")


def _jit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


# --- direct convolution --------------------------------------------------

def _conv_accumulate(f, off_f, g, off_g, out):
    """out[off_f[a] + off_g[b]] += f[a] * g[b] over all a, b."""
    for a in range(f.shape[0]):
        fa = f[a]
        if fa == 0:
            continue
        base = off_f[a]
        for b in range(g.shape[0]):
            out[base + off_g[b]] += fa * g[b]


def conv_accumulate_py(f, off_f, g, off_g, out):
    for a in np.flatnonzero(f):
        out[off_f[a] + off_g] += f[a] * g


conv_accumulate_nb = _jit(_conv_accumulate)


# --- sparse sumset for the doubling solver -------------------------------

def _pair_sums(P, lo, shape, mask, parent, store):
    k, r = P.shape
    for a in range(k):
        for b in range(a, k):
            idx = 0
            ok = True
            for d in range(r):
                v = P[a, d] + P[b, d] - lo[d]
                if v < 0 or v >= shape[d]:
                    ok = False
                    break
                idx = idx * shape[d] + v
            if ok and mask[idx] == 0:
                mask[idx] = 1
                if store:
                    parent[idx, 0] = a
                    parent[idx, 1] = b


def pair_sums_py(P, lo, shape, mask, parent, store):
    k, r = P.shape
    shape = np.asarray(shape)
    mult = np.ones(r, dtype=np.int64)
    for d in range(r - 2, -1, -1):
        mult[d] = mult[d + 1] * shape[d + 1]
    for a in range(k):
        s = P[a] + P[a:] - lo
        inside = np.all((s >= 0) & (s < shape), axis=1)
        if not inside.any():
            continue
        idx = s[inside] @ mult
        partners = np.flatnonzero(inside) + a
        fresh = mask[idx] == 0
        idx, partners = idx[fresh], partners[fresh]
        # keep the first partner for repeated sums, matching the loop order
        idx, first = np.unique(idx, return_index=True)
        mask[idx] = 1
        if store:
            parent[idx, 0] = a
            parent[idx, 1] = partners[first]


pair_sums_nb = _jit(_pair_sums)


def _find_split(P, w, lo, shape, mask):
    """Index a such that w - P[a] is marked in mask, or -1."""
    k, r = P.shape
    for a in range(k):
        idx = 0
        ok = True
        for d in range(r):
            v = w[d] - P[a, d] - lo[d]
            if v < 0 or v >= shape[d]:
                ok = False
                break
            idx = idx * shape[d] + v
        if ok and mask[idx]:
            return a
    return -1


def find_split_py(P, w, lo, shape, mask):
    shape = np.asarray(shape)
    s = w - P - lo
    inside = np.all((s >= 0) & (s < shape), axis=1)
    if not inside.any():
        return -1
    cand = np.flatnonzero(inside)
    idx = np.ravel_multi_index(s[cand].T, tuple(shape))
    hit = np.flatnonzero(mask[idx])
    return int(cand[hit[0]]) if hit.size else -1


find_split_nb = _jit(_find_split)


# --- exhaustive IP search -------------------------------------------------

def _first_ip_solution(A, b, cap):
    r, n = A.shape
    x = np.zeros(n, dtype=np.int64)
    acc = np.zeros(r, dtype=np.int64)
    total = 0
    while True:
        hit = True
        for i in range(r):
            if acc[i] != b[i]:
                hit = False
                break
        if hit:
            return x
        j = n - 1
        while True:
            if j < 0:
                return np.full(n, -1, dtype=np.int64)
            if total < cap:
                x[j] += 1
                total += 1
                for i in range(r):
                    acc[i] += A[i, j]
                break
            total -= x[j]
            for i in range(r):
                acc[i] -= A[i, j] * x[j]
            x[j] = 0
            j -= 1


def first_ip_solution_py(A, b, cap):
    n = A.shape[1]
    for X in _compositions(n, cap):
        hit = np.flatnonzero(np.all(X @ A.T == b, axis=1))
        if hit.size:
            return X[hit[0]].copy()
    return np.full(n, -1, dtype=np.int64)


def _compositions(n, cap, chunk=1 << 16):
    """Yield all x in Z_{>=0}^n with sum(x) <= cap in lexicographic order, in blocks."""
    if n == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    # extend one coordinate at a time, pruning on the running sum
    block = np.arange(cap + 1, dtype=np.int64)[:, None]
    for _ in range(n - 1):
        sums = block.sum(axis=1)
        parts = []
        for v in range(cap + 1):
            keep = block[sums + v <= cap]
            if keep.size:
                parts.append(np.hstack([keep, np.full((keep.shape[0], 1), v, dtype=np.int64)]))
        block = np.vstack(parts)
    # lexicographic, first coordinate most significant: the odometer's order
    block = block[np.lexsort(block.T[::-1])]
    for s in range(0, block.shape[0], chunk):
        yield block[s:s + chunk]


first_ip_solution_nb = _jit(_first_ip_solution)


# --- exact makespan branch and bound --------------------------------------

def _bnb_makespan(p, m, best, lb):
    """Smallest makespan below ``best`` for integer p sorted non-increasing.

    Returns ``best`` unchanged when nothing better exists. Stops as soon as
    ``lb`` is reached.
    """
    n = p.shape[0]
    loads = np.zeros(m, dtype=np.int64)
    nxt = np.zeros(n + 1, dtype=np.int64)
    placed = np.full(n, -1, dtype=np.int64)
    depth = 0
    while depth >= 0:
        if best <= lb:
            return best
        if depth == n:
            cur = loads.max()
            if cur < best:
                best = cur
            depth -= 1
            loads[placed[depth]] -= p[depth]
            continue
        i = nxt[depth]
        found = -1
        while i < m:
            dup = False
            for k in range(i):
                if loads[k] == loads[i]:
                    dup = True
                    break
            if not dup and loads[i] + p[depth] < best:
                found = i
                break
            i += 1
        if found >= 0:
            loads[found] += p[depth]
            placed[depth] = found
            nxt[depth] = found + 1
            depth += 1
            nxt[depth] = 0
        else:
            depth -= 1
            if depth >= 0:
                loads[placed[depth]] -= p[depth]
    return best


def bnb_makespan_py(p, m, best, lb):
    p = [int(v) for v in p]
    loads = [0] * m
    best = int(best)

    def rec(j):
        nonlocal best
        if best <= lb:
            return
        if j == len(p):
            best = min(best, max(loads))
            return
        seen = set()
        for i in range(m):
            if loads[i] in seen:
                continue
            seen.add(loads[i])
            if loads[i] + p[j] < best:
                loads[i] += p[j]
                rec(j + 1)
                loads[i] -= p[j]

    rec(0)
    return best


bnb_makespan_nb = _jit(_bnb_makespan)


if USE_NUMBA:
    conv_accumulate = conv_accumulate_nb
    pair_sums = pair_sums_nb
    find_split = find_split_nb
    first_ip_solution = first_ip_solution_nb
    bnb_makespan = bnb_makespan_nb
else:
    conv_accumulate = conv_accumulate_py
    pair_sums = pair_sums_py
    find_split = find_split_py
    first_ip_solution = first_ip_solution_py
    bnb_makespan = bnb_makespan_py
