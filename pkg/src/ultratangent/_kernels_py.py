"""Numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function.  Loops over index
triples run in the same (i < j < k) order in both versions so argmin
witnesses agree.
"""
from __future__ import annotations

import math

import numpy as np

NAME = "numpy"

_LN2 = math.log(2.0)
_MAX_ITER = 200
_CHUNK = 1 << 20


def solve_s(a: float, b: float, c: float, rel: float) -> tuple[float, float]:
    s, r = solve_s_many(np.array([a]), np.array([b]), np.array([c]), rel)
    return float(s[0]), float(r[0])


def solve_s_many(a, b, c, rel):
    """Root of (a/c)**s + (b/c)**s = 1 on [1, ln2/ln(c/max(a,b))], elementwise.

    Inputs must be positive.  Where max(a, b) >= c*(1 - rel) the value is
    inf with residual 0.  Bisection runs until the bracket stops shrinking.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m = np.maximum(a, b)
    s = np.full(a.shape, np.inf)
    res = np.zeros(a.shape)
    finite = m < c * (1.0 - rel)
    if not finite.any():
        return s, res
    af, bf, cf, mf = a[finite], b[finite], c[finite], m[finite]
    with np.errstate(divide="ignore", invalid="ignore"):
        return _bisect(af, bf, cf, mf, s, res, finite)


def _bisect(af, bf, cf, mf, s, res, finite):
    la = np.log(af / cf)
    lb = np.log(bf / cf)
    g1 = (af + bf) / cf - 1.0
    lo = np.ones(af.shape)
    hi = _LN2 / np.log(cf / mf)
    hi = np.maximum(hi, 1.0)
    active = g1 > 0
    for _ in range(_MAX_ITER):
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        stalled = (mid <= lo) | (mid >= hi)
        active &= ~stalled
        g = np.exp(mid * la) + np.exp(mid * lb) - 1.0
        up = active & (g > 0)
        down = active & (g < 0)
        hit = active & (g == 0)
        lo = np.where(up | hit, mid, lo)
        hi = np.where(down | hit, mid, hi)
        active &= ~hit
    glo = np.abs(np.exp(lo * la) + np.exp(lo * lb) - 1.0)
    ghi = np.abs(np.exp(hi * la) + np.exp(hi * lb) - 1.0)
    root = np.where(glo <= ghi, lo, hi)
    r = np.minimum(glo, ghi)
    root = np.where(g1 <= 0, 1.0, root)
    r = np.where(g1 <= 0, np.abs(g1), r)
    s[finite] = root
    res[finite] = r
    return s, res


def _triple_chunks(n: int):
    """Yield (i, j, k) index arrays for all i < j < k, lexicographic."""
    buf_i, buf_j, buf_k, size = [], [], [], 0
    for i in range(n - 2):
        jj, kk = np.triu_indices(n - i - 1, 1)
        buf_i.append(np.full(jj.shape, i, dtype=np.intp))
        buf_j.append(jj + i + 1)
        buf_k.append(kk + i + 1)
        size += jj.size
        if size >= _CHUNK:
            yield np.concatenate(buf_i), np.concatenate(buf_j), np.concatenate(buf_k)
            buf_i, buf_j, buf_k, size = [], [], [], 0
    if size:
        yield np.concatenate(buf_i), np.concatenate(buf_j), np.concatenate(buf_k)


def _sorted_sides(D, i, j, k):
    """Largest side (with its endpoints and opposite vertex) and the two legs."""
    dij, djk, dik = D[i, j], D[j, k], D[i, k]
    # case 0: long side ij (middle k), 1: jk (middle i), 2: ik (middle j)
    sides = np.stack([dij, djk, dik])
    which = np.argmax(sides, axis=0)
    c = sides[which, np.arange(which.size)]
    legs_a = np.choose(which, [dik, dij, dij])
    legs_b = np.choose(which, [djk, dik, djk])
    x = np.choose(which, [i, j, i])
    y = np.choose(which, [j, k, k])
    z = np.choose(which, [k, i, j])
    return c, legs_a, legs_b, x, y, z


def betweenness(D, rel: float):
    """Infimum of s over all triples: (value, x, y, z) with z the middle point.

    Returns (inf, -1, -1, -1) when no triple has a finite exponent.
    """
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    best, wit = math.inf, (-1, -1, -1)
    for i, j, k in _triple_chunks(n):
        c, a, b, x, y, z = _sorted_sides(D, i, j, k)
        s, _ = solve_s_many(a, b, c, rel)
        t = int(np.argmin(s))
        if s[t] < best:
            best = float(s[t])
            wit = (int(x[t]), int(y[t]), int(z[t]))
            if best == 1.0:
                break
    return best, wit[0], wit[1], wit[2]


def ultrametric_witness(D, rel: float):
    """First (x, y, z), x < y, z any, with max(d(x,z), d(y,z)) < d(x,y)*(1-rel)."""
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    for x in range(n):
        # rows y, columns z
        m = np.maximum(D[x, :][None, :], D)
        bad = m < (D[x, :] * (1.0 - rel))[:, None]
        bad[: x + 1, :] = False
        bad[:, x] = False
        np.fill_diagonal(bad, False)
        hits = np.argwhere(bad)
        if hits.size:
            y, z = hits[0]
            return (x, int(y), int(z))
    return None


def m_class_witness(D, rel: float):
    """First triple violating additivity, as (x, y, z) with d(x,z) >= d(x,y) >= d(y,z)."""
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    for i, j, k in _triple_chunks(n):
        c, a, b, x, y, z = _sorted_sides(D, i, j, k)
        bad = np.abs(c - (a + b)) > rel * np.maximum(c, a + b)
        if bad.any():
            t = int(np.argmax(bad))
            # long side x-y, middle z; reorder to X+3 form (far end, middle, near end)
            xx, yy, zz = int(x[t]), int(y[t]), int(z[t])
            if D[xx, zz] >= D[yy, zz]:
                return (xx, zz, yy)
            return (yy, zz, xx)
    return None


def triple_quantities(D, base: int, tri, rel: float):
    """s, Psi and Phi for each unordered triple row of ``tri``.

    s is the smallest exponent over the three middle-point choices, which
    equals the exponent with the largest side as the long side.
    """
    D = np.asarray(D, dtype=np.float64)
    tri = np.asarray(tri, dtype=np.intp)
    i, j, k = tri[:, 0], tri[:, 1], tri[:, 2]
    c, a, b, _, _, _ = _sorted_sides(D, i, j, k)
    s, _ = solve_s_many(a, b, c, rel)
    lo = np.minimum(a, b)
    with np.errstate(divide="ignore"):
        psi = np.where(lo > 0, c / np.where(lo > 0, lo, 1.0), np.inf)
    dp = D[:, base]
    phi = np.maximum(
        np.maximum(f_many(D[i, j], dp[i], dp[j]), f_many(D[i, k], dp[i], dp[k])),
        f_many(D[j, k], dp[j], dp[k]),
    )
    return s, psi, phi


def f_many(dxy, dxp, dyp):
    hi = np.maximum(dxp, dyp)
    lo = np.minimum(dxp, dyp)
    safe = np.where(hi > 0, hi, 1.0)
    return np.where(hi > 0, (dxy / safe) * (lo / safe), 0.0)
