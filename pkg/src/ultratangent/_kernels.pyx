# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, INFINITY

cnp.import_array()

NAME = "cython"

cdef double LN2 = 0.6931471805599453
cdef int MAX_ITER = 200


cdef inline double _g(double s, double la, double lb) noexcept nogil:
    return exp(s * la) + exp(s * lb) - 1.0


cdef inline void _solve(double a, double b, double c, double rel,
                        double* s_out, double* r_out) noexcept nogil:
    cdef double m = a if a > b else b
    cdef double la, lb, g1, lo, hi, mid, g, glo, ghi
    cdef int it
    if not (m < c * (1.0 - rel)):
        s_out[0] = INFINITY
        r_out[0] = 0.0
        return
    g1 = (a + b) / c - 1.0
    if g1 <= 0:
        s_out[0] = 1.0
        r_out[0] = fabs(g1)
        return
    la = log(a / c)
    lb = log(b / c)
    lo = 1.0
    hi = LN2 / log(c / m)
    if hi < 1.0:
        hi = 1.0
    for it in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g = _g(mid, la, lb)
        if g > 0:
            lo = mid
        elif g < 0:
            hi = mid
        else:
            lo = mid
            hi = mid
            break
    glo = fabs(_g(lo, la, lb))
    ghi = fabs(_g(hi, la, lb))
    if glo <= ghi:
        s_out[0] = lo
        r_out[0] = glo
    else:
        s_out[0] = hi
        r_out[0] = ghi


def solve_s(double a, double b, double c, double rel):
    cdef double s, r
    _solve(a, b, c, rel, &s, &r)
    return s, r


def solve_s_many(a, b, c, double rel):
    cdef cnp.ndarray[double, ndim=1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] bv = np.ascontiguousarray(b, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] cv = np.ascontiguousarray(c, dtype=np.float64).ravel()
    cdef Py_ssize_t n = av.shape[0], t
    cdef cnp.ndarray[double, ndim=1] s = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] r = np.empty(n)
    cdef double[::1] sv = s, rv = r, aa = av, bb = bv, cc = cv
    with nogil:
        for t in range(n):
            _solve(aa[t], bb[t], cc[t], rel, &sv[t], &rv[t])
    shape = np.shape(a)
    return s.reshape(shape), r.reshape(shape)


cdef inline void _sides(const double[:, ::1] D, Py_ssize_t i, Py_ssize_t j, Py_ssize_t k,
                        double* c, double* a, double* b,
                        Py_ssize_t* x, Py_ssize_t* y, Py_ssize_t* z) noexcept nogil:
    cdef double dij = D[i, j], djk = D[j, k], dik = D[i, k]
    # tie order matches numpy argmax over (ij, jk, ik)
    if dij >= djk and dij >= dik:
        c[0] = dij; a[0] = dik; b[0] = djk; x[0] = i; y[0] = j; z[0] = k
    elif djk >= dik:
        c[0] = djk; a[0] = dij; b[0] = dik; x[0] = j; y[0] = k; z[0] = i
    else:
        c[0] = dik; a[0] = dij; b[0] = djk; x[0] = i; y[0] = k; z[0] = j


def betweenness(D, double rel):
    cdef const double[:, ::1] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i, j, k, x, y, z
    cdef Py_ssize_t bx = -1, by = -1, bz = -1
    cdef double best = INFINITY, c, a, b, s, r
    cdef bint done = False
    with nogil:
        for i in range(n):
            if done:
                break
            for j in range(i + 1, n):
                if done:
                    break
                for k in range(j + 1, n):
                    _sides(M, i, j, k, &c, &a, &b, &x, &y, &z)
                    _solve(a, b, c, rel, &s, &r)
                    if s < best:
                        best = s
                        bx = x; by = y; bz = z
                        if best == 1.0:
                            done = True
                            break
    return best, bx, by, bz


def ultrametric_witness(D, double rel):
    cdef const double[:, ::1] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], x, y, z
    cdef double m, lim
    for x in range(n):
        for y in range(x + 1, n):
            lim = M[x, y] * (1.0 - rel)
            for z in range(n):
                if z == x or z == y:
                    continue
                m = M[x, z] if M[x, z] > M[y, z] else M[y, z]
                if m < lim:
                    return (x, y, z)
    return None


def m_class_witness(D, double rel):
    cdef const double[:, ::1] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i, j, k, x, y, z
    cdef double c, a, b, sc
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                _sides(M, i, j, k, &c, &a, &b, &x, &y, &z)
                sc = c if c > a + b else a + b
                if fabs(c - (a + b)) > rel * sc:
                    if M[x, z] >= M[y, z]:
                        return (x, z, y)
                    return (y, z, x)
    return None


cdef inline double _f(double dxy, double dxp, double dyp) noexcept nogil:
    cdef double hi = dxp if dxp > dyp else dyp
    cdef double lo = dyp if dxp > dyp else dxp
    if hi > 0:
        return (dxy / hi) * (lo / hi)
    return 0.0


def triple_quantities(D, Py_ssize_t base, tri, double rel):
    cdef const double[:, ::1] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef const cnp.intp_t[:, ::1] T = np.ascontiguousarray(tri, dtype=np.intp)
    cdef Py_ssize_t m = T.shape[0], t, i, j, k, x, y, z
    cdef cnp.ndarray[double, ndim=1] s_arr = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] psi_arr = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] phi_arr = np.empty(m)
    cdef double[::1] sv = s_arr, pv = psi_arr, fv = phi_arr
    cdef double c, a, b, r, lo, f1, f2, f3
    with nogil:
        for t in range(m):
            i = T[t, 0]; j = T[t, 1]; k = T[t, 2]
            _sides(M, i, j, k, &c, &a, &b, &x, &y, &z)
            _solve(a, b, c, rel, &sv[t], &r)
            lo = a if a < b else b
            pv[t] = c / lo if lo > 0 else INFINITY
            f1 = _f(M[i, j], M[i, base], M[j, base])
            f2 = _f(M[i, k], M[i, base], M[k, base])
            f3 = _f(M[j, k], M[j, base], M[k, base])
            if f2 > f1:
                f1 = f2
            if f3 > f1:
                f1 = f3
            fv[t] = f1
    return s_arr, psi_arr, phi_arr
