# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_kernels_py`` for semantics)."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

BACKEND = "cython"


def directional_batch(comp, X):
    R_arr = np.ascontiguousarray(comp, dtype=np.float64)
    V_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    cdef Py_ssize_t n = R_arr.shape[0]
    cdef Py_ssize_t ns = V_arr.shape[0]
    # the n^4 contraction over the first slot is a plain matrix product (BLAS)
    T_arr = np.ascontiguousarray(V_arr @ R_arr.reshape(n, n * n * n))
    cdef const double[:, ::1] T = T_arr
    cdef const double[:, ::1] V = V_arr
    out_arr = np.zeros((ns, n, n))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t s, i, c, j, base
    cdef double xc
    with nogil:
        for s in range(ns):
            for i in range(n):
                for c in range(n):
                    xc = V[s, c]
                    if xc == 0.0:
                        continue
                    base = (i * n + c) * n
                    for j in range(n):
                        out[s, i, j] += xc * T[s, base + j]
    return out_arr


cdef double _rec(const double[:] v, Py_ssize_t start, Py_ssize_t left, double acc):
    cdef double best = INFINITY
    cdef double r
    cdef Py_ssize_t i
    if left == 0:
        return acc
    for i in range(start, v.shape[0] - left + 1):
        r = _rec(v, i + 1, left - 1, acc + v[i])
        if r < best:
            best = r
    return best


def min_subset_sum(values, m):
    cdef const double[:] v = np.ascontiguousarray(np.asarray(values, dtype=np.float64).ravel())
    return float(_rec(v, 0, int(m), 0.0))


def lhs_grid(h, h1, h2, omh, f, f1, f2, omf, p, q, k):
    cdef const double[:] ah = np.ascontiguousarray(h, dtype=np.float64).ravel()
    cdef const double[:] ah1 = np.ascontiguousarray(h1, dtype=np.float64).ravel()
    cdef const double[:] ah2 = np.ascontiguousarray(h2, dtype=np.float64).ravel()
    cdef const double[:] aomh = np.ascontiguousarray(omh, dtype=np.float64).ravel()
    cdef const double[:] af = np.ascontiguousarray(f, dtype=np.float64).ravel()
    cdef const double[:] af1 = np.ascontiguousarray(f1, dtype=np.float64).ravel()
    cdef const double[:] af2 = np.ascontiguousarray(f2, dtype=np.float64).ravel()
    cdef const double[:] aomf = np.ascontiguousarray(omf, dtype=np.float64).ravel()
    cdef Py_ssize_t n = ah.shape[0]
    shape = np.shape(h)
    out_l = np.empty((4, n))
    out_s = np.empty((4, n))
    cdef double[:, :] L = out_l
    cdef double[:, :] S = out_s
    cdef double kq = k - q, kq1 = k - q - 1, kp1 = k - p - 1
    cdef double dp = p, dq = q
    cdef double H2, Hq, F2, Fq, M, a, b, c
    cdef Py_ssize_t i
    for i in range(n):
        H2 = ah2[i] / ah[i]
        Hq = (aomh[i] / ah[i]) / ah[i]
        F2 = af2[i] / af[i]
        Fq = (aomf[i] / af[i]) / af[i]
        M = (af1[i] / af[i]) * (ah1[i] / ah[i])
        a = -kq * H2
        b = -dq * F2
        L[0, i] = a + b
        S[0, i] = fabs(a) + fabs(b)
        a = -H2
        b = kq1 * Hq
        c = -dq * M
        L[1, i] = a + b + c
        S[1, i] = fabs(a) + fabs(b) + fabs(c)
        a = kq * Hq
        L[2, i] = a + c
        S[2, i] = fabs(a) + fabs(c)
        a = -F2
        b = -dp * M
        c = kp1 * Fq
        L[3, i] = a + b + c
        S[3, i] = fabs(a) + fabs(b) + fabs(c)
    return out_l.reshape((4,) + shape), out_s.reshape((4,) + shape)
