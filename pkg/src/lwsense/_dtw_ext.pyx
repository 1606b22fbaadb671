# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled DTW kernels.

Recurrence and traceback tie order must stay identical to ``_dtw_py`` so the
two backends return bit-identical results.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def dtw_distance(const double[::1] a, const double[::1] b):
    """Cumulative |a_i - b_j| cost of the optimal monotone path."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    rows = np.empty((2, m + 1))
    cdef double[:, ::1] r = rows
    cdef double *prev = &r[0, 0]
    cdef double *cur = &r[1, 0]
    cdef double *tmp
    cdef const double *bp = &b[0]
    cdef double ai, left, best
    with nogil:
        prev[0] = 0.0
        for j in range(1, m + 1):
            prev[j] = INFINITY
        for i in range(n):
            ai = a[i]
            left = INFINITY
            cur[0] = left
            for j in range(m):
                best = prev[j] if prev[j] < prev[j + 1] else prev[j + 1]
                if left < best:
                    best = left
                left = fabs(ai - bp[j]) + best
                cur[j + 1] = left
            tmp = prev
            prev = cur
            cur = tmp
    return prev[m]


def dtw_accumulate(const double[::1] a, const double[::1] b):
    """Padded (n+1, m+1) accumulated-cost matrix; entry [0, 0] is the origin."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    out = np.empty((n + 1, m + 1))
    cdef double[:, ::1] P = out
    cdef double *prev
    cdef double *cur
    cdef const double *bp = &b[0]
    cdef double ai, left, best
    with nogil:
        P[0, 0] = 0.0
        for j in range(1, m + 1):
            P[0, j] = INFINITY
        for i in range(1, n + 1):
            prev = &P[i - 1, 0]
            cur = &P[i, 0]
            ai = a[i - 1]
            left = INFINITY
            cur[0] = left
            for j in range(m):
                best = prev[j] if prev[j] < prev[j + 1] else prev[j + 1]
                if left < best:
                    best = left
                left = fabs(ai - bp[j]) + best
                cur[j + 1] = left
    return out


def dtw_path(const double[::1] a, const double[::1] b):
    """Return ``(distance, path)`` with ``path`` an int64 array of shape (K, 2)."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    acc = dtw_accumulate(a, b)
    cdef double[:, ::1] P = acc
    buf = np.empty((n + m, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] pb = buf
    cdef Py_ssize_t i = n, j = m, k = 0
    cdef double d, u, l
    with nogil:
        while True:
            pb[k, 0] = i - 1
            pb[k, 1] = j - 1
            k += 1
            if i == 1 and j == 1:
                break
            d = P[i - 1, j - 1]
            u = P[i - 1, j]
            l = P[i, j - 1]
            if d <= u and d <= l:
                i -= 1
                j -= 1
            elif u <= l:
                i -= 1
            else:
                j -= 1
    return P[n, m], buf[k - 1::-1].copy()
