# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled node-sum kernels.  Same API as ``_corepy``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef double _m1_row(const double* d2, const double* w, Py_ssize_t m, double u) nogil:
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(m):
        acc += w[j] / (d2[j] + u)
    return acc


def m1_sum(cnp.ndarray[double, ndim=2, mode="c"] d2,
           cnp.ndarray[double, ndim=1, mode="c"] w,
           cnp.ndarray[double, ndim=1, mode="c"] u):
    cdef Py_ssize_t k = d2.shape[0], m = d2.shape[1], i
    cdef cnp.ndarray[double, ndim=1] out = np.empty(k)
    for i in range(k):
        out[i] = _m1_row(&d2[i, 0], &w[0], m, u[i])
    return out


def moment_sums(cnp.ndarray[double, ndim=2, mode="c"] d2,
                cnp.ndarray[double, ndim=2, mode="c"] dx,
                cnp.ndarray[double, ndim=2, mode="c"] dy,
                cnp.ndarray[double, ndim=1, mode="c"] w,
                cnp.ndarray[double, ndim=1, mode="c"] u):
    cdef Py_ssize_t k = d2.shape[0], m = d2.shape[1], i, j
    cdef cnp.ndarray[double, ndim=1] m1 = np.empty(k)
    cdef cnp.ndarray[double, ndim=1] m2 = np.empty(k)
    cdef cnp.ndarray[double, ndim=1] gre = np.empty(k)
    cdef cnp.ndarray[double, ndim=1] gim = np.empty(k)
    cdef double a1, a2, ar, ai, kk, wk
    for i in range(k):
        a1 = a2 = ar = ai = 0.0
        for j in range(m):
            kk = 1.0 / (d2[i, j] + u[i])
            wk = w[j] * kk
            a1 += wk
            wk *= kk
            a2 += wk
            ar += wk * dx[i, j]
            ai += wk * dy[i, j]
        m1[i] = a1
        m2[i] = a2
        gre[i] = ar
        gim[i] = ai
    return m1, m2, gre, gim


def bisect_u(cnp.ndarray[double, ndim=2, mode="c"] d2,
             cnp.ndarray[double, ndim=1, mode="c"] w,
             cnp.ndarray[double, ndim=1, mode="c"] target,
             cnp.ndarray[double, ndim=1, mode="c"] lo,
             cnp.ndarray[double, ndim=1, mode="c"] hi,
             int iters=80):
    cdef Py_ssize_t k = d2.shape[0], m = d2.shape[1], i
    cdef int it
    cdef double a, b, mid
    cdef cnp.ndarray[double, ndim=1] out = np.empty(k)
    with nogil:
        for i in range(k):
            a = lo[i]
            b = hi[i]
            for it in range(iters):
                mid = 0.5 * (a + b)
                if _m1_row(&d2[i, 0], &w[0], m, mid) > target[i]:
                    a = mid
                else:
                    b = mid
            out[i] = 0.5 * (a + b)
    return out


def m1_nodes(cnp.ndarray[double, ndim=1, mode="c"] d2,
             cnp.ndarray[double, ndim=1, mode="c"] w, double u):
    return _m1_row(&d2[0], &w[0], d2.shape[0], u)


def moment_nodes(cnp.ndarray[double, ndim=1, mode="c"] d2,
                 cnp.ndarray[double, ndim=1, mode="c"] dx,
                 cnp.ndarray[double, ndim=1, mode="c"] dy,
                 cnp.ndarray[double, ndim=1, mode="c"] w, double u):
    cdef Py_ssize_t m = d2.shape[0], j
    cdef double a1 = 0.0, a2 = 0.0, ar = 0.0, ai = 0.0, kk, wk
    for j in range(m):
        kk = 1.0 / (d2[j] + u)
        wk = w[j] * kk
        a1 += wk
        wk *= kk
        a2 += wk
        ar += wk * dx[j]
        ai += wk * dy[j]
    return a1, a2, ar, ai


def bisect_u_nodes(cnp.ndarray[double, ndim=1, mode="c"] d2,
                   cnp.ndarray[double, ndim=1, mode="c"] w,
                   double target, double lo, double hi, int iters=80):
    cdef Py_ssize_t m = d2.shape[0]
    cdef int it
    cdef double mid
    for it in range(iters):
        mid = 0.5 * (lo + hi)
        if _m1_row(&d2[0], &w[0], m, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
