# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels; same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, copysign, isfinite

cnp.import_array()


cdef inline double abs_pow(double y, double alpha) noexcept nogil:
    if y == 0.0:
        return 0.0
    return pow(fabs(y), alpha)


cdef inline double drift(double y, double alpha, double cap) noexcept nogil:
    cdef double d
    if alpha == 0.0 or y == 0.0:
        return 0.0
    d = 0.5 * alpha * copysign(pow(fabs(y), 2.0 * alpha - 1.0), y)
    if d > cap:
        d = cap
    elif d < -cap:
        d = -cap
    return d


def euler_ito(double x0, const double[:, ::1] db, const double[:, ::1] dw,
              double dt, double alpha, double eps, double cap):
    cdef Py_ssize_t m = db.shape[0], n = db.shape[1], i, k
    out = np.empty((m, n + 1))
    bad_arr = np.full(m, -1, dtype=np.int64)
    cdef double[:, ::1] y = out
    cdef long long[::1] bad = bad_arr
    cdef double cur
    with nogil:
        for i in range(m):
            cur = x0
            y[i, 0] = cur
            for k in range(n):
                cur = cur + abs_pow(cur, alpha) * db[i, k] + drift(cur, alpha, cap) * dt + eps * dw[i, k]
                y[i, k + 1] = cur
                if bad[i] < 0 and not isfinite(cur):
                    bad[i] = k + 1
    return out, bad_arr


def heun_strat(double x0, const double[:, ::1] db, const double[:, ::1] dw,
               double alpha, double eps):
    cdef Py_ssize_t m = db.shape[0], n = db.shape[1], i, k
    out = np.empty((m, n + 1))
    bad_arr = np.full(m, -1, dtype=np.int64)
    cdef double[:, ::1] y = out
    cdef long long[::1] bad = bad_arr
    cdef double cur, ay, pred
    with nogil:
        for i in range(m):
            cur = x0
            y[i, 0] = cur
            for k in range(n):
                ay = abs_pow(cur, alpha)
                pred = cur + ay * db[i, k] + eps * dw[i, k]
                cur = cur + 0.5 * (ay + abs_pow(pred, alpha)) * db[i, k] + eps * dw[i, k]
                y[i, k + 1] = cur
                if bad[i] < 0 and not isfinite(cur):
                    bad[i] = k + 1
    return out, bad_arr


def skew_walk(long long j0, const double[:, ::1] u, double p_up):
    cdef Py_ssize_t m = u.shape[0], n = u.shape[1], i, k
    out = np.empty((m, n + 1), dtype=np.int64)
    cdef long long[:, ::1] j = out
    cdef long long cur
    cdef double p
    with nogil:
        for i in range(m):
            cur = j0
            j[i, 0] = cur
            for k in range(n):
                p = p_up if cur == 0 else 0.5
                if u[i, k] < p:
                    cur += 1
                else:
                    cur -= 1
                j[i, k + 1] = cur
    return out
