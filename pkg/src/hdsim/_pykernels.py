"""Pure NumPy implementations of the time-stepping kernels.

Paths are rows; the time loop runs in Python and each step is vectorized
over the batch. ``_ckernels.pyx`` mirrors these functions operation by
operation.
"""

import numpy as np


def _abs_pow(y, alpha):
    # |y|^alpha with |0|^alpha = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = np.power(np.abs(y), alpha)
    return np.where(y == 0.0, 0.0, r)


def _drift(y, alpha, cap):
    # (alpha / 2) * (y)^(2 alpha - 1), zero at y = 0
    if alpha == 0.0:
        return np.zeros_like(y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = 0.5 * alpha * np.copysign(np.power(np.abs(y), 2.0 * alpha - 1.0), y)
    d = np.where(y == 0.0, 0.0, d)
    if cap != np.inf:
        d = np.clip(d, -cap, cap)
    return d


def _first_bad(y):
    bad = ~np.isfinite(y)
    first = np.argmax(bad, axis=1)
    return np.where(bad.any(axis=1), first, -1).astype(np.int64)


def euler_ito(x0, db, dw, dt, alpha, eps, cap):
    m, n = db.shape
    y = np.empty((m, n + 1))
    y[:, 0] = x0
    cur = y[:, 0].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            cur = cur + _abs_pow(cur, alpha) * db[:, k] + _drift(cur, alpha, cap) * dt + eps * dw[:, k]
            y[:, k + 1] = cur
    return y, _first_bad(y)


def heun_strat(x0, db, dw, alpha, eps):
    m, n = db.shape
    y = np.empty((m, n + 1))
    y[:, 0] = x0
    cur = y[:, 0].copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            ay = _abs_pow(cur, alpha)
            pred = cur + ay * db[:, k] + eps * dw[:, k]
            cur = cur + 0.5 * (ay + _abs_pow(pred, alpha)) * db[:, k] + eps * dw[:, k]
            y[:, k + 1] = cur
    return y, _first_bad(y)


def skew_walk(j0, u, p_up):
    m, n = u.shape
    j = np.empty((m, n + 1), dtype=np.int64)
    j[:, 0] = j0
    cur = np.full(m, j0, dtype=np.int64)
    for k in range(n):
        p = np.where(cur == 0, p_up, 0.5)
        cur = cur + np.where(u[:, k] < p, 1, -1)
        j[:, k + 1] = cur
    return j
