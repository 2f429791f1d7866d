"""Solution paths obtained by transforming the driving noise.

All maps here act pointwise in time except the weak-solution construction
and the inverse rotation, which integrate left-endpoint (Ito) sums on the
simulation grid. The ``*_values`` functions accept batches with time on
the last axis; the ``Path`` wrappers are for single realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lamperti import ModelParams, abs_pow, f0, f0_inv, f_ab_inv, f_eps, transform_table
from .noise import Path

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WeakTriple:
    y: Path
    b: Path
    w: Path


@dataclass(frozen=True)
class RotatedNoise:
    w1: Path
    w2: Path
    w_hat: Path


def _check_unit_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


def _same_grid(*paths):
    p = paths[0].partition
    for q in paths[1:]:
        if q.partition != p:
            raise ParameterError("paths must share one partition")
    return p


def _cumsum0(inc):
    out = np.zeros(inc.shape[:-1] + (inc.shape[-1] + 1,))
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    return out


def benchmark_values(b, x0, alpha):
    return f0_inv(f0(x0, alpha) + np.asarray(b), alpha)


def benchmark_path(b: Path, x0: float, alpha: float) -> Path:
    """Benchmark solution ``F_0^{-1}(F_0(x0) + B_t)``."""
    _check_unit_alpha(alpha)
    return Path(b.partition, benchmark_values(b.values, x0, alpha))


def regularized_values(w_hat, x0, mp: ModelParams):
    table = transform_table(mp)
    return table.f_inv(f_eps(x0, mp) + np.asarray(w_hat))


def regularized_exact_path(w_hat: Path, x0: float, mp: ModelParams) -> Path:
    """``F_eps^{-1}(F_eps(x0) + W_t)`` for a driving Brownian path ``W``."""
    mp.require_positive_eps("regularized exact path")
    return Path(w_hat.partition, regularized_values(w_hat.values, x0, mp))


def plateau_path(b: Path, alpha: float, a: float, bb: float) -> Path:
    """Solution ``F_{A,B}^{-1}(B_t)`` started at 0 that sticks to 0 while B is in ``[-a, bb]``."""
    if not -1.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (-1, 1), got {alpha}")
    return Path(b.partition, f_ab_inv(b.values, alpha, a, bb))


def skew_solution_path(b_theta: Path, alpha: float) -> Path:
    """``F_0^{-1}(B^theta_t)``; start the skew BM at ``F_0(x0)`` to begin at x0."""
    _check_unit_alpha(alpha)
    return Path(b_theta.partition, f0_inv(b_theta.values, alpha))


def weak_triple_values(w1, w2, x0, mp: ModelParams):
    """Arrays ``(Y, B, W)`` of the weak-solution construction from two independent BMs."""
    w1 = np.asarray(w1)
    w2 = np.asarray(w2)
    w_hat = (w1 + w2) / SQRT2
    y = regularized_values(w_hat, x0, mp)
    a = np.asarray(abs_pow(y[..., :-1], mp.alpha))
    s = np.hypot(a, mp.eps) * SQRT2
    d1 = np.diff(w1, axis=-1)
    d2 = np.diff(w2, axis=-1)
    db = ((a + mp.eps) * d1 + (a - mp.eps) * d2) / s
    dw = ((mp.eps - a) * d1 + (a + mp.eps) * d2) / s
    return y, _cumsum0(db), _cumsum0(dw)


def weak_solution_triple(w1: Path, w2: Path, x0: float, mp: ModelParams) -> WeakTriple:
    """Weak solution of the Ito form built from two independent Brownian paths.

    ``Y`` is the exact transform of ``(w1 + w2) / sqrt(2)``; the new Brownian
    motions are left-endpoint sums of the rotation integrands against
    ``w1`` and ``w2``.
    """
    mp.require_positive_eps("weak solution construction")
    p = _same_grid(w1, w2)
    y, b, w = weak_triple_values(w1.values, w2.values, x0, mp)
    return WeakTriple(Path(p, y), Path(p, b), Path(p, w))


def rotated_noise_values(y, b, w, mp: ModelParams):
    y = np.asarray(y)
    a = np.asarray(abs_pow(y[..., :-1], mp.alpha))
    s = np.hypot(a, mp.eps) * SQRT2
    db = np.diff(b, axis=-1)
    dw = np.diff(w, axis=-1)
    w1 = _cumsum0(((a + mp.eps) * db - (a - mp.eps) * dw) / s)
    w2 = _cumsum0(((a - mp.eps) * db + (a + mp.eps) * dw) / s)
    return w1, w2, (w1 + w2) / SQRT2


def recover_rotated_noise(y: Path, b: Path, w: Path, mp: ModelParams) -> RotatedNoise:
    """Rotate ``(B, W)`` along a solution path into independent BMs ``W1, W2``.

    ``W_hat = (W1 + W2) / sqrt(2)`` has increments
    ``(|Y|^alpha dB + eps dW) / sigma_eps(Y)``, so for a solution of the Ito
    form ``F_eps(Y) - F_eps(x0) - W_hat`` vanishes as the mesh shrinks.
    """
    mp.require_positive_eps("rotated noise")
    p = _same_grid(y, b, w)
    w1, w2, w_hat = rotated_noise_values(y.values, b.values, w.values, mp)
    return RotatedNoise(Path(p, w1), Path(p, w2), Path(p, w_hat))
