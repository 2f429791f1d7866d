"""Partition-based functionals of grid paths and Monte Carlo summaries.

Time integrals are left-endpoint sums, except occupation-type functionals
which weight the two end points of ``[0, t_end]`` by one half (trapezoidal
counting), so a path sitting at 0 for the whole horizon has occupation
exactly ``t_end``. Functions named ``*_values`` take arrays with time on
the last axis and return one number per path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lamperti import ModelParams, abs_pow, signed_pow
from .noise import Path

Z95 = 1.959963984540054


@dataclass(frozen=True)
class McSummary:
    mean: float
    std_error: float
    n: int
    ci_low: float
    ci_high: float

    @classmethod
    def from_samples(cls, values) -> "McSummary":
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise ParameterError("cannot summarize an empty sample")
        m = float(v.mean())
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        return cls(m, se, int(v.size), m - Z95 * se, m + Z95 * se)

    @classmethod
    def of_median(cls, values) -> "McSummary":
        """Sample median with a distribution-free order-statistic 95% interval.

        ``mean`` holds the median; ``std_error`` is the interval half-width
        divided by 1.96.
        """
        v = np.sort(np.asarray(values, dtype=float).ravel())
        n = v.size
        if n == 0:
            raise ParameterError("cannot summarize an empty sample")
        med = float(np.median(v))
        half = Z95 * math.sqrt(n) / 2.0
        lo = v[max(int(math.floor(n / 2.0 - half)), 0)]
        hi = v[min(int(math.ceil(n / 2.0 + half)), n - 1)]
        lo, hi = float(min(lo, med)), float(max(hi, med))
        return cls(med, (hi - lo) / (2.0 * Z95), int(n), lo, hi)

    def as_dict(self):
        return {"mean": self.mean, "std_error": self.std_error, "n": self.n,
                "ci_low": self.ci_low, "ci_high": self.ci_high}


def _grid(*paths: Path):
    p = paths[0].partition
    for q in paths[1:]:
        if q.partition != p:
            raise ParameterError("paths must share one partition")
    return p


def _cumsum0(terms):
    out = np.zeros(terms.shape[:-1] + (terms.shape[-1] + 1,))
    np.cumsum(terms, axis=-1, out=out[..., 1:])
    return out


def quadratic_covariation_values(x, y):
    return _cumsum0(np.diff(x, axis=-1) * np.diff(y, axis=-1))


def quadratic_covariation(x: Path, y: Path) -> Path:
    """Partial sums of increment products at every grid time."""
    p = _grid(x, y)
    return Path(p, quadratic_covariation_values(x.values, y.values))


def bracket_residual_values(y, b, alpha, dt):
    y = np.asarray(y)
    qc = quadratic_covariation_values(np.asarray(abs_pow(y, alpha)), b)
    drift = alpha * dt * _cumsum0(np.asarray(signed_pow(y[..., :-1], 2.0 * alpha - 1.0)))
    return np.max(np.abs(qc - drift), axis=-1)


def bracket_residual(y: Path, b: Path, alpha: float) -> float:
    """``sup_t | [|Y|^alpha, B]_t - alpha int_0^t (Y_s)^(2 alpha - 1) ds |`` on the grid."""
    p = _grid(y, b)
    return float(bracket_residual_values(y.values, b.values, alpha, p.mesh))


def _trapezoid_weights(n_points):
    w = np.ones(n_points)
    w[0] = w[-1] = 0.5
    return w


def occupation_time_values(x, delta, dt):
    x = np.asarray(x)
    inside = np.abs(x) <= delta
    return dt * (inside @ _trapezoid_weights(x.shape[-1]))


def occupation_time(x: Path, delta: float = 0.0) -> float:
    """Time spent in ``[-delta, delta]``; ``delta = 0`` counts exact zeros."""
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    return float(occupation_time_values(x.values, delta, x.partition.mesh))


def local_time_zero_values(x, delta, dt):
    return occupation_time_values(x, delta, dt) / (2.0 * delta)


def default_local_time_band(mesh: float) -> float:
    return 3.0 * math.sqrt(mesh)


def local_time_zero(x: Path, delta: float | None = None) -> float:
    """Symmetric local time at 0, ``(2 delta)^-1 Leb{s : |X_s| <= delta}``."""
    if delta is None:
        delta = default_local_time_band(x.partition.mesh)
    if not delta > 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    return float(local_time_zero_values(x.values, delta, x.partition.mesh))


def sup_distance_values(x, y):
    return np.max(np.abs(np.asarray(x) - np.asarray(y)), axis=-1)


def sup_distance(x: Path, y: Path) -> float:
    _grid(x, y)
    return float(sup_distance_values(x.values, y.values))


def default_vp_cutoff(mesh: float) -> float:
    return mesh ** 0.25


def _cut_drift_terms(y, alpha, delta):
    y = np.asarray(y)
    terms = np.asarray(signed_pow(y, 2.0 * alpha - 1.0))
    if delta is not None:
        terms = np.where(np.abs(y) > delta, terms, 0.0)
    return terms


def vp_drift(y: Path, alpha: float, delta: float) -> float:
    """Cut-off Riemann sum ``sum (Y_k)^(2 alpha - 1) 1{|Y_k| > delta} dt``."""
    if not delta > 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    terms = _cut_drift_terms(y.values[:-1], alpha, delta)
    return float(terms.sum() * y.partition.mesh)


def ito_residual_values(y, b, w, x0, mp: ModelParams, dt, delta=None):
    """Per-path ``sup_t |Y_t - x0 - int |Y|^a dB - (a/2) int (Y)^(2a-1) ds - eps W_t|``.

    For ``alpha < 0`` the drift integral is the principal-value cut-off sum
    with band ``delta`` (default ``mesh**0.25``); for ``alpha = 0`` it is 0.
    """
    y = np.asarray(y)
    a = mp.alpha
    stoch = _cumsum0(np.asarray(abs_pow(y[..., :-1], a)) * np.diff(b, axis=-1))
    if a == 0:
        drift = 0.0
    else:
        if a < 0 and delta is None:
            delta = default_vp_cutoff(dt)
        cut = delta if a < 0 else None
        drift = 0.5 * a * dt * _cumsum0(_cut_drift_terms(y[..., :-1], a, cut))
    resid = y - x0 - stoch - drift - mp.eps * np.asarray(w)
    return np.max(np.abs(resid), axis=-1)


def ito_residual(y: Path, b: Path, w: Path, x0: float, mp: ModelParams, delta=None) -> float:
    p = _grid(y, b, w)
    return float(ito_residual_values(y.values, b.values, w.values, x0, mp, p.mesh, delta))


def empirical_sign_prob(terminal_values) -> McSummary:
    """Fraction of values ``>= 0`` with its binomial standard error."""
    v = np.asarray(terminal_values, dtype=float).ravel()
    if v.size == 0:
        raise ParameterError("empty sample")
    p = float(np.mean(v >= 0))
    se = math.sqrt(p * (1.0 - p) / v.size)
    return McSummary(p, se, int(v.size), p - Z95 * se, p + Z95 * se)


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance to a continuous cdf."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ParameterError("KS statistic needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ParameterError("KS samples must be finite")
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape:
        f = np.array([cdf(v) for v in x], dtype=float)
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_critical_1pct(n: int) -> float:
    """Asymptotic 1% critical value of the one-sample KS statistic."""
    return 1.63 / math.sqrt(n)


def negative_moment(terminal_values, a: float) -> McSummary:
    """Sample mean of ``|X|^a``; exact zeros contribute 0 by the ``|0|^a = 0`` convention."""
    v = np.asarray(terminal_values, dtype=float).ravel()
    return McSummary.from_samples(np.asarray(abs_pow(v, a)).reshape(-1))
