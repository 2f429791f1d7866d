"""Scale functions and coefficient maps of the regularized equation.

``sigma_eps(y) = sqrt(|y|^(2 alpha) + eps^2)`` and its Lamperti transform
``F_eps(x) = int_0^x dy / sigma_eps(y)`` together with the eps -> 0 limits
``F_0``, ``F_0^{-1}``, the plateau inverse ``F_{A,B}^{-1}``, the rotation
coefficients ``G_eps``, ``H_eps`` and the maximal Peano solution.

Conventions used everywhere: ``sign(0) = 0`` and ``|0|^a = 0`` for every
real ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import NumericalError, ParameterError

QUAD_TOL = 1e-10
INVERSE_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    eps: float = 0.0
    x0: float = 0.0
    theta: Optional[float] = None
    plateau_a: float = 0.0
    plateau_b: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "eps", "x0", "plateau_a", "plateau_b"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v)):
                raise ParameterError(f"{name} must be a finite real, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not -1.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (-1, 1), got {self.alpha}")
        if self.eps < 0:
            raise ParameterError(f"eps must be >= 0, got {self.eps}")
        if self.theta is not None:
            if not (math.isfinite(self.theta) and abs(self.theta) <= 1.0):
                raise ParameterError(f"skewness must satisfy |theta| <= 1, got theta={self.theta}")
            object.__setattr__(self, "theta", float(self.theta))
        if self.plateau_a < 0 or self.plateau_b < 0:
            raise ParameterError("plateau bounds A, B must be >= 0")

    def require_unit_alpha(self, what: str = "this operation"):
        """Uniqueness and selection results are stated for alpha in (0, 1) only."""
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"{what} requires alpha in (0, 1), got alpha={self.alpha}")

    def require_positive_eps(self, what: str = "this operation"):
        if not self.eps > 0:
            raise ParameterError(f"{what} requires eps > 0, got eps={self.eps}")


def _out(r):
    return float(r) if np.ndim(r) == 0 else r


def sign(x):
    return _out(np.sign(np.asarray(x, dtype=float)))


def abs_pow(y, a):
    """``|y|^a`` with ``|0|^a = 0``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.power(np.abs(y), a)
    return _out(np.where(y == 0.0, 0.0, r))


def signed_pow(y, a):
    """``(y)^a = |y|^a sign(y)``."""
    y = np.asarray(y, dtype=float)
    return _out(np.asarray(abs_pow(y, a)) * np.sign(y))


def _sigma(y, alpha, eps):
    return np.hypot(abs_pow(y, alpha), eps)


def sigma_eps(y, mp: ModelParams):
    return _out(_sigma(y, mp.alpha, mp.eps))


def _inv_sigma_density(alpha, eps):
    """Integrand ``1/sigma_eps`` on y > 0; at 0 its right limit is used."""
    if alpha > 0:
        at0 = 1.0 / eps
    elif alpha == 0:
        at0 = 1.0 / math.sqrt(1.0 + eps * eps)
    else:
        at0 = 0.0

    def f(y):
        if y == 0.0:
            return at0
        return 1.0 / math.hypot(y ** alpha, eps)

    return f


def _quad(f, a, b, tol, x):
    res = integrate.quad(f, a, b, epsabs=0.01 * tol, epsrel=1e-13, limit=200, full_output=1)
    val, err = res[0], res[1]
    # a fourth element is QUADPACK's warning text; accept it if the error is still in budget
    if len(res) > 3 and not err <= tol:
        raise NumericalError("quadrature for F_eps did not converge",
                             x=x, interval=(a, b), abserr=err, detail=res[3])
    return val


def f0(x, alpha):
    """``F_0(x) = |x|^(1-alpha) sign(x) / (1 - alpha)``."""
    if not alpha < 1:
        raise ParameterError(f"F_0 needs alpha < 1, got {alpha}")
    return _out(np.asarray(signed_pow(x, 1.0 - alpha)) / (1.0 - alpha))


def f0_inv(u, alpha):
    """``F_0^{-1}(u) = |(1-alpha) u|^(1/(1-alpha)) sign(u)``."""
    if not alpha < 1:
        raise ParameterError(f"F_0 needs alpha < 1, got {alpha}")
    u = np.asarray(u, dtype=float)
    return _out(np.asarray(signed_pow((1.0 - alpha) * u, 1.0 / (1.0 - alpha))))


def _f_eps_scalar(x, alpha, eps, tol):
    if x == 0.0:
        return 0.0
    ax = abs(x)
    f = _inv_sigma_density(alpha, eps)
    val = _quad(f, 0.0, min(ax, 1.0), tol, x)
    # decade pieces keep QAGS away from its extrapolation failure on long ranges
    lo = 1.0
    while lo < ax:
        hi = min(10.0 * lo, ax)
        val += _quad(f, lo, hi, tol, x)
        lo = hi
    return math.copysign(val, x)


def f_eps(x, mp: ModelParams, tol: float = QUAD_TOL):
    """Lamperti transform ``F_eps(x)`` by adaptive quadrature.

    With ``eps = 0`` the closed-form limit ``F_0`` is returned. Arrays are
    accepted but evaluated point by point; use :func:`transform_table` for
    bulk evaluation.
    """
    if mp.eps == 0:
        return f0(x, mp.alpha)
    if np.ndim(x) == 0:
        return _f_eps_scalar(float(x), mp.alpha, mp.eps, tol)
    return np.vectorize(lambda v: _f_eps_scalar(float(v), mp.alpha, mp.eps, tol), otypes=[float])(x)


def _f_eps_inv_scalar(u, alpha, eps, tol):
    if u == 0.0:
        return 0.0
    target = abs(u)
    # F_eps <= F_0 on (0, inf), so F_eps^{-1} >= F_0^{-1} there
    lo = float(f0_inv(target, alpha))
    f_lo = _f_eps_scalar(lo, alpha, eps, tol) if lo > 0 else 0.0
    if f_lo >= target:
        return math.copysign(lo, u)
    hi = max(2.0 * lo, target * eps, 1e-300)
    f_hi = _f_eps_scalar(hi, alpha, eps, tol)
    expansions = 0
    while f_hi < target:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = _f_eps_scalar(hi, alpha, eps, tol)
        expansions += 1
        if expansions > 2000 or not math.isfinite(hi):
            raise NumericalError("could not bracket F_eps^{-1}", u=u, alpha=alpha, eps=eps)
    y = lo + (hi - lo) * (target - f_lo) / (f_hi - f_lo)
    for _ in range(200):
        fy = _f_eps_scalar(y, alpha, eps, tol)
        r = fy - target
        if r > 0:
            hi = y
        else:
            lo = y
        if r == 0.0:
            return math.copysign(y, u)
        y_new = y - r * float(_sigma(y, alpha, eps))
        if not lo <= y_new <= hi:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= INVERSE_TOL * max(1.0, abs(y)):
            return math.copysign(y_new, u)
        y = y_new
    raise NumericalError("F_eps^{-1} iteration did not converge", u=u, bracket=(lo, hi))


def f_eps_inv(u, mp: ModelParams, tol: float = QUAD_TOL):
    """Inverse Lamperti transform by safeguarded Newton iteration on a bracket."""
    mp.require_positive_eps("F_eps^{-1}")
    if np.ndim(u) == 0:
        return _f_eps_inv_scalar(float(u), mp.alpha, mp.eps, tol)
    return np.vectorize(lambda v: _f_eps_inv_scalar(float(v), mp.alpha, mp.eps, tol), otypes=[float])(u)


def f_ab_inv(u, alpha, a, b):
    """Limit inverse transform of the plateau regularization.

    Zero on ``[-a, b]``, ``-|(1-alpha)(u+a)|^(1/(1-alpha))`` left of it and
    ``|(1-alpha)(u-b)|^(1/(1-alpha))`` right of it.
    """
    if a < 0 or b < 0:
        raise ParameterError("plateau bounds must be >= 0")
    u = np.asarray(u, dtype=float)
    p = 1.0 / (1.0 - alpha)
    left = -abs_pow((1.0 - alpha) * (u + a), p)
    right = abs_pow((1.0 - alpha) * (u - b), p)
    return _out(np.where(u < -a, left, np.where(u > b, right, 0.0)))


def rotation_coeffs(y, mp: ModelParams):
    """``(G_eps(y), H_eps(y)) = (|y|^alpha, eps) / sigma_eps(y)``."""
    mp.require_positive_eps("rotation coefficients")
    a = np.asarray(abs_pow(y, mp.alpha))
    s = np.hypot(a, mp.eps)
    return _out(a / s), _out(mp.eps / s)


def rotation_bound(y1, y2, mp: ModelParams):
    """Both sides of the Lipschitz-type bound on the rotation coefficients.

    Returns ``(lhs, rhs)`` with ``lhs = |dG|^2 + |dH|^2`` and
    ``rhs = (4 eps^2 + 1) / eps^2 * min(| |y1|^alpha - |y2|^alpha |^2, 1)``.
    """
    g1, h1 = rotation_coeffs(y1, mp)
    g2, h2 = rotation_coeffs(y2, mp)
    lhs = (np.asarray(g1) - g2) ** 2 + (np.asarray(h1) - h2) ** 2
    d = np.asarray(abs_pow(y1, mp.alpha)) - np.asarray(abs_pow(y2, mp.alpha))
    const = (4.0 * mp.eps ** 2 + 1.0) / mp.eps ** 2
    return _out(lhs), _out(const * np.minimum(d * d, 1.0))


def peano_maximal_solution(t, x, alpha):
    """Maximal solution of ``x' = |x|^alpha`` that spends zero time at 0."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"maximal Peano solution needs alpha in (0, 1), got {alpha}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("t must be >= 0")
    q = 1.0 - alpha
    p = 1.0 / q
    if not np.any(t):
        return _out(np.full(t.shape, float(x)))
    if x > 0:
        return _out((q * t + x ** q) ** p)
    ax = abs(x) ** q
    down = np.maximum(ax - q * t, 0.0) ** p
    up = np.maximum(q * t - ax, 0.0) ** p
    return _out(up - down)


# ---------------------------------------------------------------------------
# tabulated transform for bulk evaluation

TABLE_NODES = 4096
TABLE_X_MIN = 1e-10
TABLE_X_MAX = 1e6

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True, eq=False)
class TransformTable:
    """Cached ``F_eps`` on log-spaced abscissae with cubic Hermite interpolation.

    Node slopes are the exact derivatives ``1/sigma_eps`` (and ``sigma_eps``
    for the inverse), which keeps the interpolant monotone and accurate to
    ~1e-11 relative. Arguments outside ``[TABLE_X_MIN, TABLE_X_MAX]`` in
    absolute value go through the quadrature slow path.
    """

    params: ModelParams
    abscissae: np.ndarray
    f_values: np.ndarray
    quadrature_tol: float
    _fwd: CubicHermiteSpline
    _inv: CubicHermiteSpline

    def f(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.zeros_like(x)
        lo, hi = self.abscissae[0], self.abscissae[-1]
        inside = (ax >= lo) & (ax <= hi)
        out[inside] = self._fwd(ax[inside])
        slow = ~inside & (ax != 0.0)
        if np.any(slow):
            p = self.params
            out[slow] = [_f_eps_scalar(v, p.alpha, p.eps, self.quadrature_tol) for v in ax[slow]]
        return _out(np.copysign(out, x))

    def f_inv(self, u):
        u = np.asarray(u, dtype=float)
        au = np.abs(u)
        out = np.zeros_like(u)
        lo, hi = self.f_values[0], self.f_values[-1]
        inside = (au >= lo) & (au <= hi)
        out[inside] = self._inv(au[inside])
        slow = ~inside & (au != 0.0)
        if np.any(slow):
            p = self.params
            out[slow] = [_f_eps_inv_scalar(v, p.alpha, p.eps, self.quadrature_tol) for v in au[slow]]
        return _out(np.copysign(out, u))


def _build_table(alpha, eps, tol):
    mp = ModelParams(alpha=alpha, eps=eps)
    x = np.logspace(math.log10(TABLE_X_MIN), math.log10(TABLE_X_MAX), TABLE_NODES)
    a, b = x[:-1], x[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    pieces = (half[:, None] * _GL_W[None, :] / _sigma(pts, alpha, eps)).sum(axis=1)
    fx = np.empty_like(x)
    fx[0] = _f_eps_scalar(x[0], alpha, eps, tol)
    fx[1:] = fx[0] + np.cumsum(pieces)
    if not np.all(np.diff(fx) > 0):
        raise NumericalError("tabulated F_eps is not strictly increasing", alpha=alpha, eps=eps)
    sig = _sigma(x, alpha, eps)
    x.flags.writeable = False
    fx.flags.writeable = False
    return TransformTable(mp, x, fx, tol, CubicHermiteSpline(x, fx, 1.0 / sig), CubicHermiteSpline(fx, x, sig))


@lru_cache(maxsize=64)
def _cached_table(alpha, eps, tol):
    return _build_table(alpha, eps, tol)


def transform_table(mp: ModelParams, tol: float = QUAD_TOL) -> TransformTable:
    mp.require_positive_eps("tabulated F_eps")
    return _cached_table(mp.alpha, mp.eps, tol)
