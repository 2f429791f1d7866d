"""Time stepping for the regularized equation and discrete stochastic integrals.

Two formulations are integrated on the noise grid:

* Ito form, Euler-Maruyama::

    Y_{k+1} = Y_k + |Y_k|^a dB_k + (a/2) (Y_k)^(2a-1) dt + eps dW_k

* Stratonovich form, Heun predictor-corrector::

    P       = Y_k + |Y_k|^a dB_k + eps dW_k
    Y_{k+1} = Y_k + (|Y_k|^a + |P|^a) / 2 dB_k + eps dW_k

The inner loops live in :mod:`hdsim.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericalError, ParameterError
from .lamperti import ModelParams
from .noise import NoisePair, Partition, Path

SCHEMES = ("euler_ito", "heun_stratonovich")
TAMINGS = ("none", "clip")


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "euler_ito"
    taming: str = "none"
    clip_scale: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.taming not in TAMINGS:
            raise ParameterError(f"unknown taming {self.taming!r}; expected one of {TAMINGS}")
        if not self.clip_scale > 0:
            raise ParameterError("clip_scale must be > 0")


def _check_stochastic_grid(p: Partition):
    if p.level == 0:
        raise ParameterError("a level-0 partition has a single step; use level >= 1")


def _drift_cap(p: Partition, mp: ModelParams, cfg: SchemeConfig) -> float:
    if mp.alpha < 0 and cfg.taming != "clip":
        raise ParameterError(
            f"alpha={mp.alpha} < 0 makes the drift non-integrable at 0; use taming='clip'"
        )
    if cfg.taming == "clip":
        return cfg.clip_scale / math.sqrt(p.mesh)
    return math.inf


def _raise_bad(bad, scheme):
    idx = np.flatnonzero(bad >= 0)
    if idx.size:
        i = int(idx[0])
        raise NumericalError(f"{scheme} produced a non-finite value", path=i, step=int(bad[i]))


def euler_values(x0, db, dw, p: Partition, mp: ModelParams, cfg: SchemeConfig = SchemeConfig()):
    """Euler-Maruyama on a batch of increments, shape ``(m, n)`` -> ``(m, n + 1)``."""
    _check_stochastic_grid(p)
    cap = _drift_cap(p, mp, cfg)
    y, bad = kernels.euler_ito(x0, np.atleast_2d(db), np.atleast_2d(dw), p.mesh, mp.alpha, mp.eps, cap)
    _raise_bad(bad, "euler_maruyama_ito")
    return y


def heun_values(x0, db, dw, p: Partition, mp: ModelParams):
    _check_stochastic_grid(p)
    if not 0.0 <= mp.alpha < 1.0:
        raise ParameterError(f"heun_stratonovich needs alpha in [0, 1), got {mp.alpha}")
    y, bad = kernels.heun_strat(x0, np.atleast_2d(db), np.atleast_2d(dw), mp.alpha, mp.eps)
    _raise_bad(bad, "heun_stratonovich")
    return y


def euler_maruyama_ito(noise: NoisePair, x0: float, mp: ModelParams,
                       cfg: SchemeConfig = SchemeConfig()) -> Path:
    p = noise.partition
    y = euler_values(x0, noise.b.increments(), noise.w.increments(), p, mp, cfg)
    return Path(p, y[0])


def heun_stratonovich(noise: NoisePair, x0: float, mp: ModelParams,
                      cfg: SchemeConfig = SchemeConfig(scheme="heun_stratonovich")) -> Path:
    p = noise.partition
    y = heun_values(x0, noise.b.increments(), noise.w.increments(), p, mp)
    return Path(p, y[0])


def solve(noise: NoisePair, x0: float, mp: ModelParams, cfg: SchemeConfig) -> Path:
    if cfg.scheme == "heun_stratonovich":
        return heun_stratonovich(noise, x0, mp, cfg)
    return euler_maruyama_ito(noise, x0, mp, cfg)


def _pair(x: Path, y: Path):
    if x.partition != y.partition:
        raise ParameterError("integrand and integrator must share one partition")
    return x.partition


def _partial_sums(terms):
    out = np.zeros(terms.shape[0] + 1)
    np.cumsum(terms, out=out[1:])
    return out


def ito_sum(integrand: Path, integrator: Path) -> Path:
    """Left-endpoint sums ``sum_{t_k < t} X_{t_k} (Y_{t_{k+1}} - Y_{t_k})`` at every grid time."""
    p = _pair(integrand, integrator)
    return Path(p, _partial_sums(integrand.values[:-1] * np.diff(integrator.values)))


def stratonovich_sum(integrand: Path, integrator: Path) -> Path:
    """Symmetric sums ``sum 1/2 (X_{t_{k+1}} + X_{t_k}) (Y_{t_{k+1}} - Y_{t_k})``."""
    p = _pair(integrand, integrator)
    x = integrand.values
    return Path(p, _partial_sums(0.5 * (x[1:] + x[:-1]) * np.diff(integrator.values)))
