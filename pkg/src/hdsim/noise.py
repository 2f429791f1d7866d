"""Dyadic partitions and the driving noise: Brownian pairs, bridge
refinement and skew Brownian motion.

Every random draw comes from a Philox counter-based generator keyed by
``(seed, path_index, stream_id)``, so a path depends only on those numbers
and never on which worker produced it or in what order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ParameterError

MAX_LEVEL = 30

STREAM_B = 0
STREAM_W = 1
STREAM_SKEW_BM = 2
STREAM_SKEW_FLIP = 3
# refinement draws for (stream, level) live at stream + _REFINE_STRIDE * (level + 1)
_REFINE_STRIDE = 16

SKEW_METHODS = ("excursion_flip", "harrison_shepp")


@dataclass(frozen=True)
class Partition:
    """Dyadic grid ``t_k = k * t_end * 2**-level`` on ``[0, t_end]``."""

    t_end: float
    level: int

    def __post_init__(self):
        if not (isinstance(self.t_end, (int, float)) and math.isfinite(self.t_end) and self.t_end > 0):
            raise ParameterError(f"t_end must be a positive finite number, got {self.t_end!r}")
        if isinstance(self.level, bool) or not isinstance(self.level, (int, np.integer)):
            raise ParameterError(f"level must be an integer, got {self.level!r}")
        if not 0 <= self.level <= MAX_LEVEL:
            raise ParameterError(f"level must lie in [0, {MAX_LEVEL}], got {self.level}")
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "level", int(self.level))

    @property
    def n_steps(self) -> int:
        return 1 << self.level

    @property
    def mesh(self) -> float:
        return self.t_end / self.n_steps

    @cached_property
    def times(self) -> np.ndarray:
        t = np.arange(self.n_steps + 1, dtype=float) * self.mesh
        t[-1] = self.t_end
        t.flags.writeable = False
        return t

    def is_refined_by(self, other: "Partition") -> bool:
        return other.t_end == self.t_end and other.level >= self.level


@dataclass(frozen=True, eq=False)
class Path:
    """Values of one process on the points of a partition."""

    partition: Partition
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.partition.n_steps + 1,):
            raise ParameterError(
                f"path needs {self.partition.n_steps + 1} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ParameterError("path values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.partition.times

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class NoisePair:
    b: Path
    w: Path
    seed: int
    path_index: int

    def __post_init__(self):
        if self.b.partition != self.w.partition:
            raise ParameterError("b and w must share one partition")

    @property
    def partition(self) -> Partition:
        return self.b.partition


@dataclass(frozen=True)
class SkewParams:
    theta: float
    start: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and abs(self.theta) <= 1.0):
            raise ParameterError(f"skewness must satisfy |theta| <= 1, got theta={self.theta!r}")
        if not math.isfinite(self.start):
            raise ParameterError("skew BM start must be finite")


def make_partition(t_end: float, level: int) -> Partition:
    return Partition(t_end, level)


def rng(seed: int, path_index: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one ``(seed, path_index, stream)`` key."""
    seed, path_index, stream = int(seed), int(path_index), int(stream)
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= path_index < 2**48:
        raise ParameterError(f"path_index out of range: {path_index}")
    if not 0 <= stream < 2**16:
        raise ParameterError(f"stream id out of range: {stream}")
    key = np.array([seed, (path_index << 16) | stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def bm_increments(p: Partition, seed: int, path_index: int, stream: int) -> np.ndarray:
    return rng(seed, path_index, stream).standard_normal(p.n_steps) * math.sqrt(p.mesh)


def _cumulate(start: float, increments: np.ndarray) -> np.ndarray:
    out = np.empty(increments.shape[-1] + 1)
    out[0] = start
    np.cumsum(increments, out=out[1:])
    if start != 0.0:
        out[1:] += start
    return out


def sample_bm(p: Partition, seed: int, path_index: int, stream: int = STREAM_B, start: float = 0.0) -> Path:
    return Path(p, _cumulate(start, bm_increments(p, seed, path_index, stream)))


def sample_bm_pair(p: Partition, seed: int, path_index: int) -> NoisePair:
    b = sample_bm(p, seed, path_index, STREAM_B)
    w = sample_bm(p, seed, path_index, STREAM_W)
    return NoisePair(b, w, int(seed), int(path_index))


def refine_bridge(x: Path, target: Partition, *, seed: int = 0, path_index: int = 0,
                  stream: int = STREAM_B) -> Path:
    """Refine a Brownian grid path to a finer dyadic partition.

    Each dyadic level is filled in by Brownian-bridge midpoints drawn from
    the stream ``(seed, path_index, stream + 16 * (level + 1))``, so jumping
    several levels at once gives the same path as refining one level at a
    time. Values at the coarse grid times are copied unchanged.
    """
    coarse = x.partition
    if not coarse.is_refined_by(target):
        raise ParameterError(
            f"target (t_end={target.t_end}, level={target.level}) does not refine "
            f"(t_end={coarse.t_end}, level={coarse.level})"
        )
    v = x.values
    for level in range(coarse.level + 1, target.level + 1):
        half = target.t_end / (1 << level)
        g = rng(seed, path_index, stream + _REFINE_STRIDE * (level + 1))
        mid = 0.5 * (v[:-1] + v[1:]) + math.sqrt(0.5 * half) * g.standard_normal(v.shape[0] - 1)
        fine = np.empty(2 * v.shape[0] - 1)
        fine[0::2] = v
        fine[1::2] = mid
        v = fine
    return Path(target, v)


def refine_pair(noise: NoisePair, target: Partition) -> NoisePair:
    b = refine_bridge(noise.b, target, seed=noise.seed, path_index=noise.path_index, stream=STREAM_B)
    w = refine_bridge(noise.w, target, seed=noise.seed, path_index=noise.path_index, stream=STREAM_W)
    return NoisePair(b, w, noise.seed, noise.path_index)


def coupled_pairs(t_end: float, levels, seed: int, path_index: int) -> dict[int, NoisePair]:
    """One noise realization observed on several dyadic levels.

    The coarsest level is sampled directly and every finer level is a
    bridge refinement of it, which gives common random numbers across a
    mesh-refinement study.
    """
    levels = sorted(set(int(l) for l in levels))
    if not levels:
        raise ParameterError("at least one level is required")
    base = sample_bm_pair(Partition(t_end, levels[0]), seed, path_index)
    out = {levels[0]: base}
    prev = base
    for level in levels[1:]:
        prev = refine_pair(prev, Partition(t_end, level))
        out[level] = prev
    return out


def _excursion_flip(bm: np.ndarray, u: np.ndarray, theta: float) -> np.ndarray:
    """Resign every sign-constant stretch of ``bm`` that begins at a zero crossing.

    Works on a batch with paths along axis 0.
    """
    prev, cur = bm[:, :-1], bm[:, 1:]
    crossing = np.zeros(bm.shape, dtype=bool)
    crossing[:, 1:] = (prev * cur <= 0.0) & (prev != 0.0)
    # a path started at 0 begins with an excursion of undetermined sign
    crossing[:, 0] = bm[:, 0] == 0.0
    label = np.cumsum(crossing, axis=1)
    first_of = np.where(crossing, np.arange(bm.shape[1]), 0)
    # index at which each point's stretch began (0 for the unflipped prefix)
    start_idx = np.maximum.accumulate(first_of, axis=1)
    sign = np.where(np.take_along_axis(u, start_idx, axis=1) < 0.5 * (1.0 + theta), 1.0, -1.0)
    return np.where(label > 0, sign * np.abs(bm), bm)


def sample_skew_bm_batch(p: Partition, sp: SkewParams, seed: int, path_indices,
                         method: str = "excursion_flip") -> np.ndarray:
    """Skew BM grid paths for several path indices, shape ``(m, n_steps + 1)``."""
    if method not in SKEW_METHODS:
        raise ParameterError(f"unknown skew BM method {method!r}; expected one of {SKEW_METHODS}")
    path_indices = list(path_indices)
    n = p.n_steps
    if method == "excursion_flip":
        bm = np.stack([_cumulate(sp.start, bm_increments(p, seed, i, STREAM_SKEW_BM)) for i in path_indices])
        u = np.stack([rng(seed, i, STREAM_SKEW_FLIP).random(n + 1) for i in path_indices])
        return _excursion_flip(bm, u, sp.theta)
    h = math.sqrt(p.mesh)
    j0 = int(round(sp.start / h))
    u = np.stack([rng(seed, i, STREAM_SKEW_FLIP).random(n) for i in path_indices])
    walk = kernels.skew_walk(j0, u, 0.5 * (1.0 + sp.theta))
    return walk * h


def sample_skew_bm(p: Partition, sp: SkewParams, seed: int, path_index: int,
                   method: str = "excursion_flip") -> Path:
    """Grid approximation of skew Brownian motion started at ``sp.start``.

    ``excursion_flip`` simulates a Brownian path and gives every excursion
    that starts at a zero crossing the sign +1 with probability
    ``(1 + theta) / 2``. ``harrison_shepp`` runs a simple random walk with
    steps of ``sqrt(mesh)`` that leaves 0 upwards with that probability; its
    start is snapped to the nearest lattice point.
    """
    return Path(p, sample_skew_bm_batch(p, sp, seed, [path_index], method)[0])
