"""Simulation of ``dX = |X|^alpha o dB + eps dW`` and Monte Carlo checks of its limit behaviour."""

from .errors import HdsimError, NumericalError, ParameterError
from .estimate import McSummary
from .exact import benchmark_path, regularized_exact_path, weak_solution_triple
from .harness import ExperimentConfig, ExperimentReport, run_experiment
from .integrate import SchemeConfig, euler_maruyama_ito, heun_stratonovich
from .kernels import BACKEND
from .lamperti import ModelParams, f0, f0_inv, f_eps, f_eps_inv, transform_table
from .noise import NoisePair, Partition, Path, make_partition, sample_bm, sample_bm_pair

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ExperimentConfig", "ExperimentReport", "HdsimError", "McSummary", "ModelParams",
    "NoisePair", "NumericalError", "ParameterError", "Partition", "Path", "SchemeConfig",
    "benchmark_path", "euler_maruyama_ito", "f0", "f0_inv", "f_eps", "f_eps_inv",
    "heun_stratonovich", "make_partition", "regularized_exact_path", "run_experiment",
    "sample_bm", "sample_bm_pair", "transform_table", "weak_solution_triple",
]
