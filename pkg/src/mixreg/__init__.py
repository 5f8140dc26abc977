"""Restoration of blurred, noisy 1D signals with a spatially mixed L2/TV penalizer.

The penalizer weighs an L2 term by ``1 - theta`` and a total-variation term by
``theta``, so a single functional can keep edges on one part of the domain and
smooth the rest.
"""

from types import ModuleType as _ModuleType

from .blur import BlurOperator, KernelSpec, apply, apply_adjoint, build_operator
from .estimator import MixedL2TVDeconvolver, estimate_noise_sigma
from .exceptions import (
    DegenerateRangeError,
    DimensionError,
    InvalidGridError,
    InvalidIntervalError,
    MixregError,
    NoBracketError,
    NonConvergenceError,
    OracleSizeError,
    UndefinedMetricError,
)
from .experiments import METHODS, ExperimentConfig, MethodResult, isnr, run_experiment, summary_csv
from .grid import Grid, NoiseSpec, Signal, add_noise, make_grid, read_signal_csv, synth_signal, write_signal_csv
from .oracle import brute_minimize, dual_sup_weighted
from .penalizers import PenalizerSpec, WeightField, gradient, objective, tv_seminorm, weighted_l2_sq, weighted_tv
from .regparam import MorozovSpec, RegularizationProblem, morozov_select, noise_delta
from .solver import SolveReport, SolverConfig, solve, solve_pure_tv, solve_tikhonov
from .theta import ThetaRecipe, build_binary, build_constant, build_data_driven

__version__ = "0.1.0"

__all__ = [
    name for name, obj in globals().items() if not name.startswith("_") and not isinstance(obj, _ModuleType)
]
