"""scikit-learn compatible front end.

:class:`MixedL2TVDeconvolver` wraps the whole pipeline (operator, weight,
parameter choice, solve) behind ``fit`` / ``transform``.  A "sample" is one
sampled signal on the uniform grid over [0, 1], so ``X`` is either a 1D array
of ``n + 1`` values or a 2D array with one signal per row.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .blur import KernelSpec, build_operator
from .experiments import isnr
from .grid import Grid, Signal
from .penalizers import WeightField
from .regparam import MorozovSpec, RegularizationProblem, morozov_select, noise_delta
from .solver import SolverConfig
from .theta import build_binary, build_data_driven
from .validation import check_signal_array

__all__ = ["MixedL2TVDeconvolver", "estimate_noise_sigma"]

_METHODS = ("tikhonov", "tv", "mixed")


def estimate_noise_sigma(v) -> float:
    """Robust noise level from second differences (median absolute deviation).

    Blurred signals are smooth, so second differences are dominated by noise;
    for white noise their standard deviation is ``sqrt(6) * sigma``.
    """
    d = np.diff(np.asarray(v, dtype=float), 2)
    mad = np.median(np.abs(d - np.median(d)))
    return float(mad / 0.6744897501960817 / np.sqrt(6.0))


class MixedL2TVDeconvolver(TransformerMixin, BaseEstimator):
    """Restore a blurred, noisy 1D signal with a spatially mixed L2/TV penalty.

    Parameters
    ----------
    sigma_b : float, default=0.05
        Width of the Gaussian blur, in units of the [0, 1] domain.
    method : {"mixed", "tikhonov", "tv"}, default="mixed"
    theta : "auto", float, (a, b) tuple or array, default="auto"
        Weight for ``method="mixed"``.  ``"auto"`` builds it from a Tikhonov
        pre-solve; a float gives a constant weight; a pair gives the
        indicator of ``[a, b]``; an array is used as is.
    alpha : float or None, default=None
        Fixed regularization strength.  ``None`` selects it by the
        discrepancy principle.
    noise_sigma : float or None, default=None
        Standard deviation of the noise.  Estimated from the data if None.
    tau : float, default=1.1
    coupling : {"normalized", "equal"}, default="normalized"
    beta : float or None, default=None
        TV smoothing; defaults to ``1e-4 * range(X)``.
    sigma_smooth : float or None, default=None
        Smoothing width for ``theta="auto"``; defaults to ``sigma_b``.
    max_iter : int, default=200
    tol : float, default=1e-8
    scheme : {"newton", "lagged_diffusivity"}, default="newton"

    Attributes
    ----------
    alpha_ : float
    theta_ : ndarray of shape (n + 1,)
    restored_ : ndarray of shape (n + 1,)
        Restoration of the signal passed to ``fit``.
    report_ : SolveReport
    n_iter_ : int
    discrepancy_ : float
    noise_sigma_ : float
    operator_ : BlurOperator
    """

    def __init__(
        self,
        sigma_b=0.05,
        method="mixed",
        theta="auto",
        alpha=None,
        noise_sigma=None,
        tau=1.1,
        coupling="normalized",
        beta=None,
        sigma_smooth=None,
        max_iter=200,
        tol=1e-8,
        scheme="newton",
    ):
        self.sigma_b = sigma_b
        self.method = method
        self.theta = theta
        self.alpha = alpha
        self.noise_sigma = noise_sigma
        self.tau = tau
        self.coupling = coupling
        self.beta = beta
        self.sigma_smooth = sigma_smooth
        self.max_iter = max_iter
        self.tol = tol
        self.scheme = scheme

    def _single(self, X):
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2:
            if arr.shape[0] != 1:
                raise ValueError(f"fit expects a single signal, got {arr.shape[0]} rows")
            arr = arr[0]
        return check_signal_array(arr)

    def _solver(self):
        return SolverConfig(max_iters=self.max_iter, rel_change_tol=self.tol, scheme=self.scheme)

    def _theta_field(self, v, morozov):
        grid = v.grid
        th = self.theta
        if isinstance(th, str):
            if th != "auto":
                raise ValueError(f"theta must be 'auto', a number, an interval or an array; got {th!r}")
            return build_data_driven(v, self.operator_, self.sigma_smooth, morozov)
        if np.isscalar(th):
            return WeightField.constant(grid, float(th))
        arr = np.asarray(th, dtype=float)
        if arr.shape == (2,) and grid.size != 2:
            return build_binary(grid, float(arr[0]), float(arr[1]))
        return WeightField(grid, arr)

    def _problem(self, v, theta):
        if self.method == "tikhonov":
            return RegularizationProblem.tikhonov(v, self.operator_)
        if self.method == "tv":
            return RegularizationProblem.pure_tv(v, self.operator_, self.beta, self._solver())
        return RegularizationProblem.mixed(v, self.operator_, theta, self.coupling, self.beta, self._solver())

    def fit(self, X, y=None):
        """Choose the weight and regularization strength for the signal ``X``."""
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        x = self._single(X)
        grid = Grid(x.shape[0] - 1)
        v = Signal(grid, x)
        self.operator_ = build_operator(grid, KernelSpec(self.sigma_b))
        sigma = self.noise_sigma if self.noise_sigma is not None else estimate_noise_sigma(x)
        self.noise_sigma_ = float(sigma)
        morozov = None
        if self.alpha is None or (self.method == "mixed" and isinstance(self.theta, str)):
            morozov = MorozovSpec(delta=noise_delta(self.noise_sigma_, grid), tau=self.tau)

        theta = self._theta_field(v, morozov) if self.method == "mixed" else None
        problem = self._problem(v, theta)
        if self.alpha is None:
            alpha, report = morozov_select(problem, morozov)
        else:
            alpha, report = float(self.alpha), problem.solve(float(self.alpha))

        self.problem_ = problem
        self.alpha_ = alpha
        self.theta_ = None if theta is None else np.array(theta.theta)
        self.report_ = report
        self.restored_ = np.array(report.minimizer.values)
        self.n_iter_ = report.iterations
        self.discrepancy_ = report.discrepancy
        self.n_features_in_ = grid.size
        return self

    def transform(self, X):
        """Restore ``X`` with the fitted weight and regularization strength."""
        check_is_fitted(self, "alpha_")
        arr = np.asarray(X, dtype=float)
        rows = arr[None, :] if arr.ndim == 1 else arr
        if rows.ndim != 2 or rows.shape[1] != self.n_features_in_:
            raise ValueError(f"X must have {self.n_features_in_} samples per signal, got shape {arr.shape}")
        grid = self.operator_.grid
        out = np.empty_like(rows)
        for i, row in enumerate(rows):
            v = Signal(grid, check_signal_array(row))
            # only the data change; scaling and theta stay as fitted
            p = self.problem_
            problem = RegularizationProblem(v, p.op, p.theta, p.l2_scale, p.tv_scale, p.beta, p.solver)
            out[i] = problem.solve(self.alpha_).minimizer.values
        return out[0] if arr.ndim == 1 else out

    def fit_transform(self, X, y=None, **fit_params):
        restored = self.fit(X, y).restored_.copy()
        return restored if np.asarray(X).ndim == 1 else restored[None, :]

    def predict(self, X):
        return self.transform(X)

    def score(self, X, y):
        """ISNR (dB) of the restoration of ``X`` against the true signal ``y``."""
        return isnr(np.ravel(y), np.ravel(X), np.ravel(self.transform(X)))
