"""Discrete penalizers and the mixed L2/TV objective.

Conventions
-----------
* Total variation carries no grid-spacing factor: ``sum |u[i+1] - u[i]|``.
* L2 quantities carry the quadrature weight ``h``: ``||x||^2 = h * sum x**2``.
* Edge weights are the arithmetic mean of the two endpoint weights.
* The smoothed absolute value is ``psi(d) = sqrt(d**2 + beta**2) - beta``, so
  ``psi(0) = 0`` and ``0 <= |d| - psi(d) <= beta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blur import BlurOperator
from .exceptions import DimensionError
from .grid import Grid
from .validation import check_same_grid, values_of

__all__ = [
    "WeightField",
    "PenalizerSpec",
    "default_beta",
    "difference_matrix",
    "tv_seminorm",
    "weighted_tv",
    "weighted_l2_sq",
    "objective",
    "gradient",
    "hessian",
    "laplacian_form",
]


@dataclass(frozen=True, eq=False)
class WeightField:
    """Spatial weight ``theta`` in [0, 1] sampled on the grid nodes.

    ``theta == 1`` selects pure (weighted) TV penalization, ``theta == 0``
    pure L2 penalization; intermediate values mix both.
    """

    grid: Grid
    theta: np.ndarray = field(repr=False)

    def __post_init__(self):
        th = np.array(self.theta, dtype=float, copy=True)
        if th.shape != (self.grid.size,):
            raise DimensionError(f"theta must have {self.grid.size} entries, got shape {th.shape}")
        if not np.all(np.isfinite(th)) or th.min() < 0.0 or th.max() > 1.0:
            raise ValueError("theta values must lie in [0, 1]")
        th.flags.writeable = False
        object.__setattr__(self, "theta", th)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "WeightField":
        return cls(grid, np.full(grid.size, float(value)))

    @property
    def edge_theta(self) -> np.ndarray:
        return 0.5 * (self.theta[:-1] + self.theta[1:])

    @property
    def zero_set(self) -> np.ndarray:
        """Indices where ``theta == 0`` (pure L2 region)."""
        return np.flatnonzero(self.theta == 0.0)

    @property
    def one_set(self) -> np.ndarray:
        """Indices where ``theta == 1`` (pure TV region)."""
        return np.flatnonzero(self.theta == 1.0)


@dataclass(frozen=True)
class PenalizerSpec:
    """Weights of the mixed functional.

    ``alpha1`` multiplies the weighted L2 term, ``alpha2`` the weighted TV
    term; ``beta`` is the TV smoothing parameter (amplitude units).  Zero
    alphas are allowed so that the pure methods are special cases.
    """

    alpha1: float
    alpha2: float
    theta: WeightField
    beta: float

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("alpha1 and alpha2 must be non-negative")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


def default_beta(v) -> float:
    """``1e-4 * range(v)``, falling back to ``1e-4`` for flat data."""
    x = values_of(v)
    r = float(x.max() - x.min())
    return 1e-4 * r if r > 0 else 1e-4


def difference_matrix(n: int) -> np.ndarray:
    """Forward differences, shape ``(n, n + 1)``."""
    return np.diff(np.eye(n + 1), axis=0)


def tv_seminorm(u) -> float:
    return float(np.sum(np.abs(np.diff(values_of(u)))))


def weighted_tv(u, theta: WeightField) -> float:
    check_same_grid(u, theta)
    return float(np.sum(theta.edge_theta * np.abs(np.diff(values_of(u)))))


def weighted_l2_sq(u, theta: WeightField) -> float:
    check_same_grid(u, theta)
    x = values_of(u)
    return float(theta.grid.h * np.sum((1.0 - theta.theta) * x * x))


def _smoothed_tv(d, edge, beta):
    return float(np.sum(edge * (np.sqrt(d * d + beta * beta) - beta)))


def objective(u, v, op: BlurOperator, spec: PenalizerSpec, smoothed: bool = True) -> float:
    """Value of ``||Au - v||^2 + alpha1 ||sqrt(1-theta) u||^2 + alpha2 W_theta(u)``.

    With ``smoothed=False`` the TV term uses ``|d|`` exactly; otherwise the
    smoothed ``psi_beta(d)``.  The two differ by at most ``alpha2 * n * beta``.
    """
    check_same_grid(u, v, spec.theta, op)
    x, y = values_of(u), values_of(v)
    h = op.grid.h
    r = op.matrix @ x - y
    value = h * float(r @ r) + spec.alpha1 * weighted_l2_sq(x, spec.theta)
    if spec.alpha2 > 0:
        d = np.diff(x)
        edge = spec.theta.edge_theta
        tv = _smoothed_tv(d, edge, spec.beta) if smoothed else float(np.sum(edge * np.abs(d)))
        value += spec.alpha2 * tv
    return value


def gradient(u, v, op: BlurOperator, spec: PenalizerSpec) -> np.ndarray:
    """Gradient of the smoothed objective with respect to the node values."""
    check_same_grid(u, v, spec.theta, op)
    x, y = values_of(u), values_of(v)
    h = op.grid.h
    A = op.matrix
    g = 2 * h * (A.T @ (A @ x - y)) + 2 * spec.alpha1 * h * (1.0 - spec.theta.theta) * x
    if spec.alpha2 > 0:
        d = np.diff(x)
        flux = spec.theta.edge_theta * d / np.sqrt(d * d + spec.beta**2)
        # L^T applied to flux
        g[:-1] -= spec.alpha2 * flux
        g[1:] += spec.alpha2 * flux
    return g


def hessian(u, op: BlurOperator, spec: PenalizerSpec) -> np.ndarray:
    """Hessian of the smoothed objective (dense, symmetric positive semidefinite)."""
    x = values_of(u)
    h = op.grid.h
    A = op.matrix
    H = 2 * h * (A.T @ A)
    H[np.diag_indices_from(H)] += 2 * spec.alpha1 * h * (1.0 - spec.theta.theta)
    if spec.alpha2 > 0:
        d = np.diff(x)
        s = np.sqrt(d * d + spec.beta**2)
        H += spec.alpha2 * laplacian_form(spec.theta.edge_theta * spec.beta**2 / s**3)
    return H


def laplacian_form(edge_weights: np.ndarray) -> np.ndarray:
    """``L^T diag(edge_weights) L`` for the forward-difference matrix ``L``."""
    w = np.asarray(edge_weights, dtype=float)
    m = w.shape[0] + 1
    M = np.zeros((m, m))
    idx = np.arange(m - 1)
    M[idx, idx] += w
    M[idx + 1, idx + 1] += w
    M[idx, idx + 1] -= w
    M[idx + 1, idx] -= w
    return M
