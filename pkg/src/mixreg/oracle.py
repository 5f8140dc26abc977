"""Brute-force reference computations for small problems.

Nothing here is used on the production path.  The dual-form TV evaluation
enumerates test fields exhaustively, and the global minimizer is a
multi-start damped Newton method written against its own copy of the
objective, so that agreement with :mod:`mixreg.penalizers` and
:mod:`mixreg.solver` is an independent check.
"""

from __future__ import annotations

import itertools

import numpy as np

from .blur import BlurOperator
from .exceptions import OracleSizeError
from .grid import Signal
from .penalizers import PenalizerSpec, WeightField

__all__ = ["dual_sup_weighted", "brute_minimize", "MAX_DUAL_N", "MAX_MINIMIZE_N"]

MAX_DUAL_N = 10
MAX_MINIMIZE_N = 8
_MAX_COMBINATIONS = 2_000_000


def dual_sup_weighted(u: Signal, theta: WeightField, grid_levels: int = 3) -> float:
    """Discrete dual form of the weighted TV.

    Maximizes ``sum_i (u[i+1] - u[i]) * theta_edge[i] * nu_i`` over every
    ``nu`` in ``{-1, ..., 1}^n`` with ``grid_levels`` equispaced levels per
    coordinate.
    """
    n = u.grid.n
    if n > MAX_DUAL_N:
        raise OracleSizeError(f"dual oracle limited to n <= {MAX_DUAL_N}, got n={n}")
    if grid_levels < 3:
        raise ValueError("grid_levels must be >= 3")
    if grid_levels**n > _MAX_COMBINATIONS:
        raise OracleSizeError(f"{grid_levels}**{n} test fields is too many")
    levels = np.linspace(-1.0, 1.0, grid_levels)
    pairing = np.diff(u.values) * theta.edge_theta
    best = -np.inf
    # chunk over the first coordinate to bound memory
    rest = np.array(list(itertools.product(levels, repeat=n - 1))).reshape(-1, n - 1)
    for first in levels:
        vals = first * pairing[0] + rest @ pairing[1:]
        best = max(best, float(vals.max()))
    return best


def _parts(op, spec):
    A = op.matrix
    h = op.grid.h
    c = 1.0 - spec.theta.theta
    e = spec.theta.edge_theta
    return A, h, c, e, spec.alpha1, spec.alpha2, spec.beta


def _f(x, y, parts):
    A, h, c, e, a1, a2, b = parts
    r = A @ x - y
    d = x[1:] - x[:-1]
    return h * r @ r + a1 * h * np.sum(c * x * x) + a2 * np.sum(e * (np.sqrt(d * d + b * b) - b))


def _grad_hess(x, y, parts):
    A, h, c, e, a1, a2, b = parts
    m = x.shape[0]
    d = x[1:] - x[:-1]
    s = np.sqrt(d * d + b * b)
    D = np.zeros((m - 1, m))
    D[np.arange(m - 1), np.arange(m - 1)] = -1.0
    D[np.arange(m - 1), np.arange(1, m)] = 1.0
    g = 2 * h * A.T @ (A @ x - y) + 2 * a1 * h * c * x + a2 * D.T @ (e * d / s)
    H = 2 * h * A.T @ A + np.diag(2 * a1 * h * c) + a2 * D.T @ np.diag(e * b * b / s**3) @ D
    return g, H


def _newton(x, y, parts, gtol, max_iter=2000):
    fx = _f(x, y, parts)
    for _ in range(max_iter):
        g, H = _grad_hess(x, y, parts)
        if np.max(np.abs(g)) <= gtol:
            break
        try:
            p = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            p = -g
        if g @ p >= 0:
            p = -g
        t = 1.0
        while t > 1e-20:
            xn = x + t * p
            fn = _f(xn, y, parts)
            if fn <= fx + 1e-4 * t * (g @ p):
                break
            t *= 0.5
        else:
            break
        stalled = np.linalg.norm(xn - x) <= 1e-15 * (1.0 + np.linalg.norm(x))
        x, fx = xn, fn
        if stalled:
            break
    return x, fx


def brute_minimize(
    v: Signal,
    op: BlurOperator,
    spec: PenalizerSpec,
    starts: int = 20,
    seed: int = 0,
    gtol: float = 1e-10,
    return_all: bool = False,
):
    """Global minimum of the smoothed functional by multi-start descent.

    Runs damped Newton with backtracking from ``starts`` random points plus the
    zero signal and the data itself, each until ``||grad||_inf <= gtol`` (or no
    further decrease is possible), and returns ``(u, objective)`` of the best
    run.  With ``return_all=True`` the objective of every start is returned as
    a third element.
    """
    n = v.grid.n
    if n > MAX_MINIMIZE_N:
        raise OracleSizeError(f"minimization oracle limited to n <= {MAX_MINIMIZE_N}, got n={n}")
    parts = _parts(op, spec)
    y = v.values
    rng = np.random.default_rng(seed)
    scale = max(float(np.max(np.abs(y))), 1.0)
    inits = [np.zeros_like(y), y.copy()] + [scale * rng.standard_normal(y.shape) for _ in range(starts)]
    results = [_newton(x0, y, parts, gtol) for x0 in inits]
    best = min(results, key=lambda r: r[1])
    out = (v.with_values(best[0]), float(best[1]))
    if return_all:
        return out + ([float(r[1]) for r in results],)
    return out
