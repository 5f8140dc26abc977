"""Regularization parameter choice by Morozov's discrepancy principle.

A :class:`RegularizationProblem` maps one scalar ``alpha`` to a concrete
penalizer.  For the mixed functional the L2 and TV parts are scaled by
``l2_scale`` and ``tv_scale``; with ``coupling="normalized"`` (the default)
these are ``1 / ||v||^2`` and ``1 / TV(v)``, which makes both parts
dimensionless and comparable in size at the data.  ``coupling="equal"`` uses
``alpha1 = alpha2 = alpha``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

from .blur import BlurOperator
from .exceptions import NoBracketError
from .grid import Grid, Signal
from .penalizers import PenalizerSpec, WeightField, default_beta, tv_seminorm
from .solver import SolveReport, SolverConfig, solve, solve_tikhonov

__all__ = [
    "MorozovSpec",
    "RegularizationProblem",
    "COUPLINGS",
    "noise_delta",
    "discrepancy",
    "morozov_select",
]

log = logging.getLogger(__name__)

COUPLINGS = ("normalized", "equal")


def noise_delta(sigma: float, grid: Grid) -> float:
    """Expected h-weighted norm of i.i.d. noise with standard deviation ``sigma``."""
    return sigma * math.sqrt(grid.h * grid.size)


@dataclass(frozen=True)
class MorozovSpec:
    delta: float
    tau: float = 1.1
    log_alpha_range: tuple = (-12.0, 4.0)
    bisect_tol: float = 1e-3
    max_bisections: int = 60

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        low, high = self.log_alpha_range
        if not low < high:
            raise ValueError("log_alpha_range must satisfy low < high")
        object.__setattr__(self, "log_alpha_range", (float(low), float(high)))

    @property
    def target(self) -> float:
        return self.tau * self.delta


@dataclass(frozen=True, eq=False)
class RegularizationProblem:
    """One-parameter family of regularized problems ``alpha -> u_alpha``.

    ``theta=None`` means plain order-zero Tikhonov, solved in closed form.
    """

    v: Signal
    op: BlurOperator
    theta: WeightField | None = None
    l2_scale: float = 1.0
    tv_scale: float = 1.0
    beta: float | None = None
    solver: SolverConfig = SolverConfig()

    @classmethod
    def tikhonov(cls, v, op):
        return cls(v, op, None, 1.0, 0.0)

    @classmethod
    def pure_tv(cls, v, op, beta=None, solver=None):
        return cls(v, op, WeightField.constant(op.grid, 1.0), 0.0, 1.0, beta, solver or SolverConfig())

    @classmethod
    def mixed(cls, v, op, theta, coupling="normalized", beta=None, solver=None):
        if coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}, got {coupling!r}")
        if coupling == "equal":
            l2, tv = 1.0, 1.0
        else:
            norm_sq = v.grid.h * float(v.values @ v.values)
            total_var = tv_seminorm(v)
            l2 = 1.0 / norm_sq if norm_sq > 0 else 1.0
            tv = 1.0 / total_var if total_var > 0 else 1.0
        return cls(v, op, theta, l2, tv, beta, solver or SolverConfig())

    def penalizer(self, alpha: float) -> PenalizerSpec:
        theta = self.theta if self.theta is not None else WeightField.constant(self.op.grid, 0.0)
        beta = self.beta if self.beta is not None else default_beta(self.v)
        return PenalizerSpec(alpha * self.l2_scale, alpha * self.tv_scale, theta, beta)

    def solve(self, alpha: float, init: Signal | None = None) -> SolveReport:
        if self.theta is None:
            return solve_tikhonov(self.v, self.op, alpha * self.l2_scale)
        return solve(self.v, self.op, self.penalizer(alpha), self.solver, init)


def discrepancy(alpha: float, problem: RegularizationProblem) -> float:
    """``||A u_alpha - v||`` in the h-weighted norm."""
    return problem.solve(alpha).discrepancy


def morozov_select(problem: RegularizationProblem, spec: MorozovSpec) -> tuple[float, SolveReport]:
    """Bisect on ``log10(alpha)`` until ``||A u_alpha - v|| = tau * delta``.

    Stops once ``|discrepancy - tau*delta| <= bisect_tol * tau*delta`` or after
    ``max_bisections`` halvings.  Non-monotone discrepancy values and an
    exhausted budget are recorded in the returned report's ``warnings``.

    Raises
    ------
    NoBracketError
        If the discrepancy at the two ends of ``log_alpha_range`` does not
        straddle the target.
    """
    target = spec.target
    low, high = spec.log_alpha_range
    rep_lo = problem.solve(10.0**low)
    rep_hi = problem.solve(10.0**high)
    d_lo, d_hi = rep_lo.discrepancy, rep_hi.discrepancy
    if not (d_lo < target < d_hi):
        raise NoBracketError(
            f"discrepancy does not bracket tau*delta={target:.6g}: "
            f"d(1e{low:g})={d_lo:.6g}, d(1e{high:g})={d_hi:.6g}",
            d_lo,
            d_hi,
            target,
        )
    notes = []
    prev = rep_lo
    for i in range(1, spec.max_bisections + 1):
        mid = 0.5 * (low + high)
        alpha = 10.0**mid
        rep = problem.solve(alpha, init=prev.minimizer)
        d = rep.discrepancy
        log.debug("bisection %d: alpha=%.6g discrepancy=%.6g target=%.6g", i, alpha, d, target)
        if d < d_lo - 1e-6 or d > d_hi + 1e-6:
            notes.append(f"non-monotone discrepancy at alpha={alpha:.6g}: {d:.6g} outside [{d_lo:.6g}, {d_hi:.6g}]")
            log.warning(notes[-1])
        if abs(d - target) <= spec.bisect_tol * target:
            return alpha, _annotate(rep, notes)
        if d < target:
            low, d_lo = mid, d
        else:
            high, d_hi = mid, d
        prev = rep
    notes.append(f"bisection budget of {spec.max_bisections} exhausted; |d - tau*delta| = {abs(d - target):.3g}")
    log.warning(notes[-1])
    return alpha, _annotate(rep, notes)


def _annotate(rep: SolveReport, notes) -> SolveReport:
    return replace(rep, warnings=rep.warnings + tuple(notes)) if notes else rep
