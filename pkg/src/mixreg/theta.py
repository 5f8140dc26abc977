"""Construction of the spatial weight ``theta``."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blur import BlurOperator, KernelSpec, apply, build_operator
from .exceptions import InvalidIntervalError
from .grid import Grid, Signal, format_real
from .penalizers import WeightField
from .regparam import MorozovSpec, RegularizationProblem, morozov_select

__all__ = [
    "ThetaRecipe",
    "DegenerateThetaWarning",
    "build_binary",
    "build_constant",
    "build_data_driven",
    "gradient_modulus",
    "write_theta_csv",
    "read_theta_csv",
]

_CLOSED = ("both", "left", "right", "neither")


class DegenerateThetaWarning(UserWarning):
    """The data-driven construction produced a flat profile; theta falls back to zero."""


def build_binary(grid: Grid, a: float, b: float, closed: str = "both") -> WeightField:
    """Indicator of the interval between ``a`` and ``b``.

    ``closed`` follows the pandas ``Interval`` convention and decides whether
    nodes that sit exactly on an endpoint are included.
    """
    if not (0.0 <= a < b <= 1.0):
        raise InvalidIntervalError(f"need 0 <= a < b <= 1, got a={a}, b={b}")
    if closed not in _CLOSED:
        raise ValueError(f"closed must be one of {_CLOSED}")
    t = grid.nodes
    left = t >= a if closed in ("both", "left") else t > a
    right = t <= b if closed in ("both", "right") else t < b
    return WeightField(grid, (left & right).astype(float))


def build_constant(grid: Grid, value: float) -> WeightField:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"constant theta must lie in [0, 1], got {value}")
    return WeightField.constant(grid, value)


def gradient_modulus(u: Signal) -> np.ndarray:
    """``|u[j+1] - u[j]| / h`` with the last entry repeated to length n+1."""
    m = np.abs(np.diff(u.values)) / u.grid.h
    return np.append(m, m[-1])


def build_data_driven(
    v: Signal,
    op: BlurOperator,
    sigma_smooth: float | None = None,
    morozov: MorozovSpec | None = None,
) -> WeightField:
    """Weight from the edges of a Tikhonov pre-solve.

    1. ``u`` = order-zero Tikhonov solution with Morozov-selected alpha;
    2. ``m`` = modulus of the forward-difference gradient of ``u``;
    3. ``s`` = ``m`` convolved with a Gaussian of width ``sigma_smooth``
       (default: the blur width), reflexive boundaries;
    4. ``theta = (s - min s) / (max s - min s)``.

    Flat data give a flat ``s``; theta is then identically zero and a
    :class:`DegenerateThetaWarning` is emitted.
    """
    if morozov is None:
        raise ValueError("build_data_driven needs a MorozovSpec (noise level) for the pre-solve")
    sigma_smooth = op.kernel.sigma_b if sigma_smooth is None else sigma_smooth
    grid = op.grid
    if np.ptp(v.values) == 0.0:
        # Tikhonov solutions of constant data are constant for every alpha
        warnings.warn("constant data: theta set to zero", DegenerateThetaWarning, stacklevel=2)
        return WeightField.constant(grid, 0.0)
    _, report = morozov_select(RegularizationProblem.tikhonov(v, op), morozov)
    m = Signal(grid, gradient_modulus(report.minimizer))
    s = apply(build_operator(grid, KernelSpec(sigma_smooth)), m).values
    lo, hi = s.min(), s.max()
    if hi == lo:
        warnings.warn("flat gradient profile: theta set to zero", DegenerateThetaWarning, stacklevel=2)
        return WeightField.constant(grid, 0.0)
    return WeightField(grid, np.clip((s - lo) / (hi - lo), 0.0, 1.0))


@dataclass(frozen=True)
class ThetaRecipe:
    """Declarative description of how to obtain theta for a method.

    kind ``binary_interval`` takes ``a``, ``b`` and optional ``closed``;
    ``indicator`` takes a list of ``intervals`` (union of closed intervals);
    ``constant`` takes ``value``; ``data_driven`` takes optional
    ``sigma_smooth``.
    """

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("binary_interval", "indicator", "data_driven", "constant")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown theta recipe {self.kind!r}; choose from {self.KINDS}")

    def build(self, v: Signal, op: BlurOperator, morozov: MorozovSpec | None = None) -> WeightField:
        p = self.params
        grid = op.grid
        if self.kind == "binary_interval":
            return build_binary(grid, p["a"], p["b"], p.get("closed", "both"))
        if self.kind == "indicator":
            theta = np.zeros(grid.size)
            for a, b in p["intervals"]:
                theta = np.maximum(theta, build_binary(grid, a, b).theta)
            return WeightField(grid, theta)
        if self.kind == "constant":
            return build_constant(grid, p["value"])
        return build_data_driven(v, op, p.get("sigma_smooth"), morozov)


def write_theta_csv(theta: WeightField, path=None) -> str:
    lines = ["t,theta"]
    lines += [f"{format_real(t)},{format_real(x)}" for t, x in zip(theta.grid.nodes, theta.theta)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_theta_csv(path, grid: Grid | None = None) -> WeightField:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    theta = np.array([float(r["theta"]) for r in rows])
    grid = grid or Grid(len(rows) - 1)
    return WeightField(grid, theta)
