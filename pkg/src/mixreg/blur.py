"""Dense Gaussian blurring operator with reflexive boundary conditions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erfcinv

from .exceptions import DimensionError
from .grid import Grid, Signal, format_real

__all__ = [
    "KernelSpec",
    "BlurOperator",
    "kernel_eval",
    "build_operator",
    "apply",
    "apply_adjoint",
    "TAIL_MASS",
]

# Gaussian mass allowed outside the extended quadrature window
TAIL_MASS = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    sigma_b: float

    def __post_init__(self):
        if not (self.sigma_b > 0 and math.isfinite(self.sigma_b)):
            raise ValueError(f"sigma_b must be positive and finite, got {self.sigma_b}")


def kernel_eval(spec: KernelSpec, t, s):
    """Gaussian point spread function ``k(t, s)``; broadcasts over arrays."""
    sb = spec.sigma_b
    return np.exp(-((np.asarray(t) - np.asarray(s)) ** 2) / (2 * sb * sb)) / (math.sqrt(2 * math.pi) * sb)


@dataclass(frozen=True, eq=False)
class BlurOperator:
    grid: Grid
    matrix: np.ndarray = field(repr=False)
    kernel: KernelSpec
    boundary: str = "reflexive"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.grid.size, self.grid.size):
            raise DimensionError(f"matrix shape {m.shape} does not match grid n={self.grid.n}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def to_csv(self, path=None) -> str:
        """Row-major ``i,j,value`` dump, mostly useful for debugging."""
        lines = ["i,j,value"]
        rows, cols = self.matrix.shape
        for i in range(rows):
            for j in range(cols):
                lines.append(f"{i},{j},{format_real(self.matrix[i, j])}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def _fold(m: np.ndarray, n: int) -> np.ndarray:
    # Half-sample mirror: index -1 -> 0, -2 -> 1, n+1 -> n, ...
    # Period 2(n+1) takes care of repeated reflections for very wide kernels.
    r = np.mod(m, 2 * (n + 1))
    return np.where(r <= n, r, 2 * n + 1 - r)


def build_operator(grid: Grid, spec: KernelSpec) -> BlurOperator:
    """Collocation/rectangle-rule discretization of the Gaussian convolution.

    Quadrature nodes are extended past both ends of [0, 1] far enough that the
    dropped Gaussian tail is below ``TAIL_MASS``; each outside node is mirrored
    about the half-sample point (-h/2 or 1 + h/2) onto an interior column.
    The result is symmetric (a Toeplitz-plus-Hankel matrix) with identical row
    sums, which are scaled to exactly one so that constants are preserved.
    """
    n, h = grid.n, grid.h
    t = grid.nodes
    z = math.sqrt(2.0) * float(erfcinv(TAIL_MASS))
    ext = int(math.ceil(z * spec.sigma_b / h)) + 1
    m = np.arange(-ext, n + 1 + ext)
    weights = h * kernel_eval(spec, t[:, None], m[None, :] * h)
    cols = _fold(m, n)
    A = np.zeros((n + 1, n + 1))
    for k, j in enumerate(cols):
        A[:, j] += weights[:, k]
    # every row sees the same set of offsets, so a single scale keeps symmetry
    offsets = np.arange(-ext - n, ext + n + 1)
    A /= np.sum(h * kernel_eval(spec, 0.0, offsets * h))
    return BlurOperator(grid, A, spec)


def _check(op: BlurOperator, f: Signal):
    if f.grid != op.grid:
        raise DimensionError(f"signal grid n={f.grid.n} does not match operator grid n={op.grid.n}")


def apply(op: BlurOperator, f: Signal) -> Signal:
    _check(op, f)
    return f.with_values(op.matrix @ f.values)


def apply_adjoint(op: BlurOperator, r: Signal) -> Signal:
    _check(op, r)
    return r.with_values(op.matrix.T @ r.values)
