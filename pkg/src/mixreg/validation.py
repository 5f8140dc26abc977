"""Input validation helpers shared by the library functions and the estimator."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError
from .grid import Grid, Signal

__all__ = ["values_of", "check_same_grid", "as_signal", "check_signal_array"]


def values_of(obj) -> np.ndarray:
    """Node values of a Signal, or ``obj`` itself as a float array."""
    if isinstance(obj, Signal):
        return obj.values
    return np.asarray(obj, dtype=float)


def _size(obj) -> int:
    grid = getattr(obj, "grid", None)
    if grid is not None and not isinstance(obj, Signal):
        return grid.size
    return values_of(obj).shape[0]


def check_same_grid(*objs) -> None:
    """Raise DimensionError unless all objects live on the same grid.

    Accepts Signals, WeightFields, BlurOperators and plain 1D arrays; arrays
    are only checked for length.
    """
    grids = {o.grid for o in objs if getattr(o, "grid", None) is not None}
    if len(grids) > 1:
        raise DimensionError(f"grid mismatch: n in {sorted(g.n for g in grids)}")
    sizes = {_size(o) for o in objs}
    if len(sizes) > 1:
        raise DimensionError(f"length mismatch: {sorted(sizes)}")


def check_signal_array(x, name: str = "X") -> np.ndarray:
    """Validate a 1D finite array with at least three samples."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 3:
        raise ValueError(f"{name} needs at least 3 samples (n >= 2), got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def as_signal(x, grid: Grid | None = None, name: str = "X") -> Signal:
    if isinstance(x, Signal):
        if grid is not None and x.grid != grid:
            raise DimensionError(f"{name} is on grid n={x.grid.n}, expected n={grid.n}")
        return x
    arr = check_signal_array(x, name)
    grid = grid or Grid(arr.shape[0] - 1)
    if arr.shape[0] != grid.size:
        raise DimensionError(f"{name} has {arr.shape[0]} samples, expected {grid.size}")
    return Signal(grid, arr)
