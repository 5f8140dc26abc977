"""Uniform grids on [0, 1], sampled signals, test signals and seeded noise.

Noise is drawn with NumPy's ``PCG64`` bit generator seeded through
``SeedSequence(seed)``; the same (signal, level, seed) triple always yields
bit-identical output on a given NumPy version.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import DegenerateRangeError, DimensionError, InvalidGridError

__all__ = [
    "Grid",
    "Signal",
    "NoiseSpec",
    "SIGNAL_KINDS",
    "make_grid",
    "synth_signal",
    "add_noise",
    "read_signal_csv",
    "write_signal_csv",
    "format_real",
]

SIGNAL_KINDS = ("example31", "example32", "step", "bump", "constant")


def format_real(x: float) -> str:
    """Round-trippable text form of a float (17 significant digits)."""
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


@dataclass(frozen=True)
class Grid:
    """Nodes ``t_j = j / n`` for ``j = 0..n``."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise InvalidGridError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise InvalidGridError(f"n must be >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> Fraction:
        # exact, so that spacing * n == 1 holds for every n
        return Fraction(1, self.n)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n + 1, dtype=float) / self.n
        t.flags.writeable = False
        return t


@dataclass(frozen=True, eq=False)
class Signal:
    """Samples of a function on the nodes of ``grid``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1 or values.shape[0] != self.grid.size:
            raise DimensionError(
                f"expected {self.grid.size} samples for n={self.grid.n}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def value_range(self) -> float:
        return float(self.values.max() - self.values.min())

    def with_values(self, values) -> "Signal":
        return Signal(self.grid, values)


@dataclass(frozen=True)
class NoiseSpec:
    relative_level: float
    seed: int

    def __post_init__(self):
        if not (0.0 < self.relative_level < 1.0):
            raise ValueError(f"relative_level must lie in (0, 1), got {self.relative_level}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a non-negative 64-bit integer")


def make_grid(n: int) -> Grid:
    return Grid(n)


# The test signals of the reference experiments exist only as figures; these
# are fixed surrogates with the same qualitative structure.


def _example31(t):
    left = np.where((t >= 0.10) & (t <= 0.25), 1.0, np.where(t > 0.25, 0.4, 0.0))
    right = 0.8 * np.exp(-((t - 0.7) ** 2) / (2 * 0.12**2))
    return np.where(t <= 0.4, left, right)


def _example32(t):
    # smooth on [0, 0.3) and (0.65, 1], constant pieces in between, jumps at
    # 0.3, 0.45 and 0.65
    return np.select(
        [t < 0.3, t <= 0.45, t <= 0.65],
        [0.1 + 0.6 * np.sin(np.pi * t / 0.3) ** 2, 1.0, 0.2],
        0.8 * np.exp(-((t - 0.65) ** 2) / (2 * 0.15**2)),
    )


def _step(t):
    return np.where(t < 0.5, 0.0, 1.0)


def _bump(t):
    return np.exp(-((t - 0.5) ** 2) / (2 * 0.1**2))


_GENERATORS = {
    "example31": _example31,
    "example32": _example32,
    "step": _step,
    "bump": _bump,
    "constant": np.ones_like,
}


def synth_signal(kind: str, grid: Grid) -> Signal:
    """Sample one of the built-in test signals on ``grid``.

    ``example31`` and ``example32`` are surrogates for the two reference test
    signals: the first is piecewise constant on [0, 0.4] and a Gaussian bump on
    (0.4, 1]; the second is smooth on two disjoint intervals and piecewise
    constant with three jumps in between.
    """
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown signal kind {kind!r}; choose from {SIGNAL_KINDS}") from None
    return Signal(grid, gen(grid.nodes).astype(float))


def add_noise(clean: Signal, spec: NoiseSpec) -> tuple[Signal, float]:
    """Add i.i.d. zero-mean Gaussian noise scaled to the range of ``clean``.

    Returns the noisy signal and the standard deviation that was used,
    ``spec.relative_level * range(clean)``.
    """
    rng_ = clean.value_range()
    if rng_ == 0.0:
        raise DegenerateRangeError("cannot scale noise to a signal with zero range")
    sigma = spec.relative_level * rng_
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(spec.seed))))
    eta = gen.standard_normal(clean.grid.size)
    return clean.with_values(clean.values + sigma * eta), sigma


def write_signal_csv(signal: Signal, path=None, column: str = "value") -> str:
    """Serialize as ``t,<column>`` rows; returns the text and writes it if ``path`` is given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", column])
    for tj, x in zip(signal.t, signal.values):
        w.writerow([format_real(tj), format_real(x)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_signal_csv(path, column: str | None = None) -> Signal:
    """Read a two-column CSV with a ``t`` column on a uniform grid over [0, 1]."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    if "t" not in header:
        raise ValueError(f"{path}: missing 't' column in header {header}")
    ti = header.index("t")
    if column is None:
        others = [i for i in range(len(header)) if i != ti]
        if not others:
            raise ValueError(f"{path}: no value column")
        vi = others[0]
    else:
        vi = header.index(column)
    t = np.array([float(r[ti]) for r in rows])
    values = np.array([float(r[vi]) for r in rows])
    grid = Grid(len(rows) - 1)
    if not np.allclose(t, grid.nodes, rtol=0, atol=1e-12):
        raise InvalidGridError(f"{path}: t column is not the uniform grid j/n on [0, 1]")
    return Signal(grid, values)
