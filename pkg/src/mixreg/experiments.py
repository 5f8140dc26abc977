"""Batch reproduction of the signal-restoration experiments.

For each seed: synthesize the truth, blur, add noise, then for every method
build theta, choose alpha by the discrepancy principle, solve and score with
ISNR.  CSV files are the canonical output; plots are rendered from them.

Output layout (``{stem}`` is ``{signal}_seed{seed}``)::

    summary.csv                      seed,method,alpha,discrepancy,iterations,isnr,status
    {stem}_{method}.csv              t,f_true,g_noisy,f_restored
    {stem}_{method}_theta.csv        t,theta   (mixed methods only)
    plots/{stem}_data.svg            truth and noisy data
    plots/{stem}_{method}.svg        restoration against truth
    plots/{stem}_{method}_theta.svg  weight profile
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blur import KernelSpec, apply, build_operator
from .exceptions import MixregError, UndefinedMetricError
from .grid import NoiseSpec, Signal, add_noise, format_real, make_grid, synth_signal
from .penalizers import WeightField
from .regparam import COUPLINGS, MorozovSpec, RegularizationProblem, morozov_select, noise_delta
from .solver import SolverConfig
from .theta import ThetaRecipe, write_theta_csv

__all__ = [
    "METHODS",
    "SUMMARY_HEADER",
    "DEFAULT_BINARY_THETA",
    "ExperimentConfig",
    "MethodResult",
    "isnr",
    "run_experiment",
    "summary_csv",
    "emit_plots",
]

log = logging.getLogger(__name__)

METHODS = ("tikhonov", "tv", "mixed_binary", "mixed_data_driven")
SUMMARY_HEADER = ("seed", "method", "alpha", "discrepancy", "iterations", "isnr", "status")

# Ad-hoc binary weights of the two reference examples: TV on the piecewise
# constant part, L2 elsewhere.
DEFAULT_BINARY_THETA = {
    "example31": {"a": 0.0, "b": 0.4, "closed": "right"},
    "example32": {"a": 0.3, "b": 0.65, "closed": "both"},
}


def isnr(f_true, g_noisy, f_restored) -> float:
    """Improvement in signal-to-noise ratio, in dB.

    ``10 log10(||f - g||^2 / ||f - f_restored||^2)`` with plain sums (the grid
    weight cancels).  Returns ``inf`` for a perfect restoration.
    """
    f = np.asarray(getattr(f_true, "values", f_true), dtype=float)
    g = np.asarray(getattr(g_noisy, "values", g_noisy), dtype=float)
    fa = np.asarray(getattr(f_restored, "values", f_restored), dtype=float)
    num = float(np.sum((f - g) ** 2))
    if num == 0.0:
        raise UndefinedMetricError("ISNR is undefined when the data equal the truth")
    den = float(np.sum((f - fa) ** 2))
    if den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; field names double as JSON config keys."""

    signal: str = "example31"
    n: int = 130
    sigma_b: float = 0.05
    noise_level: float = 0.01
    seeds: tuple = (0, 1, 2, 3, 4, 5, 6)
    methods: tuple = METHODS
    binary_theta: dict | None = None
    sigma_smooth: float | None = None
    coupling: str = "normalized"
    beta: float | None = None
    tau: float = 1.1
    log_alpha_range: tuple = (-12.0, 4.0)
    bisect_tol: float = 1e-3
    max_bisections: int = 60
    max_iters: int = 200
    rel_change_tol: float = 1e-8
    linear_solver: str = "cholesky"
    scheme: str = "newton"
    output_dir: str | None = None
    plots: bool = True

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "log_alpha_range", tuple(float(x) for x in self.log_alpha_range))
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; choose from {METHODS}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}")
        if "mixed_binary" in self.methods and self.binary_theta is None and self.signal not in DEFAULT_BINARY_THETA:
            raise ValueError(f"signal {self.signal!r} has no default binary theta; set binary_theta")
        # fail early on invalid component settings
        make_grid(self.n)
        KernelSpec(self.sigma_b)
        NoiseSpec(self.noise_level, 0)
        self.solver_config

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            max_iters=self.max_iters,
            rel_change_tol=self.rel_change_tol,
            linear_solver=self.linear_solver,
            scheme=self.scheme,
        )

    def morozov_spec(self, delta: float) -> MorozovSpec:
        return MorozovSpec(
            delta=delta,
            tau=self.tau,
            log_alpha_range=self.log_alpha_range,
            bisect_tol=self.bisect_tol,
            max_bisections=self.max_bisections,
        )

    def theta_recipe(self, method: str) -> ThetaRecipe | None:
        if method == "mixed_binary":
            params = self.binary_theta if self.binary_theta is not None else DEFAULT_BINARY_THETA[self.signal]
            return ThetaRecipe("binary_interval", dict(params))
        if method == "mixed_data_driven":
            return ThetaRecipe("data_driven", {"sigma_smooth": self.sigma_smooth})
        return None


@dataclass(frozen=True, eq=False)
class MethodResult:
    seed: int
    method: str
    alpha: float
    isnr: float
    discrepancy: float
    iterations: int
    restored: Signal | None = field(default=None, repr=False)
    theta: WeightField | None = field(default=None, repr=False)
    target: float = math.nan
    status: str = "ok"
    warnings: tuple = ()

    def summary_row(self) -> list[str]:
        return [
            str(self.seed),
            self.method,
            format_real(self.alpha),
            format_real(self.discrepancy),
            str(self.iterations),
            format_real(self.isnr),
            self.status,
        ]


def _problem(method, v, op, theta, cfg):
    if method == "tikhonov":
        return RegularizationProblem.tikhonov(v, op)
    if method == "tv":
        return RegularizationProblem.pure_tv(v, op, cfg.beta, cfg.solver_config)
    return RegularizationProblem.mixed(v, op, theta, cfg.coupling, cfg.beta, cfg.solver_config)


def _run_cell(seed, method, f, g, v, op, morozov, cfg) -> MethodResult:
    try:
        recipe = cfg.theta_recipe(method)
        theta = recipe.build(v, op, morozov) if recipe is not None else None
        alpha, report = morozov_select(_problem(method, v, op, theta, cfg), morozov)
        return MethodResult(
            seed=seed,
            method=method,
            alpha=alpha,
            isnr=isnr(f, v, report.minimizer),
            discrepancy=report.discrepancy,
            iterations=report.iterations,
            restored=report.minimizer,
            theta=theta,
            target=morozov.target,
            warnings=report.warnings,
        )
    except MixregError as exc:
        log.error("seed %s method %s failed: %s", seed, method, exc)
        return MethodResult(seed, method, math.nan, math.nan, math.nan, 0, status=f"error:{type(exc).__name__}")


def run_experiment(cfg: ExperimentConfig) -> list[MethodResult]:
    """Run every (seed, method) cell; results are ordered by seed, then method.

    A failing cell is reported with a non-``ok`` status and does not stop the
    others.  When ``cfg.output_dir`` is set, CSVs (and plots, if enabled) are
    written there.
    """
    grid = make_grid(cfg.n)
    op = build_operator(grid, KernelSpec(cfg.sigma_b))
    f = synth_signal(cfg.signal, grid)
    g = apply(op, f)
    out = Path(cfg.output_dir) if cfg.output_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    results = []
    for seed in cfg.seeds:
        v, sigma = add_noise(g, NoiseSpec(cfg.noise_level, seed))
        morozov = cfg.morozov_spec(noise_delta(sigma, grid))
        for method in cfg.methods:
            res = _run_cell(seed, method, f, g, v, op, morozov, cfg)
            log.info("seed=%d method=%s alpha=%.4g isnr=%.4f", seed, method, res.alpha, res.isnr)
            results.append(res)
            if out is not None:
                _write_cell(out, cfg.signal, res, f, v)

    if out is not None:
        (out / "summary.csv").write_text(summary_csv(results))
        if cfg.plots:
            emit_plots(results, out)
    return results


def _stem(signal, seed):
    return f"{signal}_seed{seed}"


def _write_cell(out: Path, signal: str, res: MethodResult, f: Signal, v: Signal):
    if res.restored is None:
        return
    stem = _stem(signal, res.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "f_true", "g_noisy", "f_restored"])
    for row in zip(f.t, f.values, v.values, res.restored.values):
        w.writerow([format_real(x) for x in row])
    (out / f"{stem}_{res.method}.csv").write_text(buf.getvalue())
    if res.theta is not None:
        write_theta_csv(res.theta, out / f"{stem}_{res.method}_theta.csv")


def summary_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in results:
        w.writerow(r.summary_row())
    return buf.getvalue()


def _read_columns(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def _plot_files(out: Path):
    """Yield ``(svg_path, csv_path, kind)`` for every CSV in an output directory."""
    for path in sorted(out.glob("*_seed*_*.csv")):
        stem = path.stem
        if stem.endswith("_theta"):
            yield out / "plots" / f"{stem}.svg", path, "theta"
        else:
            yield out / "plots" / f"{stem}.svg", path, "restoration"


def figure_from_csv(path, kind: str):
    """Build the matplotlib figure for one CSV; data are taken verbatim from the file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cols = _read_columns(Path(path))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    t = cols["t"]
    if kind == "theta":
        ax.plot(t, cols["theta"], color="tab:purple", label="theta")
        ax.set_ylim(-0.05, 1.05)
    elif kind == "data":
        ax.plot(t, cols["f_true"], "r--", label="original")
        ax.plot(t, cols["g_noisy"], "b-", label="blurred + noise")
    else:
        ax.plot(t, cols["f_true"], "r--", label="original")
        ax.plot(t, cols["f_restored"], color="green", label="restored")
    ax.set_xlabel("t")
    ax.set_title(Path(path).stem)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig


def emit_plots(results, out) -> list[Path]:
    """Render one SVG per CSV in ``out`` plus one data plot per seed.

    ``results`` is accepted for symmetry with :func:`run_experiment`; only the
    files on disk are read so that the plots show exactly the CSV contents.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out)
    plot_dir = out / "plots"
    try:
        plot_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create plot directory {plot_dir}: {exc}") from exc
    plt.rcParams["svg.hashsalt"] = "mixreg"
    written = []
    seen_data = set()
    for svg, src, kind in _plot_files(out):
        jobs = [(svg, kind)]
        if kind == "restoration":
            data_stem = src.stem.rsplit("_seed", 1)[0] + "_seed" + src.stem.rsplit("_seed", 1)[1].split("_")[0]
            if data_stem not in seen_data:
                seen_data.add(data_stem)
                jobs.append((plot_dir / f"{data_stem}_data.svg", "data"))
        for target, k in jobs:
            fig = figure_from_csv(src, k)
            try:
                fig.savefig(target, format="svg", metadata={"Date": None})
            except OSError as exc:
                raise OSError(f"cannot write plot {target}: {exc}") from exc
            finally:
                plt.close(fig)
            written.append(target)
    return written
