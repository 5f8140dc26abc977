"""Command line interface: ``mixreg run | solve | theta``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .blur import KernelSpec, build_operator
from .estimator import MixedL2TVDeconvolver, estimate_noise_sigma
from .exceptions import MixregError
from .experiments import ExperimentConfig, run_experiment
from .grid import format_real, read_signal_csv, write_signal_csv
from .regparam import MorozovSpec, noise_delta
from .theta import build_data_driven, read_theta_csv, write_theta_csv

log = logging.getLogger("mixreg")

SOLVE_METHODS = ("tikhonov", "tv", "mixed", "mixed_binary", "mixed_data_driven")


def _seeds(text):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}")


def _parse_theta(spec, grid_size):
    """``auto``, ``binary:a,b`` or a path to a ``t,theta`` CSV."""
    if spec == "auto":
        return "auto"
    if spec.startswith("binary:"):
        try:
            a, b = (float(x) for x in spec[len("binary:"):].split(","))
        except ValueError:
            raise SystemExit(f"mixreg: --theta binary:a,b expects two numbers, got {spec!r}")
        return (a, b)
    theta = read_theta_csv(spec)
    if theta.grid.size != grid_size:
        raise SystemExit(f"mixreg: theta file has {theta.grid.size} nodes, input has {grid_size}")
    return theta.theta.copy()


def cmd_run(args):
    cfg = ExperimentConfig.from_json(args.config)
    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seeds is not None:
        overrides["seeds"] = args.seeds
    if args.no_plots:
        overrides["plots"] = False
    if overrides:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    if cfg.output_dir is None:
        raise SystemExit("mixreg: no output directory (set output_dir in the config or pass --out)")
    results = run_experiment(cfg)
    failed = [r for r in results if r.status != "ok"]
    print(f"{len(results)} cells written to {cfg.output_dir}; {len(failed)} failed")
    return 1 if failed else 0


def cmd_solve(args):
    v = read_signal_csv(args.input)
    method = args.method
    theta = "auto"
    if method in ("mixed", "mixed_binary", "mixed_data_driven"):
        if method == "mixed_binary" and args.theta is None:
            raise SystemExit("mixreg: mixed_binary needs --theta binary:a,b or a theta CSV")
        if args.theta is not None:
            theta = _parse_theta(args.theta, v.grid.size)
        method = "mixed"
    est = MixedL2TVDeconvolver(
        sigma_b=args.sigma_b,
        method=method,
        theta=theta,
        alpha=args.alpha,
        noise_sigma=args.noise_sigma,
        tau=args.morozov if args.morozov is not None else 1.1,
    )
    est.fit(v.values)
    text = write_signal_csv(v.with_values(est.restored_), args.out)
    if args.out is None:
        sys.stdout.write(text)
    print(
        f"alpha={format_real(est.alpha_)} discrepancy={format_real(est.discrepancy_)} "
        f"iterations={est.n_iter_} converged={est.report_.converged}",
        file=sys.stderr,
    )
    return 0


def cmd_theta(args):
    v = read_signal_csv(args.input)
    op = build_operator(v.grid, KernelSpec(args.sigma_b))
    sigma = args.noise_sigma if args.noise_sigma is not None else estimate_noise_sigma(v.values)
    morozov = MorozovSpec(delta=noise_delta(sigma, v.grid), tau=args.tau)
    theta = build_data_driven(v, op, args.sigma_smooth, morozov)
    write_theta_csv(theta, args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mixreg", description="Restore blurred, noisy 1D signals with a mixed L2/TV penalty.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a batch experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--seeds", type=_seeds)
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("solve", help="restore one signal from a t,value CSV")
    s.add_argument("--method", required=True, choices=SOLVE_METHODS)
    s.add_argument("--input", required=True)
    s.add_argument("--sigma-b", type=float, required=True)
    choice = s.add_mutually_exclusive_group()
    choice.add_argument("--alpha", type=float, help="fixed regularization strength")
    choice.add_argument("--morozov", type=float, metavar="TAU", help="discrepancy principle with this tau (default 1.1)")
    s.add_argument("--theta", help="auto, binary:a,b or a t,theta CSV")
    s.add_argument("--noise-sigma", type=float, help="noise standard deviation (estimated if omitted)")
    s.add_argument("--out", help="output CSV (stdout if omitted)")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("theta", help="build the data-driven weight for one signal")
    t.add_argument("--input", required=True)
    t.add_argument("--sigma-b", type=float, required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--sigma-smooth", type=float)
    t.add_argument("--noise-sigma", type=float)
    t.add_argument("--tau", type=float, default=1.1)
    t.set_defaults(func=cmd_theta)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MixregError, ValueError, OSError) as exc:
        print(f"mixreg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
