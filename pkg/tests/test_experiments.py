import csv
import json
import math

import numpy as np
import pytest

from mixreg import ExperimentConfig, UndefinedMetricError, isnr, run_experiment, summary_csv
from mixreg.experiments import METHODS, SUMMARY_HEADER, emit_plots, figure_from_csv


def test_isnr_examples():
    assert isnr([2.0, 0.0], [0.0, 0.0], [1.0, 0.0]) == pytest.approx(10 * math.log10(4), abs=1e-12)
    assert isnr([1.0, 2.0], [0.5, 2.5], [0.5, 2.5]) == 0.0
    assert isnr([1.0, 2.0], [0.5, 2.5], [1.0, 2.0]) == math.inf
    with pytest.raises(UndefinedMetricError):
        isnr([1.0, 2.0], [1.0, 2.0], [0.0, 0.0])


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(seeds=())
    with pytest.raises(ValueError):
        ExperimentConfig(methods=("magic",))
    with pytest.raises(ValueError):
        ExperimentConfig(signal="step", methods=("mixed_binary",))
    with pytest.raises(ValueError):
        ExperimentConfig(n=1)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"signal": "example31", "colour": "red"})


def test_config_json_roundtrip(tmp_path):
    cfg = ExperimentConfig(signal="example32", seeds=(3, 4), plots=False)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json(path) == cfg


@pytest.fixture(scope="module")
def one_seed_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = ExperimentConfig(signal="example31", seeds=(0,), output_dir=str(out))
    return cfg, run_experiment(cfg), out


def test_run_outputs(one_seed_run):
    cfg, results, out = one_seed_run
    assert [r.method for r in results] == list(METHODS)
    assert all(r.status == "ok" for r in results)
    rows = list(csv.reader((out / "summary.csv").open()))
    assert tuple(rows[0]) == SUMMARY_HEADER
    assert len(rows) == 1 + len(METHODS)
    cell = list(csv.DictReader((out / "example31_seed0_tv.csv").open()))
    assert list(cell[0]) == ["t", "f_true", "g_noisy", "f_restored"]
    assert len(cell) == 131
    for r in results:
        assert abs(r.discrepancy - r.target) <= 1e-3 * r.target


def test_trivial_restoration_scores_zero(one_seed_run):
    _, _, out = one_seed_run
    cell = list(csv.DictReader((out / "example31_seed0_mixed_binary.csv").open()))
    f = [float(r["f_true"]) for r in cell]
    g = [float(r["g_noisy"]) for r in cell]
    assert isnr(f, g, g) == 0.0


def test_plots(one_seed_run):
    _, _, out = one_seed_run
    svgs = sorted((out / "plots").glob("*.svg"))
    assert len(svgs) >= 6
    assert (out / "plots" / "example31_seed0_data.svg").exists()


def test_plot_data_equal_csv(one_seed_run):
    _, _, out = one_seed_run
    path = out / "example31_seed0_mixed_binary.csv"
    fig = figure_from_csv(path, "restoration")
    lines = fig.axes[0].get_lines()
    rows = list(csv.DictReader(path.open()))
    assert np.array_equal(lines[0].get_ydata(), [float(r["f_true"]) for r in rows])
    assert np.array_equal(lines[1].get_ydata(), [float(r["f_restored"]) for r in rows])


def test_binary_theta_plot_is_binary(one_seed_run):
    _, _, out = one_seed_run
    fig = figure_from_csv(out / "example31_seed0_mixed_binary_theta.csv", "theta")
    assert set(np.unique(fig.axes[0].get_lines()[0].get_ydata())) == {0.0, 1.0}


def test_plots_are_reproducible(one_seed_run, tmp_path):
    _, results, out = one_seed_run
    before = (out / "plots" / "example31_seed0_tv.svg").read_bytes()
    emit_plots(results, out)
    assert (out / "plots" / "example31_seed0_tv.svg").read_bytes() == before


def test_determinism():
    cfg = ExperimentConfig(signal="example32", seeds=(5,), methods=("tv", "mixed_data_driven"))
    assert summary_csv(run_experiment(cfg)) == summary_csv(run_experiment(cfg))


def test_failing_cell_is_reported():
    # an alpha range that cannot bracket the noise level fails every cell
    cfg = ExperimentConfig(seeds=(0,), methods=("tikhonov", "tv"), log_alpha_range=(-12, -11))
    results = run_experiment(cfg)
    assert [r.status for r in results] == ["error:NoBracketError"] * 2
    assert summary_csv(results).splitlines()[1].endswith("nan,0,nan,error:NoBracketError")


def test_orderings_small():
    medians = {}
    for signal in ("example31", "example32"):
        res = run_experiment(ExperimentConfig(signal=signal, seeds=(0, 1, 2, 3, 4)))
        medians[signal] = {m: np.median([r.isnr for r in res if r.method == m]) for m in METHODS}
    m31, m32 = medians["example31"], medians["example32"]
    assert m31["mixed_binary"] > m31["tv"] > m31["tikhonov"]
    assert m32["mixed_binary"] == max(m32.values())
