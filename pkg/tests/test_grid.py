import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from mixreg import (
    DegenerateRangeError,
    InvalidGridError,
    NoiseSpec,
    Signal,
    add_noise,
    make_grid,
    read_signal_csv,
    synth_signal,
    write_signal_csv,
)
from mixreg.grid import SIGNAL_KINDS, format_real


def test_grid_130():
    g = make_grid(130)
    assert g.size == 131
    assert g.h == pytest.approx(0.0076923, abs=1e-7)


def test_smallest_grid_nodes():
    assert make_grid(2).nodes.tolist() == [0.0, 0.5, 1.0]


def test_node_arithmetic():
    assert make_grid(4).nodes[3] == 0.75


@pytest.mark.parametrize("n", [1, 0, -3])
def test_too_small_grid(n):
    with pytest.raises(InvalidGridError):
        make_grid(n)


def test_non_integer_grid():
    with pytest.raises(InvalidGridError):
        make_grid(2.5)


@given(st.integers(2, 5000))
def test_grid_invariants(n):
    g = make_grid(n)
    assert g.spacing * n == Fraction(1)
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 1.0


@given(st.sampled_from(SIGNAL_KINDS), st.integers(2, 400))
def test_generators_length_and_finite(kind, n):
    s = synth_signal(kind, make_grid(n))
    assert len(s) == n + 1
    assert np.all(np.isfinite(s.values))


def test_constant_generator():
    assert np.all(synth_signal("constant", make_grid(17)).values == 1.0)


def test_unknown_kind():
    with pytest.raises(ValueError):
        synth_signal("sawtooth", make_grid(10))


def test_example31_structure(grid130):
    s = synth_signal("example31", grid130)
    t = grid130.nodes
    right = t > 0.4
    expected = 0.8 * np.exp(-((t[right] - 0.7) ** 2) / (2 * 0.12**2))
    np.testing.assert_allclose(s.values[right], expected, rtol=0, atol=1e-15)
    left = s.values[~right]
    assert set(np.unique(left)) <= {0.0, 0.4, 1.0}


def test_example31_flat_pieces(grid130):
    s = synth_signal("example31", grid130).values
    t = grid130.nodes
    for mask in (t < 0.1, (t >= 0.1) & (t <= 0.25), (t > 0.25) & (t <= 0.4)):
        assert np.sum(np.abs(np.diff(s[mask]))) == 0.0


def _jump_count(values):
    d = np.abs(np.diff(values))
    return int(np.sum(d > 0.5 * d.max()))


def test_example32_three_jumps(grid130):
    assert _jump_count(synth_signal("example32", grid130).values) == 3


def test_noise_sigma_definition():
    g = make_grid(10)
    clean = Signal(g, np.linspace(-1, 1, 11))
    _, sigma = add_noise(clean, NoiseSpec(0.01, 3))
    assert sigma == pytest.approx(0.02, rel=1e-15)


def test_noise_determinism(grid130):
    clean = synth_signal("example31", grid130)
    a, _ = add_noise(clean, NoiseSpec(0.01, 7))
    b, _ = add_noise(clean, NoiseSpec(0.01, 7))
    c, _ = add_noise(clean, NoiseSpec(0.01, 8))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_noise_statistics(grid130):
    clean = synth_signal("example31", grid130)
    etas, within = [], 0
    for seed in range(200):
        v, sigma = add_noise(clean, NoiseSpec(0.01, seed))
        eta = v.values - clean.values
        etas.append(eta)
        within += abs(eta.mean()) <= 4 * sigma / np.sqrt(131)
    assert within == 200
    assert np.std(np.concatenate(etas)) == pytest.approx(sigma, rel=0.05)


def test_zero_range_noise():
    with pytest.raises(DegenerateRangeError):
        add_noise(synth_signal("constant", make_grid(8)), NoiseSpec(0.01, 0))


@pytest.mark.parametrize("level", [0.0, 1.0, -0.1])
def test_noise_level_bounds(level):
    with pytest.raises(ValueError):
        NoiseSpec(level, 0)


def test_signal_rejects_bad_values():
    g = make_grid(3)
    with pytest.raises(ValueError):
        Signal(g, [0, 1, np.nan, 2])
    with pytest.raises(ValueError):
        Signal(g, [0, 1, 2])


def test_signal_is_immutable():
    s = Signal(make_grid(3), [0.0, 1, 2, 3])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_csv_roundtrip(tmp_path):
    s = synth_signal("example32", make_grid(37))
    path = tmp_path / "s.csv"
    text = write_signal_csv(s, path)
    assert text.splitlines()[0] == "t,value"
    back = read_signal_csv(path)
    assert np.array_equal(back.values, s.values)


def test_csv_rejects_nonuniform(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,value\n0,1\n0.3,2\n1,3\n")
    with pytest.raises(InvalidGridError):
        read_signal_csv(path)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_real_roundtrip(x):
    assert float(format_real(x)) == x


def test_format_real_special():
    assert format_real(float("inf")) == "inf"
    assert format_real(float("nan")) == "nan"
