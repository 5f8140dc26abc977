import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mixreg import (
    DimensionError,
    PenalizerSpec,
    Signal,
    WeightField,
    gradient,
    make_grid,
    objective,
    solve_tikhonov,
    tv_seminorm,
    weighted_l2_sq,
    weighted_tv,
)
from mixreg.penalizers import default_beta, difference_matrix, hessian, laplacian_form

from conftest import small_problem

finite = st.floats(-1e3, 1e3, allow_nan=False)


@st.composite
def u_theta(draw, min_theta=0.0, n=None):
    n = n or draw(st.integers(2, 40))
    u = draw(arrays(float, n + 1, elements=finite))
    theta = draw(arrays(float, n + 1, elements=st.floats(min_theta, 1.0)))
    grid = make_grid(n)
    return Signal(grid, u), WeightField(grid, theta)


def test_tv_examples():
    g = make_grid(2)
    assert tv_seminorm(Signal(g, [0.0, 1.0, 0.0])) == 2.0
    assert tv_seminorm(Signal(make_grid(9), np.full(10, 3.3))) == 0.0


@given(u_theta())
def test_weighted_tv_reductions(pair):
    u, theta = pair
    g = u.grid
    assert weighted_tv(u, WeightField.constant(g, 1.0)) == pytest.approx(tv_seminorm(u), rel=1e-15, abs=0)
    assert weighted_tv(u, WeightField.constant(g, 0.0)) == 0.0


@given(u_theta())
def test_domination(pair):
    u, theta = pair
    assert weighted_tv(u, theta) <= tv_seminorm(u)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
@settings(max_examples=60)
@given(data=st.data())
def test_reverse_bound(eps, data):
    u, theta = data.draw(u_theta(min_theta=eps))
    # exact in arithmetic; the products and sums may round by a few ulps
    bound = weighted_tv(u, theta) / theta.edge_theta.min()
    assert tv_seminorm(u) <= bound * (1 + 1e-14)


@given(u_theta(), st.floats(-100, 100, allow_nan=False))
def test_homogeneity(pair, c):
    u, theta = pair
    scaled = u.with_values(c * u.values)
    assert weighted_tv(scaled, theta) == pytest.approx(abs(c) * weighted_tv(u, theta), rel=1e-12, abs=1e-12)


def test_weighted_l2_examples():
    g = make_grid(7)
    u = Signal(g, np.arange(8.0))
    assert weighted_l2_sq(u, WeightField.constant(g, 0.0)) == pytest.approx(g.h * np.sum(u.values**2))
    assert weighted_l2_sq(u, WeightField.constant(g, 1.0)) == 0.0


@given(st.integers(2, 300))
def test_weighted_l2_half(n):
    g = make_grid(n)
    val = weighted_l2_sq(Signal(g, np.ones(n + 1)), WeightField.constant(g, 0.5))
    assert val == pytest.approx(0.5 * (n + 1) / n, rel=1e-13)


def test_weight_field_validation():
    g = make_grid(3)
    with pytest.raises(ValueError):
        WeightField(g, [0, 0.5, 1.2, 0])
    with pytest.raises(DimensionError):
        WeightField(g, [0, 0.5, 1])
    w = WeightField(g, [0, 0.5, 1, 1])
    assert w.edge_theta.tolist() == [0.25, 0.75, 1.0]
    assert w.zero_set.tolist() == [0]
    assert w.one_set.tolist() == [2, 3]


def test_penalizer_spec_validation():
    g = make_grid(3)
    th = WeightField.constant(g, 0.5)
    with pytest.raises(ValueError):
        PenalizerSpec(-1.0, 1.0, th, 1e-3)
    with pytest.raises(ValueError):
        PenalizerSpec(1.0, 1.0, th, 0.0)


def test_grid_mismatch_raises():
    th = WeightField.constant(make_grid(4), 0.5)
    with pytest.raises(DimensionError):
        weighted_tv(Signal(make_grid(3), np.zeros(4)), th)


def test_default_beta():
    g = make_grid(3)
    assert default_beta(Signal(g, [0, 2, -1, 0])) == pytest.approx(3e-4)
    assert default_beta(Signal(g, [1, 1, 1, 1])) == 1e-4


def test_objective_zero_input(rng):
    v, op, spec = small_problem(rng, 6)
    z = np.zeros(7)
    assert objective(z, z, op, spec) == 0.0


def test_objective_smoothing_gap(rng):
    v, op, spec = small_problem(rng, 8)
    u = rng.normal(size=9)
    gap = objective(u, v, op, spec, smoothed=False) - objective(u, v, op, spec)
    assert 0 <= gap <= spec.alpha2 * 8 * spec.beta


def test_theta_zero_matches_tikhonov(grid130, op130, rng):
    v = Signal(grid130, rng.normal(size=131))
    alpha = 0.03
    rep = solve_tikhonov(v, op130, alpha)
    spec = PenalizerSpec(alpha, 0.7, WeightField.constant(grid130, 0.0), 1e-3)
    A, h = op130.matrix, grid130.h
    u = rep.minimizer.values
    closed = h * np.sum((A @ u - v.values) ** 2) + alpha * h * np.sum(u**2)
    assert objective(u, v, op130, spec) == pytest.approx(closed, rel=1e-13)
    g = gradient(u, v, op130, spec)
    np.testing.assert_array_equal(g, 2 * grid130.h * (A.T @ (A @ u - v.values)) + 2 * alpha * grid130.h * u)
    assert np.max(np.abs(g)) < 1e-8


def _fd_grad(f, x, step=1e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2 * step)
    return g


@pytest.mark.parametrize("case", range(10))
def test_gradient_finite_differences(case):
    rng = np.random.default_rng(case)
    n = int(rng.integers(4, 20))
    theta = rng.uniform(0, 1, n + 1)
    theta[rng.integers(0, n + 1, 2)] = 0.0
    theta[rng.integers(0, n + 1, 2)] = 1.0
    v, op, spec = small_problem(rng, n, theta=theta)
    u = rng.normal(size=n + 1)
    g = gradient(u, v, op, spec)
    fd = _fd_grad(lambda x: objective(x, v, op, spec), u)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_hessian_matches_gradient_differences(rng):
    v, op, spec = small_problem(rng, 7)
    u = rng.normal(size=8)
    H = hessian(u, op, spec)
    fd = np.column_stack(
        [(gradient(u + 1e-6 * e, v, op, spec) - gradient(u - 1e-6 * e, v, op, spec)) / 2e-6 for e in np.eye(8)]
    )
    np.testing.assert_allclose(H, fd, rtol=1e-5, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_convexity(seed, lam):
    rng = np.random.default_rng(seed)
    v, op, spec = small_problem(rng, 10)
    u1, u2 = rng.normal(size=(2, 11))
    F = lambda x: objective(x, v, op, spec)
    assert F(lam * u1 + (1 - lam) * u2) <= lam * F(u1) + (1 - lam) * F(u2) + 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_strict_convexity_proxy(seed):
    rng = np.random.default_rng(seed)
    n = 12
    theta = rng.uniform(0, 0.99, n + 1)
    v, op, spec = small_problem(rng, n, theta=theta)
    H = hessian(rng.normal(size=n + 1), op, spec)
    h = op.grid.h
    for d in rng.normal(size=(100, n + 1)):
        assert d @ H @ d >= 2 * spec.alpha1 * h * (1 - 0.99) * (d @ d) * (1 - 1e-12)


def test_laplacian_form_matches_dense():
    w = np.array([1.0, 2.0, 0.5])
    L = difference_matrix(3)
    np.testing.assert_allclose(laplacian_form(w), L.T @ np.diag(w) @ L)
