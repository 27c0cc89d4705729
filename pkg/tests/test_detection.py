import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc, ndtr

from gaussclone import gaussian as gc
from gaussclone.detection import (
    MONTE_CARLO,
    QUADRATURE,
    HomodyneDetector,
    average_error_probability,
    error_curve,
    error_prob_given_z,
    homodyne_x_marginal,
    point_seed,
)
from gaussclone.errors import BudgetError, RangeError


def closed_form(alpha, eta, eps):
    """Derived oracle: with equal inputs the conditional clone means only move
    with g z, so the x record is Gaussian with mean +-sqrt(2) alpha and
    variance 1/2 + 1/(2 eta) + (1 - eps)/(4 eps) after averaging over z."""
    var = 0.5 + 1 / (2 * eta) + (1 - eps) / (4 * eps)
    return ndtr(-np.sqrt(2) * alpha / np.sqrt(var))


def test_detector_noise():
    assert HomodyneDetector(1.0).noise_variance == 0.0
    assert HomodyneDetector(0.5).noise_variance == pytest.approx(0.25)
    with pytest.raises(RangeError):
        HomodyneDetector(0.0)


def test_homodyne_marginal():
    s = gc.squeezed_coherent(1.0 + 0.5j, 0.4)
    mu, var = homodyne_x_marginal(s, 0.8)
    assert mu == pytest.approx(np.sqrt(2))
    assert var == pytest.approx(s.cov[0, 0] + 0.2 / 3.2)
    with pytest.raises(ValueError):
        homodyne_x_marginal(gc.tensor(s, s), 1.0)


def test_error_prob_given_z_limits():
    det = HomodyneDetector()
    assert error_prob_given_z(gc.coherent(0), gc.coherent(0), det) == pytest.approx(0.5)
    p = error_prob_given_z(gc.coherent(1.0), gc.coherent(-1.0), det)
    assert p == pytest.approx(0.5 * erfc(np.sqrt(2)), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_quadrature_ideal_checkpoint(alpha):
    est = average_error_probability(alpha)
    assert est.method == QUADRATURE
    assert est.value == pytest.approx(0.5 * erfc(alpha), abs=1e-8)
    assert est.abs_error <= 1e-8


@pytest.mark.parametrize("eta", [1.0, 0.75, 0.5])
@pytest.mark.parametrize("eps", [1.0, 0.75, 0.5])
def test_quadrature_matches_derived_closed_form(eta, eps):
    for alpha in (0.0, 0.3, 1.2, 2.5):
        est = average_error_probability(alpha, eta, eps)
        assert est.value == pytest.approx(closed_form(alpha, eta, eps), abs=1e-10)


@pytest.mark.parametrize("eta, eps", [(1.0, 1.0), (0.6, 0.8), (0.3, 0.4)])
def test_zero_amplitude_is_half(eta, eps):
    assert average_error_probability(0.0, eta, eps).value == pytest.approx(0.5, abs=1e-15)
    assert average_error_probability(0.0, eta, eps, MONTE_CARLO, 2000, 1).value == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("eta", [1.0, 0.75, 0.5])
def test_monte_carlo_agrees_with_quadrature(alpha, eta):
    eps = 0.75
    quad = average_error_probability(alpha, eta, eps)
    mc = average_error_probability(alpha, eta, eps, MONTE_CARLO, 20_000, point_seed(99, int(10 * alpha)))
    assert abs(mc.value - quad.value) <= 5 * mc.abs_error + 1e-15


def test_monte_carlo_deterministic():
    a = average_error_probability(0.7, 0.8, 0.9, MONTE_CARLO, 5000, 3)
    b = average_error_probability(0.7, 0.8, 0.9, MONTE_CARLO, 5000, 3)
    assert a == b
    c = average_error_probability(0.7, 0.8, 0.9, MONTE_CARLO, 5000, 4)
    assert c.value != a.value


def test_budget_and_range_errors():
    with pytest.raises(BudgetError):
        average_error_probability(0.5, method=MONTE_CARLO, budget=100, seed=0, tol=1e-9)
    with pytest.raises(RangeError):
        average_error_probability(0.5, budget=10)
    with pytest.raises(RangeError):
        average_error_probability(-0.1)
    with pytest.raises(RangeError):
        average_error_probability(0.5, eta=0.0)
    with pytest.raises(ValueError):
        average_error_probability(0.5, method="simpson")


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_curve_monotone(eta, eps):
    rows = error_curve(np.arange(0, 3.01, 0.25), eta, eps)
    values = [r[1] for r in rows]
    assert values[0] == pytest.approx(0.5, abs=1e-15)
    assert np.all(np.diff(values) <= 1e-15)


def test_curve_ordering_in_efficiencies():
    grid = np.arange(0.1, 3.01, 0.1)
    by_eta = [np.array([r[1] for r in error_curve(grid, eta, 1.0)]) for eta in (1.0, 0.75, 0.5)]
    assert np.all(by_eta[0] < by_eta[1]) and np.all(by_eta[1] < by_eta[2])
    by_eps = [np.array([r[1] for r in error_curve(grid, 0.75, eps)]) for eps in (1.0, 0.75, 0.5)]
    assert np.all(by_eps[0] < by_eps[1]) and np.all(by_eps[1] < by_eps[2])


def test_curve_worker_count_does_not_change_results():
    grid = np.linspace(0, 2, 7)
    one = error_curve(grid, 0.8, 0.9, MONTE_CARLO, 2000, seed=5, workers=1)
    many = error_curve(grid, 0.8, 0.9, MONTE_CARLO, 2000, seed=5, workers=3)
    assert one == many
    with pytest.raises(RangeError):
        error_curve([1.0, 0.5])
