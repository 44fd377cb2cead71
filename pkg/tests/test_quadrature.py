"""
Tests for the double-exponential quadrature rules and the series summation.
"""

import math

import numpy as np
import pytest

from src.csch_hilbert.errors import ConvergenceError, DivergenceError
from src.csch_hilbert.measures import PowerSequence, UnitSequence
from src.csch_hilbert.quadrature import exp_sinh, integrate, integrate_pieces, tanh_sinh
from src.csch_hilbert.series import sum_series


def test_tanh_sinh_endpoint_singularity():
    """Test ∫₀¹ x^{-1/2}dx = 2 with an integrable singularity at the endpoint."""
    result = tanh_sinh(lambda x: x**-0.5, 0.0, 1.0, tol=1e-12)
    assert result.value == pytest.approx(2.0, rel=1e-10)
    assert result.levels >= 3


def test_exp_sinh_exponential():
    """Test ∫₀^∞ e^{-x}dx = 1."""
    result = exp_sinh(lambda x: np.exp(-x), 0.0, tol=1e-12)
    assert result.value == pytest.approx(1.0, rel=1e-10)


def test_vector_valued_integrand():
    """Test that a matrix-valued integrand yields one integral per column."""
    rates = np.array([1.0, 2.0, 4.0])
    result = integrate(lambda x: np.exp(-x[:, None] * rates[None, :]), 0.0, math.inf, 1e-12)
    np.testing.assert_allclose(result.value, 1.0 / rates, rtol=1e-10)


def test_integrate_pieces():
    """Test that consecutive pieces add up: ∫₀³ x²dx = 9."""
    result = integrate_pieces(lambda x: x**2, [(0.0, 1.0), (1.0, 3.0)], tol=1e-12)
    assert result.value == pytest.approx(9.0, rel=1e-11)


def test_power_closure_adds_missing_tail():
    """Test that the closure accounts for a slowly decaying tail beyond the nodes."""
    result = exp_sinh(lambda x: x**-1.5, 1.0, tol=1e-10, closure=True)
    assert result.value == pytest.approx(2.0, rel=1e-6)


def test_divergent_tail_raises():
    """Test that a 1/x tail is reported as divergent."""
    with pytest.raises(DivergenceError):
        exp_sinh(lambda x: 1.0 / x, 1.0, tol=1e-2, closure=True)


def test_oscillation_exhausts_levels():
    """Test that a strongly oscillating integrand fails within a small level budget."""
    with pytest.raises(ConvergenceError) as excinfo:
        tanh_sinh(lambda x: np.sin(200.0 * x), 0.0, 1.0, tol=1e-12, max_levels=3)
    assert excinfo.value.value is not None


def test_reversed_interval_rejected():
    """Test that b <= a is a caller error."""
    with pytest.raises(ValueError):
        tanh_sinh(lambda x: x, 1.0, 1.0)


def test_non_finite_integrand_is_named():
    """Test that a NaN at a node raises with the offending abscissa in the message."""

    def f(x):
        return np.where(x > 0.5, np.nan, x)

    with pytest.raises(ConvergenceError) as excinfo:
        tanh_sinh(f, 0.0, 1.0, tol=1e-10)
    assert "integrand is not finite at x=" in str(excinfo.value)


def test_negligible_piece_uses_absolute_floor():
    """Test that a piece with a tiny share of the mass need not converge on its own."""

    def f(x):
        return np.where(x < 1.0, 1e-80 * (x < 1.0 / 3.0), 1.0)

    with pytest.raises(ConvergenceError):
        tanh_sinh(f, 0.0, 1.0, tol=1e-12)
    result = integrate_pieces(f, [(0.0, 1.0), (1.0, 2.0)], tol=1e-12)
    assert result.value == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("r,tol", [(-0.95, 1e-10), (-0.8, 1e-12), (3.5, 1e-12)])
def test_end_correction_reaches_tolerance(r, tol):
    """Test ∫₀¹ x^r dx = 1/(r+1) to the requested tolerance, strong singularities included."""
    result = tanh_sinh(lambda x: x**r, 0.0, 1.0, tol=tol, closure=True)
    assert result.value == pytest.approx(1.0 / (r + 1.0), rel=100.0 * tol)


def test_sum_series_basel():
    """Test Σ 1/n² = π²/6 through head plus continued tail."""
    result = sum_series(lambda n, w, nu: -2.0 * np.log(w), UnitSequence(), tol=1e-10)
    assert result.value == pytest.approx(math.pi**2 / 6.0, rel=1e-9)


def test_sum_series_geometric():
    """Test Σ e^{-n} = 1/(e−1)."""
    result = sum_series(lambda n, w, nu: -w, UnitSequence(), tol=1e-10)
    assert result.value == pytest.approx(1.0 / (math.e - 1.0), rel=1e-9)


def test_sum_series_vector_valued():
    """Test ζ(2) and ζ(3) summed together as two columns."""
    exponents = np.array([2.0, 3.0])
    result = sum_series(
        lambda n, w, nu: -np.log(w)[:, None] * exponents[None, :], UnitSequence(), tol=1e-10
    )
    np.testing.assert_allclose(result.value, [math.pi**2 / 6.0, 1.2020569031595942], rtol=1e-9)


def test_sum_series_finite_length():
    """Test that a given length sums exactly the first terms."""
    result = sum_series(lambda n, w, nu: np.log(w), UnitSequence(), length=10)
    assert result.value == pytest.approx(55.0, rel=1e-14)
    assert result.terms == 10


def test_sum_series_power_measure():
    """Test Σ ν_{n+1}/V_n^{3} for ν_n = n^{-1/2} against a long explicit sum plus its tail."""
    dm = PowerSequence(0.5)
    result = sum_series(lambda n, w, nu: np.log(nu) - 3.0 * np.log(w), dm, tol=1e-10)

    n = np.arange(1, 200_001, dtype=float)
    v = np.cumsum(n**-0.5)
    explicit = np.sum((n + 1.0) ** -0.5 / v**3)
    # V_n ≈ 2√n beyond the explicit range, so the rest is about ∫ t^{-1/2}/(8t^{3/2})dt
    rest = 1.0 / (8.0 * n[-1])
    assert result.value == pytest.approx(explicit + rest, rel=1e-7)


def test_sum_series_divergent():
    """Test that terms decaying like 1/n are reported as divergent."""
    with pytest.raises(DivergenceError):
        sum_series(lambda n, w, nu: -np.log(w), UnitSequence(), tol=1e-8)
