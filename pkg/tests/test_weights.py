"""
Tests for the weight coefficients ω and ϖ, their bounds, and the cell and sandwich checks.
"""

import functools
import math

import numpy as np
import pytest

from src.csch_hilbert import series, weights
from src.csch_hilbert.errors import DomainError
from src.csch_hilbert.kernel import kernel_constant_closed, theta_complement
from src.csch_hilbert.measures import (
    PowerDamped,
    PowerSequence,
    Scheme,
    TabulatedDensity,
    UnitDensity,
    UnitSequence,
)
from src.csch_hilbert.models import Verdict
from src.csch_hilbert.weights import (
    hermite_hadamard_check,
    omega,
    sandwich_check,
    sandwich_terms,
    sandwich_verdict,
    varpi,
    varpi_with_error,
    weight_report,
)


@pytest.fixture
def finite_u_scheme(cor54_params):
    """δ = 1 with a density whose U(∞) = 9/4 is finite."""
    cm = TabulatedDensity([0.0, 1.0, 2.0], [1.0, 0.5, 0.5], tail_exponent=2.0)
    return Scheme(delta=1, cm=cm, dm=UnitSequence(), params=cor54_params)


def test_omega_matches_explicit_sum(cor54_scheme):
    """Test ω(1) = Σ h(n) for the unit scheme against a long explicit sum."""
    n = np.arange(1, 200_001, dtype=float)
    explicit = np.sum(2.0 / np.expm1(2.0 * np.sqrt(n)))
    assert omega(cor54_scheme, 1.0) == pytest.approx(explicit, rel=1e-7)


def test_omega_below_constant(cor54_scheme):
    """Test that ω stays below k and approaches it as x → 0."""
    k = kernel_constant_closed(cor54_scheme.params).value
    values = omega(cor54_scheme, np.array([1e-3, 0.1, 1.0, 10.0]))
    assert np.all(values < k)
    assert values[0] > 0.9 * k
    assert np.all(np.diff(values) < 0)


def test_omega_vectorized_matches_scalar(cor51_scheme):
    """Test that one vectorized call agrees with separate scalar calls."""
    x = np.array([0.5, 2.0])
    together = omega(cor51_scheme, x)
    separate = [omega(cor51_scheme, float(value)) for value in x]
    np.testing.assert_allclose(together, separate, rtol=1e-7)


def test_omega_rejects_nonpositive(cor54_scheme):
    """Test that ω needs x > 0."""
    with pytest.raises(DomainError):
        omega(cor54_scheme, 0.0)


@pytest.mark.parametrize("n", [1, 2, 10])
def test_varpi_equals_constant(cor54_scheme, cor52_scheme, n):
    """Test ϖ = k(σ) whenever U(∞) = ∞, for both directions."""
    for scheme in (cor54_scheme, cor52_scheme):
        k = kernel_constant_closed(scheme.params).value
        assert varpi(scheme, n) == pytest.approx(k, rel=1e-10)


@pytest.mark.parametrize("scheme_name", ["cor51_scheme", "cor52_scheme"])
def test_varpi_two_routes_agree(scheme_name, request):
    """Test the substituted incomplete moment against direct integration in x."""
    scheme = request.getfixturevalue(scheme_name)
    for n in (1, 3):
        substituted = varpi(scheme, n, method="substitution")
        direct = varpi(scheme, n, tol=1e-10, method="direct")
        assert direct == pytest.approx(substituted, rel=1e-7)


def test_varpi_below_constant_for_finite_u(finite_u_scheme):
    """Test ϖ < k(σ) when U(∞) is finite."""
    k = kernel_constant_closed(finite_u_scheme.params).value
    assert varpi(finite_u_scheme, 1) < k


def test_varpi_rejects_bad_arguments(cor54_scheme):
    """Test that n < 1 and unknown methods are rejected."""
    with pytest.raises(DomainError):
        varpi(cor54_scheme, 0)
    with pytest.raises(DomainError):
        varpi(cor54_scheme, 1, method="simpson")


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_weight_report_unit_scheme(cor54_scheme, x):
    """Test that every bound holds in the unit scheme."""
    report = weight_report(cor54_scheme, x, 2)
    assert set(report.verdicts) == {
        "omega_below_k",
        "varpi_at_most_k",
        "varpi_equals_k",
        "omega_above_lower",
    }
    assert all(v is Verdict.TRUE for v in report.verdicts.values())
    assert 0.0 < report.theta_value < 1.0
    assert report.to_record()["verdicts"]["omega_below_k"] == "true"


def test_weight_report_power_scheme(cor51_scheme):
    """Test that every bound holds with power measures and a shift."""
    report = weight_report(cor51_scheme, 1.0, 3)
    assert all(v is Verdict.TRUE for v in report.verdicts.values())
    assert report.omega < report.k_value


def test_weight_report_finite_u_skips_equality(finite_u_scheme):
    """Test that ϖ = k is not judged when U(∞) is finite."""
    report = weight_report(finite_u_scheme, 1.0, 1)
    assert "varpi_equals_k" not in report.verdicts
    assert report.verdicts["varpi_at_most_k"] is Verdict.TRUE


@pytest.mark.parametrize("scheme_name", ["cor54_scheme", "cor51_scheme"])
def test_hermite_hadamard_cells(scheme_name, request):
    """Test the strict midpoint inequality on the first cells at several scales."""
    scheme = request.getfixturevalue(scheme_name)
    for n in range(1, 6):
        for c in (0.1, 1.0, 10.0):
            assert hermite_hadamard_check(scheme, n, c) is Verdict.TRUE


def test_hermite_hadamard_detects_concavity(cor54_scheme):
    """Test that a concave profile fails the midpoint inequality."""
    assert hermite_hadamard_check(cor54_scheme, 2, 1.0, profile=np.sqrt) is Verdict.FALSE


def test_hermite_hadamard_rejects_bad_arguments(cor54_scheme):
    """Test that n < 1 and c <= 0 are rejected."""
    with pytest.raises(DomainError):
        hermite_hadamard_check(cor54_scheme, 0, 1.0)
    with pytest.raises(DomainError):
        hermite_hadamard_check(cor54_scheme, 1, 0.0)


@pytest.mark.parametrize(
    "g,points,from_one,from_half",
    [
        (lambda t: np.exp(-t), 1.0 / (math.e - 1.0), math.exp(-1.0), math.exp(-0.5)),
        (lambda t: t**-2.0, math.pi**2 / 6.0, 1.0, 2.0),
    ],
    ids=["exponential", "inverse_square"],
)
def test_sandwich_closed_forms(g, points, from_one, from_half):
    """Test ∫₁^∞ g < Σ g(n) < ∫_{1/2}^∞ g and each side for functions with known sums."""
    assert sandwich_verdict(g) is Verdict.TRUE
    terms = sandwich_terms(g, UnitSequence(), tol=1e-10)
    assert terms.at_points.value == pytest.approx(points, rel=1e-9)
    assert terms.from_one.value == pytest.approx(from_one, rel=1e-9)
    assert terms.from_half == pytest.approx(from_half, rel=1e-9)


def test_sandwich_terms_follow_the_measure():
    """Test the sides for g(t) = e^{−(V(t)−β)} with ν_n = n^{−1/2}, β = 1/2 against explicit cells."""
    dm = PowerSequence(0.5, beta=0.5)
    terms = sandwich_terms(lambda z: np.exp(-z), dm, tol=1e-10)

    w, nu = dm.shifted(np.arange(1, 5_001, dtype=float))
    assert terms.at_points.value == pytest.approx(np.sum(np.exp(-w)), rel=1e-9)
    # each cell [m, m+1] is ∫₀¹ e^{−(w_m + ν_{m+1}s)}ds
    cells = np.sum(np.exp(-w) * -np.expm1(-nu) / nu)
    assert terms.from_one.value == pytest.approx(cells, rel=1e-9)
    # V(t) − β runs over [0, 1/2] on [1/2, 1]
    assert terms.half_cell.value == pytest.approx(-math.expm1(-0.5), rel=1e-10)


def test_sandwich_check_depends_on_measure(cor54_params):
    """Test that the sandwich sides change with ν and β and the inequality still holds."""
    unit = Scheme(delta=1, cm=UnitDensity(), dm=UnitSequence(), params=cor54_params)
    shifted = Scheme(
        delta=1, cm=UnitDensity(), dm=PowerSequence(0.5, beta=0.25), params=cor54_params
    )
    def profile(z):
        return np.exp(-2.0 * np.sqrt(z))

    first = sandwich_terms(profile, unit.dm, tol=1e-10)
    second = sandwich_terms(profile, shifted.dm, tol=1e-10)
    assert first.at_points.value != pytest.approx(second.at_points.value, rel=1e-3)
    assert first.from_one.value != pytest.approx(second.from_one.value, rel=1e-3)
    for c in (0.1, 1.0, 10.0):
        assert sandwich_check(shifted, c) is Verdict.TRUE


@pytest.mark.parametrize("c", [0.1, 1.0, 10.0])
def test_sandwich_kernel_profile(cor54_scheme, c):
    """Test the sandwich for the kernel profile at several scales."""
    assert sandwich_check(cor54_scheme, c) is Verdict.TRUE


def test_sandwich_rejects_scale(cor54_scheme):
    """Test that the sandwich needs c > 0."""
    with pytest.raises(DomainError):
        sandwich_check(cor54_scheme, -1.0)


def test_omega_lower_bound_explicit(cor54_scheme):
    """Test ω(x) > k(1−θ) directly at a point far from the origin."""
    report = weight_report(cor54_scheme, 10.0, 1)
    assert report.omega > report.k_value * (1.0 - report.theta_value)
    assert math.isfinite(report.omega_error)


def test_weight_report_carries_measured_errors(finite_u_scheme):
    """Test that the reported ϖ error is the quadrature estimate and ω carries its bracket."""
    value, error = varpi_with_error(finite_u_scheme, 1, tol=1e-10)
    report = weight_report(finite_u_scheme, 1.0, 1, tol_quad=1e-10)
    assert report.varpi == value
    assert report.varpi_error == error
    assert 0.0 < error < 1e-8 * value
    assert report.omega_lower <= report.omega <= report.omega_upper


def test_varpi_direct_error_estimate(cor51_scheme):
    """Test that the direct route reports an error consistent with the substituted value."""
    substituted, _ = varpi_with_error(cor51_scheme, 2)
    direct, error = varpi_with_error(cor51_scheme, 2, tol=1e-10, method="direct")
    assert error >= 0.0
    assert abs(direct - substituted) <= max(1e-7 * substituted, 10.0 * error)


def _bound_schemes(unit_params, power_params):
    schemes = []
    for delta in (1, -1):
        for beta in (0.0, 0.5):
            schemes.append(Scheme(delta, UnitDensity(), UnitSequence(beta), unit_params))
            schemes.append(
                Scheme(delta, PowerDamped(0.5), PowerSequence(0.5, beta=beta), power_params)
            )
    return schemes


@pytest.mark.slow
def test_omega_bounds_on_scheme_grid(cor54_params, power_params):
    """Test k(1−θ) < ω < k on 30 points of [1e-3, 1e3] for both δ, both β and both families."""
    x = np.logspace(-3, 3, 30)
    for scheme in _bound_schemes(cor54_params, power_params):
        k = kernel_constant_closed(scheme.params).value
        u = scheme.cm.U(x)
        values = omega(scheme, x)
        first = u**scheme.delta * (scheme.dm.nu_1 - scheme.beta)
        lower = k * theta_complement(scheme.params, first)
        assert np.all(values < k), scheme
        assert np.all(values > lower), scheme


@pytest.mark.parametrize("min_terms", [256, 512])
def test_omega_stable_when_head_budget_doubles(monkeypatch, cor51_scheme, min_terms):
    """Test that a longer explicit head moves ω by less than the tolerance."""
    x = np.logspace(-2, 2, 9)
    base = omega(cor51_scheme, x, tol=1e-9)
    longer_head = functools.partial(series.sum_series, min_terms=min_terms)
    monkeypatch.setattr(weights, "sum_series", longer_head)
    longer = omega(cor51_scheme, x, tol=1e-9)
    np.testing.assert_allclose(longer, base, rtol=1e-8)
