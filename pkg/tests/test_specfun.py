"""
Tests for the special functions: Gamma, Beta and the Hurwitz zeta function.
"""

import math

import mpmath
import numpy as np
import pytest

from src.csch_hilbert.errors import ConvergenceError, DomainError
from src.csch_hilbert.specfun import (
    Accuracy,
    beta_function,
    gamma,
    hurwitz_zeta,
    log_gamma,
    riemann_zeta,
)


@pytest.mark.parametrize("y", [0.1, 0.5, 1.0, 1.5, 2.5, 7.0, 33.3, 120.0])
def test_gamma_matches_math(y):
    """Test Gamma against the standard library on both sides of the reflection switch."""
    assert gamma(y) == pytest.approx(math.gamma(y), rel=1e-12)


def test_gamma_large_argument():
    """Test that Gamma beyond the direct range agrees with its logarithm."""
    assert math.log(gamma(150.0)) == pytest.approx(math.lgamma(150.0), rel=1e-13)
    assert log_gamma(1000.0) == pytest.approx(math.lgamma(1000.0), rel=1e-13)


@pytest.mark.parametrize("y", [0.0, -1.0, -2.5])
def test_gamma_rejects_nonpositive(y):
    """Test that Gamma refuses y <= 0."""
    with pytest.raises(DomainError):
        gamma(y)


def test_beta_function():
    """Test B(2, 3) = 1/12 and B(1/2, 1/2) = π."""
    assert beta_function(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-12)
    assert beta_function(0.5, 0.5) == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize(
    "s,a",
    [(2.0, 1.0), (2.25, 0.75), (2.5, 0.5), (3.0, 2.0), (1.1, 0.3), (5.0, 1.5)],
)
def test_hurwitz_zeta_matches_mpmath(s, a):
    """Test the Euler-Maclaurin evaluation against mpmath."""
    assert hurwitz_zeta(s, a) == pytest.approx(float(mpmath.zeta(s, a)), rel=1e-11)


def test_riemann_zeta_two():
    """Test ζ(2) = π²/6."""
    assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-13)


def test_hurwitz_zeta_domain():
    """Test that s <= 1 and a <= 0 are rejected."""
    with pytest.raises(DomainError):
        hurwitz_zeta(1.0, 1.0)
    with pytest.raises(DomainError):
        hurwitz_zeta(2.0, 0.0)


def test_hurwitz_zeta_term_budget():
    """Test that an unreachable accuracy exhausts the term budget."""
    with pytest.raises(ConvergenceError) as excinfo:
        hurwitz_zeta(1.05, 1.0, Accuracy(target_rel_err=1e-300, max_terms=16))
    assert excinfo.value.value is not None


def test_accuracy_validation():
    """Test that a non-positive target accuracy is rejected."""
    with pytest.raises(DomainError):
        Accuracy(target_rel_err=0.0)


def _telescoping_cases(count=100):
    rng = np.random.default_rng(20240611)
    return list(zip(rng.uniform(1.05, 8.0, count), rng.uniform(0.01, 5.0, count)))


@pytest.mark.parametrize("s,a", _telescoping_cases())
def test_hurwitz_zeta_telescoping(s, a):
    """Test ζ(s, a) − ζ(s, a + 1) = a^{−s} over random arguments."""
    difference = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0)
    assert difference == pytest.approx(a ** (-s), rel=1e-9)


@pytest.mark.parametrize("s", [1.1, 2.0, 3.5])
def test_hurwitz_zeta_decreases_in_shift(s):
    """Test that ζ(s, a) strictly decreases as a grows."""
    values = [hurwitz_zeta(s, a) for a in np.linspace(0.05, 6.0, 40)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


@pytest.mark.parametrize("y", [0.3, 0.5, 1.7, 4.2, 11.5, 60.25])
def test_gamma_recurrence(y):
    """Test Γ(y + 1) = yΓ(y)."""
    assert gamma(y + 1.0) == pytest.approx(y * gamma(y), rel=1e-12)


@pytest.mark.parametrize("s,a", [(1.5, 1.0), (2.0, 0.5), (3.0, 0.25), (4.0, 2.5)])
def test_hurwitz_zeta_explicit_sum(s, a):
    """Test against a million explicit terms plus the two leading tail terms."""
    terms = 1_000_000
    shifted = np.arange(terms, dtype=float) + a
    end = terms + a
    explicit = np.sum(shifted ** (-s)) + end ** (1.0 - s) / (s - 1.0) + 0.5 * end ** (-s)
    assert hurwitz_zeta(s, a) == pytest.approx(explicit, rel=1e-10)


@pytest.mark.parametrize(
    "s,a,expected",
    [
        (3.0, 0.5, 7.0 * 1.2020569031595942),
        (1.5, 1.0, 2.6123753486854883),
        (4.0, 1.0, math.pi**4 / 90.0),
    ],
)
def test_hurwitz_zeta_known_values(s, a, expected):
    """Test ζ(3, 1/2) = 7ζ(3), ζ(3/2) and ζ(4) = π⁴/90."""
    assert hurwitz_zeta(s, a) == pytest.approx(expected, rel=1e-11)
    assert hurwitz_zeta(s, a) == pytest.approx(float(mpmath.zeta(s, a)), rel=1e-11)
