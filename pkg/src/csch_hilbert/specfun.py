"""
Special functions needed by the kernel constant.

Gamma uses a fixed Lanczos approximation (g=7, nine coefficients); the Hurwitz zeta
function uses Euler-Maclaurin summation with Bernoulli corrections up to B14.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# B_{2j} / (2j)! for j = 1..7
_BERNOULLI_RATIOS = tuple(
    b / math.factorial(2 * j)
    for j, b in enumerate(
        (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6),
        start=1,
    )
)


@dataclass(frozen=True)
class Accuracy:
    """Target accuracy of a series evaluation."""

    target_rel_err: float = 1e-12
    max_terms: int = 1_000_000

    def __post_init__(self) -> None:
        if not self.target_rel_err > 0:
            raise DomainError(f"target_rel_err must be > 0, got {self.target_rel_err}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_ACCURACY = Accuracy()


def _lanczos_sum(z: float) -> float:
    x = _LANCZOS_COEFFICIENTS[0]
    for i, coefficient in enumerate(_LANCZOS_COEFFICIENTS[1:], start=1):
        x += coefficient / (z + i)
    return x


def log_gamma(y: float) -> float:
    """
    Natural logarithm of Γ(y) for y > 0.

    Args:
        y: Positive argument

    Returns:
        ln Γ(y)

    Raises:
        DomainError: If y is not positive
    """
    if not y > 0:
        raise DomainError(f"gamma requires y > 0, got {y}")
    if y < 0.5:
        # reflection; sin(πy) > 0 on (0, 1/2)
        return math.log(math.pi / math.sin(math.pi * y)) - log_gamma(1.0 - y)
    z = y - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma(y: float) -> float:
    """
    Γ(y) for real y > 0 with relative error near 1e-15.

    Args:
        y: Positive argument

    Returns:
        Γ(y)

    Raises:
        DomainError: If y is not positive
    """
    if not y > 0:
        raise DomainError(f"gamma requires y > 0, got {y}")
    if y < 0.5:
        return math.pi / (math.sin(math.pi * y) * gamma(1.0 - y))
    if y > 140.0:
        return math.exp(log_gamma(y))
    z = y - 1.0
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def beta_function(x: float, y: float) -> float:
    """B(x, y) = Γ(x)Γ(y)/Γ(x+y) for x, y > 0."""
    return math.exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y))


def _euler_maclaurin(s: float, a: float, terms: int) -> tuple:
    """Return (value, size of the last Bernoulli correction) for a head of ``terms``."""
    head = np.power(np.arange(terms, dtype=float) + a, -s)
    base = terms + a
    corrections = []
    # rising factorial s(s+1)...(s+2j-2), updated two factors at a time
    rising = s
    power = base ** (-s - 1.0)
    for j, ratio in enumerate(_BERNOULLI_RATIOS, start=1):
        if j > 1:
            rising *= (s + 2 * j - 3) * (s + 2 * j - 2)
            power /= base * base
        corrections.append(ratio * rising * power)
    total = math.fsum(
        [
            *head.tolist(),
            base ** (1.0 - s) / (s - 1.0),
            0.5 * base ** (-s),
            *corrections,
        ]
    )
    return total, abs(corrections[-1])


def hurwitz_zeta(s: float, a: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """
    Hurwitz zeta function ζ(s, a) = Σ_{k≥0} (k+a)^{-s} for s > 1, a > 0.

    The head length grows until the last Bernoulli correction drops below the
    requested relative accuracy.

    Args:
        s: Exponent, s > 1
        a: Shift, a > 0
        accuracy: Target relative error and head-length budget

    Returns:
        ζ(s, a)

    Raises:
        DomainError: If s <= 1 or a <= 0
        ConvergenceError: If the budget is exhausted before the target is met
    """
    if not s > 1:
        raise DomainError(f"hurwitz_zeta requires s > 1, got s={s}")
    if not a > 0:
        raise DomainError(f"hurwitz_zeta requires a > 0, got a={a}")

    terms = max(8, int(math.ceil(s)))
    while True:
        terms = min(terms, accuracy.max_terms)
        value, last = _euler_maclaurin(s, a, terms)
        if last <= accuracy.target_rel_err * abs(value):
            logger.debug(f"hurwitz_zeta({s}, {a}) converged with {terms} head terms")
            return value
        if terms >= accuracy.max_terms:
            raise ConvergenceError(
                f"hurwitz_zeta({s}, {a}) did not reach {accuracy.target_rel_err} "
                f"within {accuracy.max_terms} terms",
                value=value,
                error=last,
            )
        terms *= 2


def riemann_zeta(s: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """ζ(s) = ζ(s, 1)."""
    return hurwitz_zeta(s, 1.0, accuracy)
