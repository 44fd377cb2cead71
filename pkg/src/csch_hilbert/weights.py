"""
Weight coefficients ω_δ(σ,x) and ϖ_δ(σ,n), their bounds by k(σ), and the two
structural checks (Hermite-Hadamard cell inequality and the sum/integral sandwich).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL_QUAD, DEFAULT_TOL_SUM, DEFAULT_VERDICT_GUARD
from .errors import DomainError
from .kernel import kernel_constant_closed, log_h_from_log, moment_split, theta
from .measures import DiscreteMeasure, Scheme, UnitSequence
from .models import Verdict, WeightReport, judge_at_most, judge_equal, judge_less
from .quadrature import QuadResult, integrate, tanh_sinh
from .series import SeriesResult, sum_series

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
Profile = Callable[[np.ndarray], np.ndarray]

# Gauss-Legendre nodes on [0, 1] for the integral of g over one unit cell
_CELL_NODES, _CELL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_CELL_NODES = 0.5 * (_CELL_NODES + 1.0)
_CELL_WEIGHTS = 0.5 * _CELL_WEIGHTS


def omega_series(scheme: Scheme, u: ArrayLike, tol: float = DEFAULT_TOL_SUM) -> SeriesResult:
    """
    ω as a function of u = U(x): Σ_n h(u^δ(V_n−β))·u^{δσ}·ν_{n+1}·(V_n−β)^{σ−1}.

    Vectorized over ``u``; the terms are combined in log space so that u^δ → 0
    (where h blows up) does not overflow.
    """
    log_u = np.log(np.atleast_1d(np.asarray(u, dtype=float)))
    delta, params = scheme.delta, scheme.params
    sigma = params.sigma

    def log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        log_w = np.log(w)[:, None]
        return (
            log_h_from_log(delta * log_u[None, :] + log_w, params)
            + delta * sigma * log_u[None, :]
            + np.log(nu)[:, None]
            + (sigma - 1.0) * log_w
        )

    result = sum_series(log_term, scheme.dm, tol)
    if np.ndim(u) == 0:
        return SeriesResult(
            float(result.value[0]),
            float(result.error[0]),
            result.terms,
            lower=float(result.lower[0]),
            upper=float(result.upper[0]),
            certified=result.certified,
        )
    return result


def omega(scheme: Scheme, x: ArrayLike, tol: float = DEFAULT_TOL_SUM) -> ArrayLike:
    """
    The weight coefficient ω_δ(σ, x).

    Args:
        scheme: Scheme (δ, μ, ν, kernel)
        x: Positive point(s)
        tol: Relative tolerance of the series

    Returns:
        ω at each x

    Raises:
        DomainError: If any x <= 0
        ConvergenceError: If the series head budget is exhausted
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"omega requires x > 0, got {x}")
    return omega_series(scheme, scheme.cm.U(arr), tol).value


def _varpi_substitution(scheme: Scheme, n: int, tol: float) -> Tuple[float, float]:
    params = scheme.params
    c = float(scheme.dm.V(n)) - scheme.beta
    u_limit = scheme.cm.u_limit
    if scheme.delta == 1:
        split = moment_split(params, c * u_limit, params.sigma, tol)
        return float(split.head[0]), float(split.error[0])
    if math.isinf(u_limit):
        k = kernel_constant_closed(params)
        return k.value, k.err_estimate
    split = moment_split(params, c / u_limit, params.sigma, tol)
    return float(split.tail[0]), float(split.error[0])


def _varpi_direct(scheme: Scheme, n: int, tol: float) -> Tuple[float, float]:
    params, cm, delta = scheme.params, scheme.cm, scheme.delta
    sigma = params.sigma
    log_c = math.log(float(scheme.dm.V(n)) - scheme.beta)

    def integrand(x: np.ndarray) -> np.ndarray:
        log_u = np.log(cm.U(x))
        return np.exp(
            log_h_from_log(delta * log_u + log_c, params)
            + sigma * log_c
            + np.log(cm.mu(x))
            + (delta * sigma - 1.0) * log_u
        )

    result = integrate(integrand, 0.0, math.inf, tol, closure=True)
    return float(result.value), float(result.error)


def varpi_with_error(
    scheme: Scheme, n: int, tol: float = DEFAULT_TOL_QUAD, method: str = "substitution"
) -> Tuple[float, float]:
    """
    ϖ_δ(σ, n) together with the error estimate of the quadrature behind it.

    See :func:`varpi` for the methods.

    Raises:
        DomainError: If n < 1 or the method is unknown
        ConvergenceError: If the quadrature does not converge
    """
    if n < 1:
        raise DomainError(f"varpi requires n >= 1, got {n}")
    if method == "substitution":
        return _varpi_substitution(scheme, n, tol)
    if method == "direct":
        return _varpi_direct(scheme, n, tol)
    raise DomainError(f"unknown varpi method {method!r}")


def varpi(
    scheme: Scheme, n: int, tol: float = DEFAULT_TOL_QUAD, method: str = "substitution"
) -> float:
    """
    The weight coefficient ϖ_δ(σ, n) = ∫₀^∞ h(U^δ(x)(V_n−β))(V_n−β)^σ μ(x)U^{δσ−1}(x)dx.

    ``method="substitution"`` uses v = (V_n−β)U^δ(x), which turns ϖ into an
    incomplete kernel moment; ``method="direct"`` integrates in x. The direct
    route needs U to grow at least like a power of x.

    Raises:
        DomainError: If n < 1 or the method is unknown
        ConvergenceError: If the quadrature does not converge
    """
    return varpi_with_error(scheme, n, tol, method)[0]


def _cell_profile(scheme: Scheme, c: float) -> Profile:
    params = scheme.params
    log_c = math.log(c)

    def profile(z: np.ndarray) -> np.ndarray:
        log_z = np.log(z)
        return np.exp(log_h_from_log(log_c + log_z, params) + (params.sigma - 1.0) * log_z)

    return profile


def hermite_hadamard_check(
    scheme: Scheme,
    n: int,
    c: float,
    tol: float = DEFAULT_TOL_QUAD,
    profile: Optional[Profile] = None,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> Verdict:
    """
    Decide f(n) < ∫_{n−½}^{n+½} f(y)dy for f(y) = h(c(V(y)−β))(V(y)−β)^{σ−1}.

    Each half cell is integrated in its offset from the cell midpoint value of V so
    that a zero of V(y) − β at y = ½ stays an exact endpoint.

    Args:
        scheme: Scheme supplying ν, β and the kernel
        n: Cell index, n >= 1
        c: Positive scale
        tol: Quadrature tolerance
        profile: Replacement for z ↦ h(cz)z^{σ−1}, evaluated at z = V(y) − β
        guard: Relative verdict guard

    Returns:
        Verdict of the strict inequality
    """
    if n < 1 or not c > 0:
        raise DomainError(f"hermite_hadamard_check requires n >= 1 and c > 0, got n={n}, c={c}")
    dm = scheme.dm
    g = profile if profile is not None else _cell_profile(scheme, c)
    nu_n = float(dm.nu(n))
    nu_next = float(dm.nu(n + 1))
    at_node = float(dm.V(n)) - dm.beta
    # V(n−½) − β, grouped so that n = 1 with β = ν₁/2 gives exactly 0
    left_base = (0.5 * nu_n - dm.beta) + float(dm.V(n - 1))

    left = tanh_sinh(lambda d: g(left_base + d * nu_n), 0.0, 0.5, tol, closure=left_base == 0.0)
    right = tanh_sinh(lambda d: g(at_node + d * nu_next), 0.0, 0.5, tol)
    value = float(np.asarray(g(np.array([at_node])))[0])
    cell = left.value + right.value
    verdict = judge_less(value, cell, left.error + right.error, guard)
    logger.debug(f"Hermite-Hadamard n={n}, c={c}: f(n)={value:.12g}, cell={cell:.12g} -> {verdict}")
    return verdict


@dataclass
class SandwichTerms:
    """Σ_{n≥1} g(n), ∫₁^∞ g and ∫_{1/2}^1 g for g(t) = profile(V(t) − β).

    V is continued linearly between the integers, with slope ν_{n+1} on [n, n+1].
    """

    at_points: SeriesResult
    from_one: SeriesResult
    half_cell: QuadResult

    @property
    def from_half(self) -> float:
        return float(self.from_one.value + self.half_cell.value)


def sandwich_terms(
    profile: Profile, dm: DiscreteMeasure, tol: float = DEFAULT_TOL_QUAD
) -> SandwichTerms:
    """
    The three sides of the sandwich for a positive decreasing ``profile`` of V − β.

    ∫₁^∞ g is summed cell by cell, each cell ∫₀¹ profile(V_m − β + ν_{m+1}s)ds by
    Gauss-Legendre, so that the cell integrals ride on the same series summation
    as the point values.
    """

    def point_log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(profile(w))

    def cell_log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        cell = np.zeros_like(w)
        for node, weight in zip(_CELL_NODES, _CELL_WEIGHTS):
            cell = cell + weight * profile(w + nu * node)
        with np.errstate(divide="ignore"):
            return np.log(cell)

    at_points = sum_series(point_log_term, dm, tol)
    from_one = sum_series(cell_log_term, dm, tol)
    nu_1 = dm.nu_1
    # V(t) − β = tν₁ − β on [1/2, 1]; grouped so that β = ν₁/2 gives exactly 0
    start = 0.5 * nu_1 - dm.beta
    half = tanh_sinh(profile, start, nu_1 - dm.beta, tol, closure=start == 0.0)
    half_cell = QuadResult(half.value / nu_1, half.error / nu_1, half.levels, half.evaluations)
    return SandwichTerms(at_points, from_one, half_cell)


def sandwich_verdict(
    profile: Profile,
    dm: Optional[DiscreteMeasure] = None,
    tol: float = DEFAULT_TOL_QUAD,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> Verdict:
    """
    Decide ∫₁^∞ g < Σ_{n≥1} g(n) < ∫_{1/2}^∞ g for g(t) = profile(V(t) − β).

    Args:
        profile: Positive decreasing convex function of V − β
        dm: Discrete measure supplying V and β (ν ≡ 1, β = 0 when omitted, so g = profile)
        tol: Tolerance of the quadratures and of the series
        guard: Relative verdict guard

    Returns:
        Combined verdict of both strict inequalities
    """
    terms = sandwich_terms(profile, dm if dm is not None else UnitSequence(), tol)
    total, from_one = terms.at_points, terms.from_one
    from_half = terms.from_half
    logger.debug(f"sandwich: {from_one.value:.12g} < {total.value:.12g} < {from_half:.12g}")
    return Verdict.combine(
        [
            judge_less(from_one.value, total.value, from_one.error + total.error, guard),
            judge_less(
                total.value,
                from_half,
                from_one.error + terms.half_cell.error + total.error,
                guard,
            ),
        ]
    )


def sandwich_check(
    scheme: Scheme,
    c: float,
    tol: float = DEFAULT_TOL_QUAD,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> Verdict:
    """The sandwich inequality for g(t) = h(c(V(t)−β))(V(t)−β)^{σ−1} on the scheme's ν and β."""
    if not c > 0:
        raise DomainError(f"sandwich_check requires c > 0, got {c}")
    return sandwich_verdict(_cell_profile(scheme, c), scheme.dm, tol, guard)


def weight_report(
    scheme: Scheme,
    x: float,
    n: int,
    tol_quad: float = DEFAULT_TOL_QUAD,
    tol_sum: float = DEFAULT_TOL_SUM,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> WeightReport:
    """
    ω, ϖ, θ and k at one (x, n) pair with the verdicts of their bounds.

    The bound ϖ = k is only judged when U(∞) = ∞, and ω > k(1−θ) only when V(∞) = ∞.
    The errors carried into the verdicts are the estimates measured by the series
    and the quadrature.
    """
    params = scheme.params
    k = kernel_constant_closed(params)
    u = float(scheme.cm.U(x))
    if not u > 0:
        raise DomainError(f"weight_report requires x > 0, got {x}")
    om = omega_series(scheme, u, tol_sum)
    vp, vp_error = varpi_with_error(scheme, n, tol_quad)
    th = float(theta(params, u**scheme.delta * (scheme.dm.nu_1 - scheme.beta), tol_quad))

    verdicts = {
        "omega_below_k": judge_less(om.value, k.value, om.error + k.err_estimate, guard),
        "varpi_at_most_k": judge_at_most(vp, k.value, vp_error + k.err_estimate, guard),
    }
    if scheme.cm.u_infinite:
        verdicts["varpi_equals_k"] = judge_equal(
            vp, k.value, vp_error + k.err_estimate, max(10.0 * tol_quad, 1e-12)
        )
    if scheme.dm.v_infinite:
        lower = k.value * (1.0 - th)
        verdicts["omega_above_lower"] = judge_less(
            lower, om.value, om.error + tol_quad * k.value, guard
        )
    return WeightReport(
        x=float(x),
        n=int(n),
        omega=float(om.value),
        omega_error=float(om.error),
        varpi=vp,
        varpi_error=vp_error,
        k_value=k.value,
        theta_value=th,
        verdicts=verdicts,
        omega_lower=om.lower if om.certified else None,
        omega_upper=om.upper if om.certified else None,
    )
