"""
Norms, the bilinear form I, the functionals J₁, J₂ and J, and verification of the
inequality triples in the forward and both reverse Hölder regimes.

Every x-integral is taken in u = U(x). All integrands have the form μ(x)·G(U(x)),
so a test function f is represented by its reduced profile φ(u) = f(x)/μ(x) and
f(x)dx becomes φ(u)du.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL_QUAD, DEFAULT_TOL_SUM, DEFAULT_VERDICT_GUARD
from .errors import DivergenceError, DomainError
from .kernel import kernel_constant_closed, log_h_from_log, theta_complement
from .measures import Scheme, tail_sum
from .models import EquivalenceReport, VerificationReport, judge_at_most, judge_less
from .quadrature import QuadResult, integrate_pieces
from .series import SeriesResult, sum_series
from .specfun import beta_function

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
Pieces = List[Tuple[float, float]]

# inner evaluations of nested computations run this much tighter than the outer one
INNER_FACTOR = 1e-2
# relative agreement required of the two sides of each substitution identity
EQUIVALENCE_TOL = 1e-8
EXTREMAL_EQUIVALENCE_TOL = 1e-6
# columns of C(w) are integrated in bands of ln w this wide
_BAND_NATS = 20.0
_BAND_MARGIN = 5.0


class Regime(str, Enum):
    FORWARD = "forward"
    REVERSE_NEG = "reverse_neg"
    REVERSE_FRAC = "reverse_frac"


@dataclass(frozen=True)
class HolderPair:
    """Conjugate exponents p and q = p/(p−1), p ∉ {0, 1}."""

    p: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.p) or self.p in (0.0, 1.0):
            raise DomainError(f"exponent must satisfy p ≠ 0,1, got p={self.p}")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def regime(self) -> Regime:
        if self.p > 1.0:
            return Regime.FORWARD
        if self.p < 0.0:
            return Regime.REVERSE_NEG
        return Regime.REVERSE_FRAC


class WeightKind(str, Enum):
    PHI = "phi"
    PHI_TILDE = "phi_tilde"


def default_weight_kind(regime: Regime) -> WeightKind:
    return WeightKind.PHI_TILDE if regime is Regime.REVERSE_FRAC else WeightKind.PHI


def _upper_theta_argument(scheme: Scheme, u: np.ndarray) -> np.ndarray:
    return np.exp(scheme.delta * np.log(u)) * (scheme.dm.nu_1 - scheme.beta)


@dataclass(frozen=True)
class NormWeights:
    """The weights Φ_δ, Φ̃_δ on x and Ψ_β on n."""

    hp: HolderPair
    scheme: Scheme
    kind: WeightKind = WeightKind.PHI

    def phi(self, x: ArrayLike) -> ArrayLike:
        """Φ_δ(x) = U^{p(1−δσ)−1}(x)/μ^{p−1}(x)."""
        p, sigma, delta = self.hp.p, self.scheme.params.sigma, self.scheme.delta
        cm = self.scheme.cm
        return np.asarray(cm.U(x)) ** (p * (1.0 - delta * sigma) - 1.0) / np.asarray(
            cm.mu(x)
        ) ** (p - 1.0)

    def phi_tilde(self, x: ArrayLike) -> ArrayLike:
        """Φ̃_δ(x) = (1 − θ_δ(σ,x))·Φ_δ(x)."""
        u = np.atleast_1d(np.asarray(self.scheme.cm.U(x), dtype=float))
        complement = theta_complement(self.scheme.params, _upper_theta_argument(self.scheme, u))
        values = complement * np.atleast_1d(self.phi(x))
        return float(values[0]) if np.ndim(x) == 0 else values

    def psi(self, n: ArrayLike) -> ArrayLike:
        """Ψ_β(n) = (V_n−β)^{q(1−σ)−1}/ν_{n+1}^{q−1}."""
        q, sigma = self.hp.q, self.scheme.params.sigma
        w, nu = self.scheme.dm.shifted(np.asarray(n, dtype=float))
        values = w ** (q * (1.0 - sigma) - 1.0) / nu ** (q - 1.0)
        return float(values) if np.ndim(n) == 0 else values

    def log_density(self, u: np.ndarray, tol: float) -> np.ndarray:
        """ln of the u-space weight of ‖f‖^p: u^{p(1−δσ)−1}, times 1−θ for Φ̃."""
        p, sigma, delta = self.hp.p, self.scheme.params.sigma, self.scheme.delta
        log_u = np.log(u)
        values = (p * (1.0 - delta * sigma) - 1.0) * log_u
        if self.kind is WeightKind.PHI_TILDE:
            complement = theta_complement(
                self.scheme.params, _upper_theta_argument(self.scheme, u), tol
            )
            with np.errstate(divide="ignore"):
                values = values + np.log(complement)
        return values


def _default_pieces(scheme: Scheme) -> Pieces:
    limit = scheme.cm.u_limit
    if limit <= 1.0:
        return [(0.0, limit)]
    return [(0.0, 1.0), (1.0, limit)]


class TestFunction(ABC):
    """A nonnegative function f on (0, ∞), given by its reduced profile φ(u) = f/μ."""

    __test__ = False
    strictly_positive: bool = False

    @abstractmethod
    def log_profile(self, u: np.ndarray, scheme: Scheme) -> np.ndarray:
        """ln φ(u); −inf where f vanishes."""

    def pieces(self, scheme: Scheme) -> Pieces:
        """u-intervals covering the support of φ, split where φ has kinks."""
        return _default_pieces(scheme)

    def closed_norm_power(self, hp: HolderPair, scheme: Scheme) -> Optional[float]:
        """Exact ‖f‖^p under Φ_δ when known."""
        return None

    def value(self, x: ArrayLike, scheme: Scheme) -> ArrayLike:
        """f(x) = μ(x)·φ(U(x))."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        values = np.asarray(scheme.cm.mu(arr)) * np.exp(
            self.log_profile(np.asarray(scheme.cm.U(arr)), scheme)
        )
        return float(values[0]) if np.ndim(x) == 0 else values


class SmoothPositive(TestFunction):
    """φ(u) = u^{δσ−1}·g(u^δ) with g(v) = (v/(1+v)²)^τ; ‖f‖^p = B(pτ, pτ) when U(∞)=∞."""

    strictly_positive = True

    def __init__(self, tau: float):
        self.tau = float(tau)

    def log_profile(self, u: np.ndarray, scheme: Scheme) -> np.ndarray:
        delta, sigma = scheme.delta, scheme.params.sigma
        log_v = delta * np.log(u)
        return (delta * sigma - 1.0) * np.log(u) + self.tau * (
            log_v - 2.0 * np.logaddexp(0.0, log_v)
        )

    def closed_norm_power(self, hp: HolderPair, scheme: Scheme) -> Optional[float]:
        if not scheme.cm.u_infinite:
            return None
        a = hp.p * self.tau
        return beta_function(a, a) if a > 0 else math.inf

    def __repr__(self) -> str:
        return f"SmoothPositive(tau={self.tau:g})"


class ExtremalCutoff(TestFunction):
    """
    φ(u) = u^{δ(σ+ε/p)−1} on the region 0 < x^δ ≤ 1 and zero elsewhere.

    With ``continuation`` the function stays positive off that region:
    φ(u) = U(1)^{δε/p}·u^{δσ−1}·r^λ with r = (u/U(1))^δ, continuous at x = 1.
    """

    def __init__(self, eps: float, hp: HolderPair, continuation: bool = False, lam: float = 1.0):
        self.eps = float(eps)
        self.hp = hp
        self.continuation = continuation
        self.lam = float(lam)
        self.strictly_positive = continuation

    def _cutoff(self, scheme: Scheme) -> float:
        return float(scheme.cm.U(1.0))

    def log_profile(self, u: np.ndarray, scheme: Scheme) -> np.ndarray:
        delta, sigma = scheme.delta, scheme.params.sigma
        log_u = np.log(u)
        log_cut = math.log(self._cutoff(scheme))
        exponent = sigma + self.eps / self.hp.p
        inside = (delta * exponent - 1.0) * log_u
        on_support = delta * (log_u - log_cut) <= 0.0
        if self.continuation:
            outside = (
                delta * self.eps / self.hp.p * log_cut
                + (delta * sigma - 1.0) * log_u
                + self.lam * delta * (log_u - log_cut)
            )
        else:
            outside = np.full_like(log_u, -np.inf)
        return np.where(on_support, inside, outside)

    def pieces(self, scheme: Scheme) -> Pieces:
        cut = self._cutoff(scheme)
        limit = scheme.cm.u_limit
        support = (0.0, cut) if scheme.delta == 1 else (cut, limit)
        if not self.continuation:
            return [support]
        rest = (cut, limit) if scheme.delta == 1 else (0.0, cut)
        return sorted([support, rest])

    def closed_norm_power(self, hp: HolderPair, scheme: Scheme) -> Optional[float]:
        if not scheme.cm.u_infinite:
            return None
        cut_power = self._cutoff(scheme) ** (scheme.delta * self.eps)
        value = cut_power / self.eps
        if self.continuation:
            value += cut_power / (self.lam * abs(hp.p))
        return value

    def __repr__(self) -> str:
        return f"ExtremalCutoff(eps={self.eps:g}, continuation={self.continuation})"


class CallableFunction(TestFunction):
    """Wraps a vectorized f(x); φ is evaluated at x = U⁻¹(u)."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], strictly_positive: bool = False):
        self.func = func
        self.strictly_positive = strictly_positive

    def log_profile(self, u: np.ndarray, scheme: Scheme) -> np.ndarray:
        x = np.asarray(scheme.cm.U_inverse(u), dtype=float)
        finite = np.isfinite(x) & (x > 0)
        safe = np.where(finite, x, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.log(np.asarray(self.func(safe), dtype=float)) - np.log(
                np.asarray(scheme.cm.mu(safe), dtype=float)
            )
        return np.where(finite, values, -np.inf)


class TestSequence(ABC):
    """A nonnegative sequence a_n, evaluated in log form from (n, V_n−β, ν_{n+1})."""

    __test__ = False
    strictly_positive: bool = False
    length: Optional[int] = None

    @abstractmethod
    def log_terms(self, n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        """ln a_n; −inf where a_n = 0."""

    def closed_norm_power(self, hp: HolderPair, scheme: Scheme) -> Optional[float]:
        return None


class PowerProfile(TestSequence):
    """a_n = (V_n−β)^m·ν_{n+1}."""

    strictly_positive = True

    def __init__(self, exponent: float):
        self.exponent = float(exponent)

    def log_terms(self, n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return self.exponent * np.log(w) + np.log(nu)

    def closed_norm_power(self, hp: HolderPair, scheme: Scheme) -> Optional[float]:
        if not scheme.dm.v_infinite:
            return None
        b = -hp.q * (1.0 - scheme.params.sigma + self.exponent)
        return tail_sum(b, scheme.dm) if b > 0 else math.inf

    def __repr__(self) -> str:
        return f"PowerProfile(exponent={self.exponent:g})"


class FiniteSequence(TestSequence):
    """a_1, …, a_L followed by zeros."""

    def __init__(self, values: Sequence[float]):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or len(self.values) == 0 or np.any(self.values < 0):
            raise DomainError("finite sequence needs a non-empty list of nonnegative values")
        self.length = len(self.values)

    def log_terms(self, n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        index = np.clip(np.asarray(n, dtype=np.int64) - 1, 0, self.length - 1)
        with np.errstate(divide="ignore"):
            return np.where(n <= self.length, np.log(self.values[index]), -np.inf)


class CallableSequence(TestSequence):
    """Wraps a vectorized n ↦ a_n."""

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        length: Optional[int] = None,
        strictly_positive: bool = False,
    ):
        self.func = func
        self.length = length
        self.strictly_positive = strictly_positive

    def log_terms(self, n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.func(n), dtype=float))


def _split_pieces(pieces: Pieces, point: float) -> Pieces:
    split: Pieces = []
    for lo, hi in pieces:
        if lo < point < hi:
            split.extend([(lo, point), (point, hi)])
        else:
            split.append((lo, hi))
    return split


def kernel_integrals(f: TestFunction, scheme: Scheme, w: np.ndarray, tol: float) -> np.ndarray:
    """
    C(w) = ∫ h(U^δ(x)·w) f(x)dx for each w.

    The mass of C(w) sits near u^δ = 1/w. Columns are grouped by ln w in bands of
    _BAND_NATS; a band beyond the first gets a breakpoint at u^δ = e^{_BAND_MARGIN}/w_band
    so that its nodes reach far enough past the kernel's cutoff. Columns of a band
    share one set of nodes.
    """
    log_w = np.log(np.atleast_1d(np.asarray(w, dtype=float)))
    delta, params = scheme.delta, scheme.params
    pieces = f.pieces(scheme)
    bands = np.floor(log_w / _BAND_NATS)
    values = np.empty_like(log_w)

    for band in np.unique(bands):
        members = bands == band
        band_log_w = log_w[members]

        def integrand(u: np.ndarray, band_log_w: np.ndarray = band_log_w) -> np.ndarray:
            log_u = np.log(u)[:, None]
            return np.exp(
                log_h_from_log(delta * log_u + band_log_w[None, :], params)
                + f.log_profile(u, scheme)[:, None]
            )

        band_pieces = pieces
        if band >= 1:
            point = math.exp(-delta * (band * _BAND_NATS - _BAND_MARGIN))
            band_pieces = _split_pieces(pieces, point)
        result = integrate_pieces(integrand, band_pieces, tol, closure=True)
        values[members] = np.atleast_1d(result.value)
    return values


def kernel_sums(a: TestSequence, scheme: Scheme, u: np.ndarray, tol: float) -> np.ndarray:
    """S(u) = Σ_n h(u^δ(V_n−β))·a_n for each u."""
    log_u = np.log(np.atleast_1d(np.asarray(u, dtype=float)))
    delta, params = scheme.delta, scheme.params

    def log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return (
            log_h_from_log(delta * log_u[None, :] + np.log(w)[:, None], params)
            + a.log_terms(n, w, nu)[:, None]
        )

    return np.atleast_1d(sum_series(log_term, scheme.dm, tol, length=a.length).value)


class DerivedSequence(TestSequence):
    """a_n = ν_{n+1}(V_n−β)^{pσ−1}·C_n^{p−1}, the sequence that turns J₁^p into ‖a‖^q."""

    strictly_positive = True

    def __init__(self, f: TestFunction, hp: HolderPair, scheme: Scheme, tol: float):
        self.f = f
        self.hp = hp
        self.scheme = scheme
        self.tol = tol

    def log_terms(self, n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        p, sigma = self.hp.p, self.scheme.params.sigma
        integrals = kernel_integrals(self.f, self.scheme, w, self.tol)
        with np.errstate(divide="ignore"):
            return np.log(nu) + (p * sigma - 1.0) * np.log(w) + (p - 1.0) * np.log(integrals)


class DerivedFunction(TestFunction):
    """φ(u) = u^{qδσ−1}·S(u)^{q−1}, the function that turns J₂^q into ‖f‖^p."""

    strictly_positive = True

    def __init__(self, a: TestSequence, hp: HolderPair, scheme: Scheme, tol: float):
        self.a = a
        self.hp = hp
        self.scheme = scheme
        self.tol = tol

    def log_profile(self, u: np.ndarray, scheme: Scheme) -> np.ndarray:
        q, sigma, delta = self.hp.q, scheme.params.sigma, scheme.delta
        sums = kernel_sums(self.a, scheme, u, self.tol)
        with np.errstate(divide="ignore"):
            return (q * delta * sigma - 1.0) * np.log(u) + (q - 1.0) * np.log(sums)


def _require_positive_profile(f: TestFunction, hp: HolderPair) -> None:
    if hp.p < 0 and not f.strictly_positive:
        raise DomainError(
            f"f must be strictly positive for p={hp.p} < 0; {f!r} vanishes somewhere"
        )


def _require_positive_sequence(a: TestSequence, hp: HolderPair) -> None:
    if hp.q < 0 and (not a.strictly_positive or a.length is not None):
        raise DomainError(
            f"a must be strictly positive for q={hp.q:g} < 0; {a!r} vanishes somewhere"
        )


def _as_norm(power: float, exponent: float, name: str) -> float:
    if power == 0.0:
        raise DomainError(f"{name} vanishes; the norm must be positive")
    if not math.isfinite(power):
        raise DivergenceError(f"{name} is infinite")
    return power ** (1.0 / exponent)


def norm_f_power(
    f: TestFunction, hp: HolderPair, scheme: Scheme, weights: NormWeights, tol: float
) -> QuadResult:
    """∫ Φ f^p dx (or with Φ̃), before taking the 1/p power."""
    _require_positive_profile(f, hp)
    p = hp.p

    def integrand(u: np.ndarray) -> np.ndarray:
        log_phi = f.log_profile(u, scheme)
        if p < 0 and np.any(np.isneginf(log_phi)):
            bad = u[np.isneginf(log_phi)][0]
            raise DomainError(
                f"f vanishes at x={float(scheme.cm.U_inverse(bad)):.6g}; p={p} < 0 needs f > 0"
            )
        return np.exp(weights.log_density(u, INNER_FACTOR * tol) + p * log_phi)

    return integrate_pieces(integrand, f.pieces(scheme), tol, closure=True)


def norm_f(
    f: TestFunction,
    hp: HolderPair,
    scheme: Scheme,
    weights: Optional[NormWeights] = None,
    tol: float = DEFAULT_TOL_QUAD,
) -> float:
    """
    ‖f‖_{p,Φ} = (∫₀^∞ Φ(x)f^p(x)dx)^{1/p}, formal also for p < 0 and 0 < p < 1.

    Args:
        f: Test function
        hp: Hölder pair
        scheme: Scheme
        weights: Φ_δ or Φ̃_δ; Φ_δ when omitted
        tol: Relative tolerance

    Returns:
        The weighted norm

    Raises:
        DomainError: If the norm vanishes or f touches zero while p < 0
        DivergenceError: If the integral diverges
    """
    weights = weights or NormWeights(hp, scheme)
    power = norm_f_power(f, hp, scheme, weights, tol)
    return _as_norm(float(power.value), hp.p, "‖f‖^p")


def norm_a_power(a: TestSequence, hp: HolderPair, scheme: Scheme, tol: float) -> SeriesResult:
    """Σ Ψ_β(n)a_n^q, before taking the 1/q power."""
    _require_positive_sequence(a, hp)
    q, sigma = hp.q, scheme.params.sigma

    def log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        log_a = a.log_terms(n, w, nu)
        if q < 0 and np.any(np.isneginf(log_a)):
            raise DomainError(f"a vanishes at n={int(n[np.isneginf(log_a)][0])}; q < 0 needs a > 0")
        return (q * (1.0 - sigma) - 1.0) * np.log(w) + (1.0 - q) * np.log(nu) + q * log_a

    return sum_series(log_term, scheme.dm, tol, length=a.length)


def norm_a(
    a: TestSequence,
    hp: HolderPair,
    scheme: Scheme,
    weights: Optional[NormWeights] = None,
    tol: float = DEFAULT_TOL_SUM,
) -> float:
    """
    ‖a‖_{q,Ψ} = (Σ_{n≥1} Ψ_β(n)a_n^q)^{1/q}.

    Raises:
        DomainError: If the norm vanishes or a touches zero while q < 0
        DivergenceError: If the series diverges
    """
    power = norm_a_power(a, hp, scheme, tol)
    return _as_norm(float(power.value), hp.q, "‖a‖^q")


def bilinear_I(
    f: TestFunction, a: TestSequence, scheme: Scheme, tol: float = DEFAULT_TOL_SUM
) -> QuadResult:
    """
    I = Σ_n ∫₀^∞ h(U^δ(x)(V_n−β))a_n f(x)dx, computed as ∫ φ(u)S(u)du.

    The inner sums run ``INNER_FACTOR`` tighter than the outer quadrature.
    """
    inner = INNER_FACTOR * tol

    def integrand(u: np.ndarray) -> np.ndarray:
        return np.exp(f.log_profile(u, scheme)) * kernel_sums(a, scheme, u, inner)

    return integrate_pieces(integrand, f.pieces(scheme), tol, closure=True)


def j1_power(f: TestFunction, hp: HolderPair, scheme: Scheme, tol: float) -> SeriesResult:
    """Σ_n ν_{n+1}(V_n−β)^{pσ−1}·C_n^p."""
    p, sigma = hp.p, scheme.params.sigma
    inner = INNER_FACTOR * tol

    def log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        integrals = kernel_integrals(f, scheme, w, inner)
        with np.errstate(divide="ignore"):
            return np.log(nu) + (p * sigma - 1.0) * np.log(w) + p * np.log(integrals)

    return sum_series(log_term, scheme.dm, tol)


def J1(f: TestFunction, hp: HolderPair, scheme: Scheme, tol: float = DEFAULT_TOL_SUM) -> float:
    """
    J₁ = {Σ_n ν_{n+1}/(V_n−β)^{1−pσ}·[∫₀^∞ h(U^δ(x)(V_n−β))f(x)dx]^p}^{1/p}.

    Returns 0 for f ≡ 0 when p > 0.
    """
    power = float(j1_power(f, hp, scheme, tol).value)
    return power ** (1.0 / hp.p) if power > 0 else 0.0


def j2_power(
    a: TestSequence,
    hp: HolderPair,
    scheme: Scheme,
    tol: float,
    theta_factor: bool = False,
) -> QuadResult:
    """∫ u^{qδσ−1}[(1−θ)^{1−q}]S(u)^q du, with the bracketed factor when ``theta_factor``."""
    q, sigma, delta = hp.q, scheme.params.sigma, scheme.delta
    inner = INNER_FACTOR * tol

    def integrand(u: np.ndarray) -> np.ndarray:
        sums = kernel_sums(a, scheme, u, inner)
        underflow = sums == 0.0
        if q < 0 and not theta_factor and underflow.any():
            raise DivergenceError(
                f"S(u) underflows at u={float(u[underflow][0]):.6g}; S^q with q={q:g} < 0 "
                "is not integrable without the 1−θ factor"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            log_values = (q * delta * sigma - 1.0) * np.log(u) + q * np.log(sums)
            if theta_factor:
                complement = theta_complement(
                    scheme.params, _upper_theta_argument(scheme, u), inner
                )
                log_values = log_values + (1.0 - q) * np.log(complement)
        # (1−θ)^{1−q}S^q decays like S itself, so it is below the smallest double where S is
        return np.exp(np.where(underflow, -np.inf, log_values))

    return integrate_pieces(integrand, _default_pieces(scheme), tol, closure=True)


def J2(
    a: TestSequence,
    hp: HolderPair,
    scheme: Scheme,
    tol: float = DEFAULT_TOL_SUM,
    theta_factor: Optional[bool] = None,
) -> float:
    """
    J₂ = {∫₀^∞ μ(x)/U^{1−qδσ}(x)·[Σ_n h(U^δ(x)(V_n−β))a_n]^q dx}^{1/q}.

    In the regime 0 < p < 1 the variant J carries the extra factor (1−θ_δ(σ,x))^{1−q};
    ``theta_factor`` defaults to that choice.
    """
    if theta_factor is None:
        theta_factor = hp.regime is Regime.REVERSE_FRAC
    _require_positive_sequence(a, hp)
    power = float(j2_power(a, hp, scheme, tol, theta_factor).value)
    return power ** (1.0 / hp.q) if power > 0 else 0.0


def smooth_pair(
    hp: HolderPair,
    scheme: Scheme,
    tau: Optional[float] = None,
    kappa: Optional[float] = None,
) -> Tuple[SmoothPositive, PowerProfile]:
    """
    A strictly positive pair with every functional finite in the given regime.

    f has reduced profile u^{δσ−1}(u^δ/(1+u^δ)²)^τ and a_n = (V_n−β)^{σ−1−κ}ν_{n+1}.
    The defaults are τ = κ = (σ−γ)/2 for p > 1, τ = −(σ−γ)/4, κ = (σ−γ)/2 for p < 0,
    and τ = (σ−γ)/2, κ = −(σ−γ)/4 for 0 < p < 1.

    Raises:
        DomainError: If (τ, κ) leaves a norm or functional infinite
    """
    gap = scheme.params.sigma - scheme.params.gamma
    defaults = {
        Regime.FORWARD: (0.5 * gap, 0.5 * gap),
        Regime.REVERSE_NEG: (-0.25 * gap, 0.5 * gap),
        Regime.REVERSE_FRAC: (0.5 * gap, -0.25 * gap),
    }[hp.regime]
    tau = defaults[0] if tau is None else float(tau)
    kappa = defaults[1] if kappa is None else float(kappa)
    checks = {
        "pτ > 0": hp.p * tau > 0,
        "qκ > 0": hp.q * kappa > 0,
        "τ > γ−σ": tau > -gap,
        "κ < σ−γ": kappa < gap,
        "τ+κ > 0": tau + kappa > 0,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise DomainError(
            f"smooth pair with tau={tau:g}, kappa={kappa:g} violates {', '.join(failed)}"
        )
    return SmoothPositive(tau), PowerProfile(scheme.params.sigma - 1.0 - kappa)


def _check_hypotheses(hp: HolderPair, scheme: Scheme, weights: NormWeights) -> None:
    expected = default_weight_kind(hp.regime)
    if weights.kind is not expected:
        raise DomainError(
            f"regime {hp.regime.value} requires the {expected.value} weight, "
            f"got {weights.kind.value}"
        )
    if hp.regime is not Regime.FORWARD and not (scheme.cm.u_infinite and scheme.dm.v_infinite):
        raise DomainError(f"regime {hp.regime.value} requires U(∞) = V(∞) = ∞")


def _relative(result: Union[QuadResult, SeriesResult], tol: float) -> float:
    value = abs(float(result.value))
    return tol + (float(result.error) / value if value > 0 else 0.0)


def verify(
    hp: HolderPair,
    f: TestFunction,
    a: TestSequence,
    scheme: Scheme,
    weights: Optional[NormWeights] = None,
    tol_quad: float = DEFAULT_TOL_QUAD,
    tol_sum: float = DEFAULT_TOL_SUM,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> VerificationReport:
    """
    Evaluate I, J₁, J₂ (or J), both norms and k(σ), and judge the three inequalities.

    In the forward regime all three relations are "<"; in both reverse regimes they
    are ">" with the regime's weight. A relation whose slack lies inside the numeric
    resolution is reported as indeterminate.

    Args:
        hp: Hölder pair; its regime selects the relations
        f: Test function with 0 < ‖f‖ < ∞
        a: Test sequence with 0 < ‖a‖ < ∞
        scheme: Scheme
        weights: Norm weights; Φ̃ for 0 < p < 1 and Φ otherwise when omitted
        tol_quad: Quadrature tolerance
        tol_sum: Series tolerance
        guard: Relative verdict guard

    Returns:
        VerificationReport

    Raises:
        DomainError: If a hypothesis is violated (named in the message)
    """
    weights = weights or NormWeights(hp, scheme, default_weight_kind(hp.regime))
    _check_hypotheses(hp, scheme, weights)
    regime = hp.regime
    tol = max(tol_quad, tol_sum)

    k = kernel_constant_closed(scheme.params)
    f_power = norm_f_power(f, hp, scheme, weights, tol)
    a_power = norm_a_power(a, hp, scheme, tol)
    nf = _as_norm(float(f_power.value), hp.p, "‖f‖^p")
    na = _as_norm(float(a_power.value), hp.q, "‖a‖^q")
    rel_nf = _relative(f_power, tol) / abs(hp.p)
    rel_na = _relative(a_power, tol) / abs(hp.q)
    rel_k = k.err_estimate / k.value

    i_result = bilinear_I(f, a, scheme, tol)
    j1_result = j1_power(f, hp, scheme, tol)
    j2_result = j2_power(a, hp, scheme, tol, regime is Regime.REVERSE_FRAC)
    i_value = float(i_result.value)
    j1 = float(j1_result.value) ** (1.0 / hp.p)
    j2 = float(j2_result.value) ** (1.0 / hp.q)
    rel_i = _relative(i_result, tol)
    rel_j1 = _relative(j1_result, tol) / abs(hp.p)
    rel_j2 = _relative(j2_result, tol) / abs(hp.q)

    relations = {
        "I": (i_value, k.value * nf * na, rel_i, rel_k + rel_nf + rel_na),
        "J1": (j1, k.value * nf, rel_j1, rel_k + rel_nf),
        "J2": (j2, k.value * na, rel_j2, rel_k + rel_na),
    }
    inequalities = {}
    slack = {}
    for name, (lhs, rhs, rel_lhs, rel_rhs) in relations.items():
        error = rel_lhs * abs(lhs) + rel_rhs * abs(rhs)
        if regime is Regime.FORWARD:
            inequalities[name] = judge_less(lhs, rhs, error, guard)
        else:
            inequalities[name] = judge_less(rhs, lhs, error, guard)
        slack[name] = lhs / rhs

    holder_rhs = j1 * na
    holder_error = rel_i * abs(i_value) + (rel_j1 + rel_na) * abs(holder_rhs)
    if regime is Regime.FORWARD:
        holder = judge_at_most(i_value, holder_rhs, holder_error, guard)
    else:
        holder = judge_at_most(holder_rhs, i_value, holder_error, guard)

    report = VerificationReport(
        regime=regime.value,
        weight_kind=weights.kind.value,
        i_value=i_value,
        j1=j1,
        j2=j2,
        norm_f=nf,
        norm_a=na,
        k_value=k.value,
        inequalities=inequalities,
        slack=slack,
        errors={"I": rel_i * abs(i_value), "J1": rel_j1 * abs(j1), "J2": rel_j2 * abs(j2)},
        holder_step=holder,
    )
    logger.info(
        f"verify[{regime.value}] I={i_value:.10g} J1={j1:.10g} J2={j2:.10g} "
        f"k‖f‖‖a‖={k.value * nf * na:.10g} -> {report.verdict.value}"
    )
    return report


def equivalence_substitution_report(
    f: TestFunction,
    hp: HolderPair,
    scheme: Scheme,
    tol: float = DEFAULT_TOL_SUM,
    a: Optional[TestSequence] = None,
    threshold: float = EQUIVALENCE_TOL,
) -> EquivalenceReport:
    """
    Both sides of J₁^p = ‖a_f‖^q and J₂^q = ‖f_a‖^p.

    a_f is the sequence built from f and f_a the function built from ``a`` (a smooth
    power profile when omitted), exactly as in the substitution argument that makes
    the three inequalities equivalent. Every side is computed to ``tol`` or a tenth of
    ``threshold``, whichever is tighter, and the report holds when both identities
    agree to ``threshold``.

    Raises:
        DomainError: Outside the forward regime
    """
    if hp.regime is not Regime.FORWARD:
        raise DomainError("the substitution identities are checked in the forward regime (p > 1)")
    if a is None:
        a = smooth_pair(hp, scheme)[1]
    tol = min(tol, 0.1 * threshold)
    inner = INNER_FACTOR * tol
    weights = NormWeights(hp, scheme)
    j1p = float(j1_power(f, hp, scheme, tol).value)
    derived_a = DerivedSequence(f, hp, scheme, inner)
    a_norm = float(norm_a_power(derived_a, hp, scheme, tol).value)
    j2q = float(j2_power(a, hp, scheme, tol).value)
    derived_f = DerivedFunction(a, hp, scheme, inner)
    f_norm = float(norm_f_power(derived_f, hp, scheme, weights, tol).value)
    return EquivalenceReport(
        j1_power=j1p,
        a_norm_power=a_norm,
        j2_power=j2q,
        f_norm_power=f_norm,
        tol=threshold,
    )


def equivalence_substitution_check(
    f: TestFunction,
    hp: HolderPair,
    scheme: Scheme,
    tol: float = DEFAULT_TOL_SUM,
    a: Optional[TestSequence] = None,
    threshold: float = EQUIVALENCE_TOL,
) -> bool:
    """
    True when both substitution identities hold to relative ``threshold``.

    A degenerate J₁ (zero or infinite) is logged and reported as False.
    """
    report = equivalence_substitution_report(f, hp, scheme, tol, a, threshold)
    if not (math.isfinite(report.j1_power) and report.j1_power > 0):
        logger.warning(f"J1^p = {report.j1_power}; substitution identity not asserted")
        return False
    return report.holds
