"""
The hyperbolic cosecant kernel h(t) = csch(ρt^γ)·e^{-αt^γ}, its moment k(σ), and
the incomplete moments behind the remainder θ.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import DomainError
from .models import ConstantMethod, KernelConstant
from .quadrature import exp_sinh, tanh_sinh
from .specfun import Accuracy, DEFAULT_ACCURACY, gamma, hurwitz_zeta

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

LOG_TWO = math.log(2.0)
_EXPONENT_GUARD = 700.0
_TAIL_SWITCH = 2.0
# (α+ρ)T^γ at the split point of the constant quadrature
_SPLIT_EXPONENT = 40.0


@dataclass(frozen=True)
class KernelParams:
    """The quadruple (ρ, α, γ, σ) with ρ > max{0, −α} and 0 < γ < σ ≤ 1."""

    rho: float
    alpha: float
    gamma: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.rho > max(0.0, -self.alpha):
            raise DomainError(
                f"kernel parameters violate ρ > max{{0, −α}}: rho={self.rho}, alpha={self.alpha}"
            )
        if not 0.0 < self.gamma < self.sigma <= 1.0:
            raise DomainError(
                f"kernel parameters violate 0<γ<σ≤1: gamma={self.gamma}, sigma={self.sigma}"
            )

    @property
    def decay(self) -> float:
        """α + ρ, the exponential rate of h in t^γ."""
        return self.alpha + self.rho

    @property
    def zeta_arguments(self) -> tuple:
        """(σ/γ, (α+ρ)/(2ρ)), the Hurwitz zeta arguments of k(σ)."""
        return self.sigma / self.gamma, self.decay / (2.0 * self.rho)


def log_h_from_log(log_t: np.ndarray, params: KernelParams) -> np.ndarray:
    """ln h(t) from ln t, without range checks; t^γ never underflows on this path."""
    u = np.exp(params.gamma * np.asarray(log_t, dtype=float))
    x = 2.0 * params.rho * u
    # ln(1 - e^{-x}), accurate at both ends
    with np.errstate(divide="ignore"):
        log_denominator = np.where(
            x > LOG_TWO, np.log1p(-np.exp(-np.maximum(x, LOG_TWO))), np.log(-np.expm1(-x))
        )
    return LOG_TWO - params.decay * u - log_denominator


def _check_positive(t: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} requires t > 0, got {t}")
    return arr


def log_h(t: ArrayLike, params: KernelParams) -> ArrayLike:
    """
    Natural logarithm of the kernel.

    Args:
        t: Positive argument(s)
        params: Kernel parameters

    Returns:
        ln h(t), same shape as t

    Raises:
        DomainError: If any t <= 0
    """
    arr = _check_positive(t, "log_h")
    result = log_h_from_log(np.log(arr), params)
    return float(result) if np.ndim(t) == 0 else result


def h(t: ArrayLike, params: KernelParams) -> ArrayLike:
    """
    The kernel h(t) = 2 / (e^{(α+ρ)t^γ}(1 − e^{−2ρt^γ})).

    The direct exponential form is used while (α+ρ)t^γ stays below 700; beyond
    that the value is taken from the log form.

    Raises:
        DomainError: If any t <= 0
    """
    arr = _check_positive(t, "h")
    u = arr**params.gamma
    exponent = params.decay * u
    with np.errstate(over="ignore", invalid="ignore"):
        direct = 2.0 * np.exp(-np.minimum(exponent, _EXPONENT_GUARD)) / (
            -np.expm1(-2.0 * params.rho * u)
        )
    result = np.where(
        exponent > _EXPONENT_GUARD, np.exp(log_h_from_log(np.log(arr), params)), direct
    )
    return float(result) if np.ndim(t) == 0 else result


def moment(params: KernelParams, s: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """
    ∫₀^∞ h(t)t^{s−1}dt = 2Γ(s/γ)/(γ(2ρ)^{s/γ})·ζ(s/γ, (α+ρ)/(2ρ)) for s > γ.
    """
    ratio = s / params.gamma
    if not ratio > 1.0:
        raise DomainError(f"moment of order s={s} diverges for gamma={params.gamma}")
    shift = params.decay / (2.0 * params.rho)
    prefactor = 2.0 * gamma(ratio) / (params.gamma * (2.0 * params.rho) ** ratio)
    return prefactor * hurwitz_zeta(ratio, shift, accuracy)


def kernel_constant_closed(
    params: KernelParams, accuracy: Accuracy = DEFAULT_ACCURACY
) -> KernelConstant:
    """
    k(σ) from the Gamma/Hurwitz-zeta closed form.

    Args:
        params: Kernel parameters
        accuracy: Accuracy of the zeta evaluation

    Returns:
        KernelConstant with method CLOSED_FORM
    """
    value = moment(params, params.sigma, accuracy)
    # gamma contributes ~1e-14 relative; the zeta tolerance dominates
    err_estimate = abs(value) * (accuracy.target_rel_err + 1e-14)
    return KernelConstant(value=value, method=ConstantMethod.CLOSED_FORM, err_estimate=err_estimate)


def _split_point(params: KernelParams) -> float:
    split = (_SPLIT_EXPONENT / params.decay) ** (1.0 / params.gamma)
    return min(max(split, 1e-12), 1e100)


def kernel_constant_quadrature(params: KernelParams, tol: float = 1e-10) -> KernelConstant:
    """
    k(σ) = ∫₀^∞ h(t)t^{σ−1}dt by double-exponential quadrature.

    The range is split at T with (α+ρ)T^γ = 40: tanh-sinh on (0, T] absorbs the
    t^{σ−γ−1} endpoint singularity, exp-sinh on [T, ∞) the exponential tail.

    Args:
        params: Kernel parameters
        tol: Relative tolerance

    Returns:
        KernelConstant with method QUADRATURE

    Raises:
        ConvergenceError: If either piece fails to converge
    """
    sigma = params.sigma

    def integrand(t: np.ndarray) -> np.ndarray:
        log_t = np.log(t)
        return np.exp(log_h_from_log(log_t, params) + (sigma - 1.0) * log_t)

    split = _split_point(params)
    head = tanh_sinh(integrand, 0.0, split, tol, closure=True)
    tail = exp_sinh(integrand, split, tol, scale=split / (params.gamma * _SPLIT_EXPONENT))
    result = head + tail
    logger.debug(
        f"k(σ) by quadrature: {result.value:.15g} ± {result.error:.2e} "
        f"({result.evaluations} nodes)"
    )
    return KernelConstant(
        value=float(result.value),
        method=ConstantMethod.QUADRATURE,
        err_estimate=float(result.error),
    )


def _scaled_head(
    params: KernelParams, upper: np.ndarray, s: float, tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """∫₀^Y h(t)t^{s−1}dt = Y^s ∫₀¹ h(Yv)v^{s−1}dv for each Y in ``upper``, with errors."""
    log_upper = np.log(upper)

    def integrand(v: np.ndarray) -> np.ndarray:
        log_v = np.log(v)[:, None]
        return np.exp(log_h_from_log(log_v + log_upper[None, :], params) + (s - 1.0) * log_v)

    result = tanh_sinh(integrand, 0.0, 1.0, tol, closure=True)
    factor = np.exp(s * log_upper)
    return factor * np.atleast_1d(result.value), factor * np.atleast_1d(result.error)


def _scaled_tail(
    params: KernelParams, lower: np.ndarray, s: float, tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """∫_Y^∞ h(t)t^{s−1}dt = Y^s ∫₁^∞ h(Yw)w^{s−1}dw, grouped by decay length, with errors."""
    log_lower = np.log(lower)
    rate = params.decay * np.exp(params.gamma * log_lower)
    buckets = np.floor(np.log2(np.maximum(rate, 1e-300)) / 2.0)
    values = np.empty_like(lower)
    errors = np.empty_like(lower)
    for bucket in np.unique(buckets):
        members = buckets == bucket
        logs = log_lower[members]
        scale = 1.0 / (params.gamma * float(np.min(rate[members])))

        def integrand(w: np.ndarray, logs: np.ndarray = logs) -> np.ndarray:
            log_w = np.log(w)[:, None]
            return np.exp(log_h_from_log(log_w + logs[None, :], params) + (s - 1.0) * log_w)

        result = exp_sinh(integrand, 1.0, tol, scale=min(scale, 1.0))
        factor = np.exp(s * logs)
        values[members] = factor * np.atleast_1d(result.value)
        errors[members] = factor * np.atleast_1d(result.error)
    return values, errors


@dataclass(frozen=True)
class MomentSplit:
    """∫₀^Y and ∫_Y^∞ of h(t)t^{s−1} for each bound Y, with head + tail = total.

    ``error`` bounds the quadrature error of whichever part was integrated; the other
    part inherits it through the subtraction.
    """

    head: np.ndarray
    tail: np.ndarray
    total: float
    error: np.ndarray


def moment_split(
    params: KernelParams, bound: ArrayLike, s: float, tol: float = 1e-10
) -> MomentSplit:
    """
    Split the moment of order ``s`` at each bound (which may be ∞).

    Bounds with (α+ρ)·Y^γ ≤ 2 are integrated directly; larger bounds integrate the
    upper tail and subtract it from the full moment.

    Raises:
        DomainError: If a bound is not positive
    """
    arr = np.atleast_1d(np.asarray(bound, dtype=float))
    if np.any(~(arr > 0)):
        raise DomainError(f"incomplete moments require a positive bound, got {bound}")
    total = moment(params, s)
    head = np.empty_like(arr)
    tail = np.empty_like(arr)
    error = np.full_like(arr, abs(total) * (DEFAULT_ACCURACY.target_rel_err + 1e-14))
    finite = np.isfinite(arr)
    head[~finite], tail[~finite] = total, 0.0
    small = finite & (params.decay * arr**params.gamma <= _TAIL_SWITCH)
    large = finite & ~small
    if small.any():
        head[small], quad_error = _scaled_head(params, arr[small], s, tol)
        tail[small] = total - head[small]
        error[small] += quad_error
    if large.any():
        tail[large], quad_error = _scaled_tail(params, arr[large], s, tol)
        head[large] = total - tail[large]
        error[large] += quad_error
    return MomentSplit(head=head, tail=tail, total=total, error=error)


def partial_moment(
    params: KernelParams, upper: ArrayLike, s: float, tol: float = 1e-10
) -> ArrayLike:
    """∫₀^{upper} h(t)t^{s−1}dt, vectorized over ``upper`` (which may include ∞)."""
    head = moment_split(params, upper, s, tol).head
    return float(head[0]) if np.ndim(upper) == 0 else head


def upper_moment(
    params: KernelParams, lower: ArrayLike, s: float, tol: float = 1e-10
) -> ArrayLike:
    """∫_{lower}^∞ h(t)t^{s−1}dt, vectorized over ``lower``."""
    tail = moment_split(params, lower, s, tol).tail
    return float(tail[0]) if np.ndim(lower) == 0 else tail


def theta(params: KernelParams, upper: ArrayLike, tol: float = 1e-10) -> ArrayLike:
    """
    θ = (1/k(σ))·∫₀^{upper} h(u)u^{σ−1}du, strictly inside (0, 1).

    ``upper`` stands for U^δ(x)(ν₁ − β).

    Raises:
        DomainError: If upper <= 0
    """
    split = moment_split(params, upper, params.sigma, tol)
    values = split.head / split.total
    return float(values[0]) if np.ndim(upper) == 0 else values


def theta_complement(params: KernelParams, upper: ArrayLike, tol: float = 1e-10) -> ArrayLike:
    """1 − θ, taken from the upper tail so that it keeps relative accuracy as θ → 1."""
    split = moment_split(params, upper, params.sigma, tol)
    values = split.tail / split.total
    return float(values[0]) if np.ndim(upper) == 0 else values
