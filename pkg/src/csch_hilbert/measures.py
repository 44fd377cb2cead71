"""
Continuous measures μ(t)dt with primitive U(x), discrete measures ν_n with partial
sums V_n and the step extension V(y), and the scheme tying them to a kernel.
"""

import logging
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence, Tuple, Union

import numpy as np

from .errors import DivergenceError, DomainError
from .kernel import KernelParams

if TYPE_CHECKING:
    from .series import SeriesResult

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# partial sums are tabulated up to this index; beyond it V_n comes from the
# Euler-Maclaurin continuation anchored at the last tabulated index
PREFIX_LENGTH = 1 << 16

_FAMILY_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*$")


def _scalar_or_array(template: ArrayLike, values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(template) == 0 else values


def _check_nonnegative(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError(f"{name} requires a nonnegative argument, got {x}")
    return arr


class ContinuousMeasure(ABC):
    """A positive continuous density μ on (0, ∞) with U(x) = ∫₀ˣ μ(t)dt."""

    family_id: str = ""

    @abstractmethod
    def mu(self, x: ArrayLike) -> ArrayLike:
        """Density μ(x)."""

    @abstractmethod
    def _primitive(self, x: np.ndarray) -> np.ndarray:
        """U(x) for x >= 0 (x may be +inf)."""

    @abstractmethod
    def _inverse(self, u: np.ndarray) -> np.ndarray:
        """U⁻¹(u) for 0 <= u < U(∞); returns +inf at or beyond U(∞)."""

    @property
    @abstractmethod
    def u_limit(self) -> float:
        """U(∞), possibly +inf."""

    @property
    def u_infinite(self) -> bool:
        return math.isinf(self.u_limit)

    def U(self, x: ArrayLike) -> ArrayLike:
        """
        U(x) = ∫₀ˣ μ(t)dt.

        Raises:
            DomainError: If x < 0
        """
        arr = _check_nonnegative(x, "U")
        return _scalar_or_array(x, self._primitive(arr))

    def U_inverse(self, u: ArrayLike) -> ArrayLike:
        """The x with U(x) = u; +inf when u >= U(∞)."""
        arr = _check_nonnegative(u, "U_inverse")
        return _scalar_or_array(u, self._inverse(arr))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.family_id})"


class UnitDensity(ContinuousMeasure):
    """μ ≡ 1, U(x) = x."""

    family_id = "unit"

    def mu(self, x: ArrayLike) -> ArrayLike:
        return _scalar_or_array(x, np.ones_like(np.asarray(x, dtype=float)))

    def _primitive(self, x: np.ndarray) -> np.ndarray:
        return x

    def _inverse(self, u: np.ndarray) -> np.ndarray:
        return u

    @property
    def u_limit(self) -> float:
        return math.inf


class PowerDamped(ContinuousMeasure):
    """μ(t) = (1+t)^{−a} with a in [0, 1]; U(x) = ((1+x)^{1−a} − 1)/(1−a), or ln(1+x) at a=1."""

    def __init__(self, a: float):
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"power_damped exponent must lie in [0, 1], got {a}")
        self.a = float(a)
        self.family_id = f"power_damped({a:g})"

    def mu(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        return _scalar_or_array(x, np.exp(-self.a * np.log1p(arr)))

    def _primitive(self, x: np.ndarray) -> np.ndarray:
        if self.a == 1.0:
            return np.log1p(x)
        b = 1.0 - self.a
        with np.errstate(over="ignore"):
            return np.expm1(b * np.log1p(x)) / b

    def _inverse(self, u: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            if self.a == 1.0:
                return np.expm1(u)
            b = 1.0 - self.a
            return np.expm1(np.log1p(b * u) / b)

    @property
    def u_limit(self) -> float:
        return math.inf


class TabulatedDensity(ContinuousMeasure):
    """
    Piecewise-linear density through (x_k, μ_k), x_0 = 0, continued beyond the last
    knot by the power tail μ_M·(x/x_M)^{−a}. U and its inverse are exact for this
    interpolant.
    """

    family_id = "tabulated"

    def __init__(self, knots: Sequence[float], values: Sequence[float], tail_exponent: float):
        x = np.asarray(knots, dtype=float)
        m = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != m.shape or len(x) < 2:
            raise DomainError("tabulated density needs matching knot and value lists of length >= 2")
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise DomainError("tabulated density knots must start at 0 and increase strictly")
        if np.any(~(m > 0)):
            raise DomainError("tabulated density values must be strictly positive")
        if tail_exponent < 0:
            raise DomainError(f"tail exponent must be >= 0, got {tail_exponent}")
        self.knots = x
        self.values = m
        self.tail_exponent = float(tail_exponent)
        self._slopes = np.diff(m) / np.diff(x)
        widths = np.diff(x)
        self._cumulative = np.concatenate(([0.0], np.cumsum(0.5 * (m[:-1] + m[1:]) * widths)))

    @property
    def _tail_scale(self) -> float:
        # μ_M·x_M, the natural unit of the tail primitive
        return self.values[-1] * self.knots[-1]

    def mu(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        inside = np.interp(arr, self.knots, self.values)
        with np.errstate(divide="ignore"):
            tail = self.values[-1] * (np.maximum(arr, self.knots[-1]) / self.knots[-1]) ** (
                -self.tail_exponent
            )
        return _scalar_or_array(x, np.where(arr <= self.knots[-1], inside, tail))

    def _primitive(self, x: np.ndarray) -> np.ndarray:
        last = self.knots[-1]
        k = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, len(self.knots) - 2)
        d = x - self.knots[k]
        inside = self._cumulative[k] + self.values[k] * d + 0.5 * self._slopes[k] * d * d
        ratio = np.maximum(x, last) / last
        a = self.tail_exponent
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if a == 1.0:
                extra = self._tail_scale * np.log(ratio)
            else:
                extra = self._tail_scale * (ratio ** (1.0 - a) - 1.0) / (1.0 - a)
        return np.where(x <= last, inside, self._cumulative[-1] + extra)

    def _inverse(self, u: np.ndarray) -> np.ndarray:
        total = self._cumulative[-1]
        k = np.clip(np.searchsorted(self._cumulative, u, side="right") - 1, 0, len(self.knots) - 2)
        excess = u - self._cumulative[k]
        mu_k = self.values[k]
        root = np.sqrt(np.maximum(mu_k * mu_k + 2.0 * self._slopes[k] * excess, 0.0))
        inside = self.knots[k] + 2.0 * excess / (mu_k + root)
        a = self.tail_exponent
        beyond = (u - total) / self._tail_scale
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if a == 1.0:
                tail = self.knots[-1] * np.exp(beyond)
            else:
                base = 1.0 + (1.0 - a) * beyond
                grown = self.knots[-1] * np.abs(base) ** (1.0 / (1.0 - a))
                tail = np.where(base > 0, grown, np.inf)
        return np.where(u <= total, inside, tail)

    @property
    def u_limit(self) -> float:
        if self.tail_exponent <= 1.0:
            return math.inf
        return float(self._cumulative[-1] + self._tail_scale / (self.tail_exponent - 1.0))


def _euler_maclaurin_primitive(t: np.ndarray, a: float) -> np.ndarray:
    """G(t) with Σ_{k=A+1}^{n} k^{−a} ≈ G(n) − G(A) for large A."""
    t = np.asarray(t, dtype=float)
    if a == 1.0:
        integral = np.log(t)
    else:
        integral = t ** (1.0 - a) / (1.0 - a)
    return (
        integral
        + 0.5 * t ** (-a)
        - a * t ** (-a - 1.0) / 12.0
        + a * (a + 1.0) * (a + 2.0) * t ** (-a - 3.0) / 720.0
    )


@dataclass(frozen=True)
class SmoothTail:
    """Smooth continuation t ↦ (Ṽ(t), ν̃(t+1)) of (V_n, ν_{n+1}), exact at the anchor."""

    anchor: int
    partial_sum: Callable[[np.ndarray], np.ndarray]
    next_weight: Callable[[np.ndarray], np.ndarray]


class DiscreteMeasure(ABC):
    """
    A positive non-increasing sequence ν_n with shift β ≤ ν₁/2.

    Partial sums are tabulated once at construction so that concurrent reads are safe.
    """

    family_id: str = ""

    def __init__(self, beta: float = 0.0):
        self.beta = float(beta)
        nu_1 = float(self._weights(np.array([1.0]))[0])
        if not self.beta <= 0.5 * nu_1:
            raise DomainError(f"shift violates β ≤ ν₁/2: beta={beta}, nu_1={nu_1}")
        weights = self._weights(np.arange(1, PREFIX_LENGTH + 1, dtype=float))
        self._prefix = np.concatenate(([0.0], np.cumsum(weights)))

    @abstractmethod
    def _weights(self, n: np.ndarray) -> np.ndarray:
        """ν_n for integer-valued n >= 1."""

    @abstractmethod
    def _tail_law(self) -> Tuple[float, float]:
        """(c, a) with ν_n = c·n^{−a} for every n beyond the tabulated head."""

    @property
    def head_length(self) -> int:
        """Last index before which ν_n need not follow the tail law."""
        return 0

    @property
    def v_infinite(self) -> bool:
        _, a = self._tail_law()
        return a <= 1.0

    @property
    def nu_1(self) -> float:
        return float(self._prefix[1])

    @property
    def nu_2(self) -> float:
        return float(self._prefix[2] - self._prefix[1])

    def nu(self, n: ArrayLike) -> ArrayLike:
        """ν_n for n >= 1."""
        arr = np.asarray(n, dtype=float)
        if np.any(~(arr >= 1)):
            raise DomainError(f"ν_n requires n >= 1, got {n}")
        return _scalar_or_array(n, self._weights(arr))

    def V(self, n: ArrayLike) -> ArrayLike:
        """V_n = Σ_{j≤n} ν_j for integer n >= 0."""
        arr = np.asarray(n, dtype=float)
        if np.any(~(arr >= 0)):
            raise DomainError(f"V_n requires n >= 0, got {n}")
        inside = arr <= PREFIX_LENGTH
        index = np.where(inside, arr, 0).astype(np.int64)
        values = self._prefix[index]
        if not np.all(inside):
            tail = self.smooth_tail(PREFIX_LENGTH)
            values = np.where(inside, values, tail.partial_sum(np.maximum(arr, PREFIX_LENGTH)))
        return _scalar_or_array(n, values)

    def V_step(self, y: ArrayLike) -> ArrayLike:
        """
        The step extension V(y) = ∫₀^y ν(t)dt with ν(t) = ν_n on (n−1, n].

        Raises:
            DomainError: If y < 0
        """
        arr = _check_nonnegative(y, "V_step")
        cell = np.maximum(np.ceil(arr), 1.0)
        previous = np.asarray(self.V(cell - 1.0), dtype=float)
        values = previous + (arr - (cell - 1.0)) * self._weights(cell)
        return _scalar_or_array(y, values)

    def shifted(self, n: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(V_n − β, ν_{n+1}) for integer n >= 1."""
        n = np.asarray(n, dtype=float)
        return np.asarray(self.V(n), dtype=float) - self.beta, self._weights(n + 1.0)

    def smooth_tail(self, anchor: int) -> SmoothTail:
        """
        Continuation of (V_n, ν_{n+1}) to real t >= anchor, exact at the anchor.

        The anchor must lie beyond the tabulated head so that ν follows c·n^{−a}.
        """
        if anchor < max(self.head_length, 1):
            raise DomainError(
                f"smooth continuation needs an anchor beyond {self.head_length}, got {anchor}"
            )
        c, a = self._tail_law()
        anchor_value = float(np.asarray(self.V(float(anchor))))
        g_anchor = float(_euler_maclaurin_primitive(np.array(float(anchor)), a))

        def partial_sum(t: np.ndarray) -> np.ndarray:
            return anchor_value + c * (_euler_maclaurin_primitive(t, a) - g_anchor)

        def next_weight(t: np.ndarray) -> np.ndarray:
            return c * np.exp(-a * np.log1p(np.asarray(t, dtype=float)))

        return SmoothTail(anchor=anchor, partial_sum=partial_sum, next_weight=next_weight)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.family_id}, beta={self.beta:g})"


class UnitSequence(DiscreteMeasure):
    """ν_n ≡ 1, V_n = n."""

    family_id = "unit"

    def _weights(self, n: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(n, dtype=float))

    def _tail_law(self) -> Tuple[float, float]:
        return 1.0, 0.0

    def V(self, n: ArrayLike) -> ArrayLike:
        arr = np.asarray(n, dtype=float)
        if np.any(~(arr >= 0)):
            raise DomainError(f"V_n requires n >= 0, got {n}")
        return _scalar_or_array(n, arr.copy())

    def smooth_tail(self, anchor: int) -> SmoothTail:
        return SmoothTail(
            anchor=anchor,
            partial_sum=lambda t: np.asarray(t, dtype=float),
            next_weight=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        )


class PowerSequence(DiscreteMeasure):
    """ν_n = n^{−a} with a in [0, 1]."""

    def __init__(self, a: float, beta: float = 0.0):
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"power_seq exponent must lie in [0, 1], got {a}")
        self.a = float(a)
        self.family_id = f"power_seq({a:g})"
        super().__init__(beta)

    def _weights(self, n: np.ndarray) -> np.ndarray:
        return np.exp(-self.a * np.log(n))

    def _tail_law(self) -> Tuple[float, float]:
        return 1.0, self.a


class TabulatedSequence(DiscreteMeasure):
    """Finitely many values ν_1 ≥ … ≥ ν_M followed by the tail c·n^{−a}."""

    family_id = "tabulated"

    def __init__(
        self,
        values: Sequence[float],
        tail_coefficient: float,
        tail_exponent: float,
        beta: float = 0.0,
    ):
        head = np.asarray(values, dtype=float)
        if head.ndim != 1 or len(head) < 2:
            raise DomainError("tabulated sequence needs at least two values")
        if np.any(~(head > 0)):
            raise DomainError("tabulated sequence values must be strictly positive")
        if tail_coefficient <= 0 or tail_exponent < 0:
            raise DomainError("tabulated sequence tail needs c > 0 and a >= 0")
        first_tail = tail_coefficient * (len(head) + 1) ** (-tail_exponent)
        if np.any(np.diff(head) > 0) or first_tail > head[-1]:
            raise DomainError("the sequence ν_n must be non-increasing")
        self._head = head
        self._c = float(tail_coefficient)
        self._a = float(tail_exponent)
        super().__init__(beta)

    @property
    def head_length(self) -> int:
        return len(self._head)

    def _weights(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        index = np.clip(np.minimum(n, len(self._head)).astype(np.int64) - 1, 0, len(self._head) - 1)
        tail = self._c * np.exp(-self._a * np.log(n))
        return np.where(n <= len(self._head), self._head[index], tail)

    def _tail_law(self) -> Tuple[float, float]:
        return self._c, self._a


@dataclass(frozen=True)
class Scheme:
    """Direction δ together with both measures and the kernel parameters."""

    delta: int
    cm: ContinuousMeasure
    dm: DiscreteMeasure
    params: KernelParams

    def __post_init__(self) -> None:
        if self.delta not in (-1, 1):
            raise DomainError(f"delta must be -1 or 1, got {self.delta}")

    @property
    def beta(self) -> float:
        return self.dm.beta


def continuous_from_id(family: str) -> ContinuousMeasure:
    """Build a continuous measure from "unit" or "power_damped(a)"."""
    name, argument = _parse_family(family)
    if name == "unit" and argument is None:
        return UnitDensity()
    if name == "power_damped" and argument is not None:
        return PowerDamped(argument)
    raise DomainError(f"unknown continuous measure family {family!r}")


def discrete_from_id(family: str, beta: float = 0.0) -> DiscreteMeasure:
    """Build a discrete measure from "unit" or "power_seq(a)"."""
    name, argument = _parse_family(family)
    if name == "unit" and argument is None:
        return UnitSequence(beta)
    if name == "power_seq" and argument is not None:
        return PowerSequence(argument, beta)
    raise DomainError(f"unknown discrete measure family {family!r}")


def _parse_family(family: str) -> Tuple[str, Union[float, None]]:
    match = _FAMILY_PATTERN.match(family)
    if not match:
        raise DomainError(f"malformed measure family {family!r}")
    name, argument = match.groups()
    return name, (float(argument) if argument is not None else None)


def tail_sum_bracket(b: float, dm: DiscreteMeasure) -> Tuple[float, float]:
    """
    Lower and upper bounds for Σ ν_{n+1}/(V_n − β)^{1+b}.

    Returns:
        (1/(b(ν₁−β)^b), (ν₁−β)^{−b}/b + ν₂/(ν₁−β)^{1+b})
    """
    if not b > 0:
        raise DivergenceError(f"tail sum diverges for b={b} <= 0")
    base = dm.nu_1 - dm.beta
    lower = 1.0 / (b * base**b)
    upper = base ** (-b) / b + dm.nu_2 / base ** (1.0 + b)
    return lower, upper


def tail_sum_series(b: float, dm: DiscreteMeasure, tol: float = 1e-8) -> "SeriesResult":
    """
    Σ_{n≥1} ν_{n+1}/(V_n − β)^{1+b} with its error estimate and integral-test bracket.

    Args:
        b: Positive exponent excess
        dm: Discrete measure with V(∞) = ∞
        tol: Relative tolerance

    Returns:
        SeriesResult; ``lower`` and ``upper`` enclose the sum when ``certified``

    Raises:
        DivergenceError: If b <= 0
        DomainError: If V(∞) is finite
    """
    from .series import sum_series

    if not b > 0:
        raise DivergenceError(f"tail sum diverges for b={b} <= 0")
    if not dm.v_infinite:
        raise DomainError("tail_sum requires V(∞) = ∞")

    def log_term(n: np.ndarray, w: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return np.log(nu) - (1.0 + b) * np.log(w)

    result = sum_series(log_term, dm, tol)
    logger.debug(
        f"tail_sum(b={b}) = {result.value:.12g} in [{result.lower:.12g}, {result.upper:.12g}] "
        f"using {result.terms} explicit terms"
    )
    return result


def tail_sum(b: float, dm: DiscreteMeasure, tol: float = 1e-8) -> float:
    """Σ_{n≥1} ν_{n+1}/(V_n − β)^{1+b}; see :func:`tail_sum_series`."""
    return float(tail_sum_series(b, dm, tol).value)
