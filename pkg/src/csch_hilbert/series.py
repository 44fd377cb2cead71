"""
Summation of Σ_{n≥1} F(n) where F depends on n through V_n − β and ν_{n+1}.

The head is summed term by term. The tail is the integral of the smooth continuation
of F plus Gregory end corrections, so the head can stay short even for slowly
decaying terms. The head doubles until two successive estimates agree.

When the terms decrease from the end of the head on, the integral test also brackets
the tail: ∫_N^∞ F̃ <= Σ_{n≥N} F(n) <= F(N) + ∫_N^∞ F̃. The Gregory value is kept
inside that bracket and the bracket is reported with the sum.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional, Tuple, Union

import numpy as np

from .errors import ConvergenceError
from .quadrature import exp_sinh

if TYPE_CHECKING:
    from .measures import DiscreteMeasure

logger = logging.getLogger(__name__)

LogTerm = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
Value = Union[float, np.ndarray]

_FIRST_CHUNK = 64
_CELLS_PER_CHUNK = 1 << 21
# Gregory weights for Σ_{k≥0} F_k − ∫_0^∞ F, applied to F_0 and its forward differences
_GREGORY = (1.0 / 2.0, -1.0 / 12.0, 1.0 / 24.0, -19.0 / 720.0, 3.0 / 160.0)
# kernel sums at the smallest quadrature nodes decay only once V_n passes e^86
_TAIL_LOG_REACH = 600.0


@dataclass
class SeriesResult:
    """Sum with its error estimate and, for infinite sums, the integral-test bracket.

    ``certified`` is set when the terms were seen to decrease at the end of the head,
    which is what makes [lower, upper] a bracket rather than an estimate.
    """

    value: Value
    error: Value
    terms: int
    lower: Optional[Value] = None
    upper: Optional[Value] = None
    certified: bool = False


@dataclass
class _Tail:
    estimate: np.ndarray
    error: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    certified: bool


def _exact_terms(log_term: LogTerm, dm: "DiscreteMeasure", n: np.ndarray) -> np.ndarray:
    w, nu = dm.shifted(n)
    return np.exp(log_term(n, w, nu))


def _head_sum(log_term: LogTerm, dm: "DiscreteMeasure", start: int, stop: int) -> np.ndarray:
    """Σ_{n=start}^{stop} F(n), in chunks to bound memory for matrix-valued terms."""
    total: Union[float, np.ndarray] = 0.0
    rows = _FIRST_CHUNK
    first = start
    while first <= stop:
        n = np.arange(first, min(stop, first + rows - 1) + 1, dtype=float)
        terms = _exact_terms(log_term, dm, n)
        total = total + terms.sum(axis=0)
        if terms.ndim == 2 and terms.shape[1] > 0:
            rows = max(_FIRST_CHUNK, _CELLS_PER_CHUNK // terms.shape[1])
        else:
            rows = _CELLS_PER_CHUNK
        first += len(n)
    return np.asarray(total, dtype=float)


def _tail_estimate(
    log_term: LogTerm, dm: "DiscreteMeasure", start: int, tol: float, floor: np.ndarray
) -> _Tail:
    """Σ_{n≥start} F(n) ≈ ∫_start^∞ F̃ + Gregory corrections at ``start``, with its bracket."""
    smooth = dm.smooth_tail(start)
    beta = dm.beta

    def continued(t: np.ndarray) -> np.ndarray:
        w = smooth.partial_sum(t) - beta
        return np.exp(log_term(t, w, smooth.next_weight(t)))

    integral = exp_sinh(
        continued,
        float(start),
        0.1 * tol,
        atol=floor,
        scale=float(start),
        closure=True,
        log_reach=_TAIL_LOG_REACH,
    )
    value = np.asarray(integral.value, dtype=float)
    quad_error = np.asarray(integral.error, dtype=float)
    samples = _exact_terms(log_term, dm, np.arange(start, start + len(_GREGORY), dtype=float))
    correction = sum(
        weight * np.diff(samples, k, axis=0)[0] for k, weight in enumerate(_GREGORY)
    )
    lower = value - quad_error
    upper = value + samples[0] + quad_error
    certified = bool(np.all(np.diff(samples, axis=0) <= 0.0))
    estimate = value + correction
    if certified:
        estimate = np.clip(estimate, lower, upper)
    return _Tail(estimate, quad_error, lower, upper, certified)


def sum_series(
    log_term: LogTerm,
    dm: "DiscreteMeasure",
    tol: float = 1e-8,
    length: Optional[int] = None,
    min_terms: int = 16,
    max_terms: int = 1 << 20,
) -> SeriesResult:
    """
    Σ_{n≥1} exp(log_term(n, V_n − β, ν_{n+1})).

    ``log_term`` receives arrays of n, V_n − β and ν_{n+1} and returns one log value
    per n, or a matrix with one column per component for a vector of sums.

    Args:
        log_term: Logarithm of the n-th term
        dm: Discrete measure supplying V_n, ν_{n+1} and β
        tol: Relative tolerance on the sum
        length: Sum only n <= length when given
        min_terms: Initial explicit head length
        max_terms: Largest explicit head length

    Returns:
        SeriesResult with value, error estimate, the head length used and the
        integral-test bracket of the sum

    Raises:
        ConvergenceError: If the head budget is exhausted
        DivergenceError: If the terms decay no faster than 1/n
    """
    if length is not None:
        value = _head_sum(log_term, dm, 1, length)
        exact = _unwrap(value)
        return SeriesResult(exact, _unwrap(np.zeros_like(value)), length, exact, exact, True)

    terms = max(min_terms, dm.head_length)
    head = _head_sum(log_term, dm, 1, terms)
    previous: Optional[np.ndarray] = None
    while True:
        # the tail only needs to be accurate relative to the whole sum
        tail = _tail_estimate(log_term, dm, terms + 1, tol, 0.1 * tol * np.abs(head))
        value = head + tail.estimate
        if previous is not None:
            error = np.abs(value - previous) + tail.error
            if np.all(error <= tol * np.abs(value)):
                logger.debug(f"series converged with {terms} explicit terms")
                return SeriesResult(
                    _unwrap(value),
                    _unwrap(error),
                    terms,
                    lower=_unwrap(head + tail.lower),
                    upper=_unwrap(head + tail.upper),
                    certified=tail.certified,
                )
        if 2 * terms > max_terms:
            raise ConvergenceError(
                f"series did not converge within {max_terms} explicit terms",
                value=_unwrap(value),
                error=None if previous is None else _unwrap(np.abs(value - previous)),
            )
        head = head + _head_sum(log_term, dm, terms + 1, 2 * terms)
        previous = value
        terms *= 2


def _unwrap(value: np.ndarray) -> Value:
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value
