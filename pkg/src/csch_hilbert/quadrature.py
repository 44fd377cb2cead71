"""
Double-exponential quadrature.

Both rules apply the trapezoid rule in an auxiliary variable t over a truncated
range and halve the step until two successive levels agree. Each halving only
evaluates the new odd nodes. The ends of the truncated range get half weight and
an Euler-Maclaurin correction, so an integrand that is still sizeable where the
range is cut off converges like h⁴ instead of h.

Integrands receive an array of nodes and return either one value per node or a
matrix with one column per component, which lets a whole family of integrals
share the same nodes.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial, reduce
from operator import add
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConvergenceError, DivergenceError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
NodeMap = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
Value = Union[float, np.ndarray]

HALF_PI = 0.5 * math.pi
_INITIAL_STEP = 0.5
# the rules stop short of their ends; closures cover what lies beyond
_TANH_SINH_T_MAX = 4.0
LOG_REACH = 86.0
_LOG_X_MAX = 690.0
_CLOSURE_OFFSET = 1.0 / 64.0
_EXP_SINH_T_LOW = -6.5
# spacing of the one-sided stencils for the end derivatives
_END_OFFSET = 1.0 / 64.0
MIN_LEVELS = 3
MAX_LEVELS = 12
# level budget of the first pass over a set of ranges
SCOUT_LEVELS = 6
_FIRST_CHUNK = 64
_CELLS_PER_CHUNK = 1 << 21


@dataclass
class QuadResult:
    """Integral value with the difference of the last two levels as error estimate."""

    value: Value
    error: Value
    levels: int
    evaluations: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            value=self.value + other.value,
            error=self.error + other.error,
            levels=max(self.levels, other.levels),
            evaluations=self.evaluations + other.evaluations,
        )


def _checked(values: np.ndarray, x: np.ndarray, label: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        rows = bad if bad.ndim == 1 else bad.any(axis=1)
        raise ConvergenceError(
            f"{label}: integrand is not finite at x={x[rows][0]:.17g} "
            f"({int(rows.sum())} of {len(x)} nodes)"
        )
    return values


def _chunked_sum(f: Integrand, x: np.ndarray, w: np.ndarray, label: str) -> np.ndarray:
    """Σ f(x)·w over node chunks sized so that matrix-valued integrands stay bounded."""
    rows = _FIRST_CHUNK
    total: Union[float, np.ndarray] = 0.0
    start = 0
    while start < len(x):
        stop = min(start + rows, len(x))
        values = _checked(f(x[start:stop]), x[start:stop], label)
        weights = w[start:stop]
        total = total + (values * (weights[:, None] if values.ndim == 2 else weights)).sum(axis=0)
        if values.ndim == 2 and values.shape[1] > 0:
            rows = max(_FIRST_CHUNK, _CELLS_PER_CHUNK // values.shape[1])
        else:
            rows = _CELLS_PER_CHUNK
        start = stop
    return np.asarray(total, dtype=float)


def _node_values(f: Integrand, nodes: NodeMap, t: np.ndarray, label: str) -> np.ndarray:
    """The transformed integrand f(x(t))·x'(t), one row per t; zero at dropped nodes."""
    x, w = nodes(t)
    keep = w > 0
    if not keep.any():
        return np.zeros(len(t))
    values = _checked(f(x[keep]), x[keep], label)
    out = np.zeros((len(t),) + values.shape[1:])
    out[keep] = values * (w[keep, None] if values.ndim == 2 else w[keep])
    return out


def _end_slopes(
    f: Integrand, nodes: NodeMap, t_low: float, t_high: float, label: str
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """G and dG/dt at both ends of [t_low, t_high] from one-sided four-point stencils."""
    offsets = np.arange(4) * _END_OFFSET
    g = _node_values(f, nodes, np.concatenate([t_low + offsets, t_high - offsets]), label)
    stencil = np.array([11.0, -18.0, 9.0, -2.0]) / (6.0 * _END_OFFSET)
    low, high = g[:4], g[4:]
    slope_low = -np.tensordot(stencil, low, axes=1)
    slope_high = np.tensordot(stencil, high, axes=1)
    return low[0], high[0], slope_low, slope_high


def _odd_nodes(step: float, t_low: float, t_high: float) -> np.ndarray:
    first = math.ceil((t_low / step - 1.0) / 2.0)
    last = math.floor((t_high / step - 1.0) / 2.0)
    return (2.0 * np.arange(first, last + 1) + 1.0) * step


def _refine(
    f: Integrand,
    nodes: NodeMap,
    t_low: float,
    t_high: float,
    tol: float,
    atol: Value,
    max_levels: int,
    label: str,
) -> QuadResult:
    """
    Trapezoid levels in t with halved end weights and the h² end correction.

    ``nodes`` maps t to (x, dx/dt) and returns a zero weight where a node is dropped.
    Both ends must lie on the initial grid.
    """

    def evaluate(t: np.ndarray) -> Tuple[np.ndarray, int]:
        x, w = nodes(t)
        keep = w > 0
        return _chunked_sum(f, x[keep], w[keep], label), int(keep.sum())

    step = _INITIAL_STEP
    g_low, g_high, slope_low, slope_high = _end_slopes(f, nodes, t_low, t_high, label)
    ks = np.arange(round(t_low / step), round(t_high / step) + 1)
    partial_sum, evaluations = evaluate(ks * step)
    evaluations += 8
    trapezoid = step * (partial_sum - 0.5 * (g_low + g_high))
    drift = (slope_high - slope_low) / 12.0
    total = trapezoid - step**2 * drift
    error = np.full_like(np.asarray(total, dtype=float), np.inf)

    for level in range(1, max_levels):
        step /= 2.0
        partial_sum, count = evaluate(_odd_nodes(step, t_low, t_high))
        evaluations += count
        trapezoid = 0.5 * trapezoid + step * partial_sum
        refined = trapezoid - step**2 * drift
        error = np.abs(refined - total)
        total = refined
        if level + 1 >= MIN_LEVELS and np.all(error <= np.maximum(tol * np.abs(total), atol)):
            logger.debug(f"{label} converged after {level + 1} levels, {evaluations} nodes")
            return QuadResult(_unwrap(total), _unwrap(error), level + 1, evaluations)

    raise ConvergenceError(
        f"{label} did not converge in {max_levels} levels (error {np.max(error):.3e})",
        value=_unwrap(total),
        error=_unwrap(error),
    )


def _unwrap(value: np.ndarray) -> Value:
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def _power_closure(f: Integrand, near: float, inner: float, anchor: float) -> np.ndarray:
    """
    Integral of F over the excluded end beyond ``near`` assuming F ~ C|x - anchor|^r.

    ``inner`` is a second node on the included side, close to ``near``, used to
    estimate r.
    """
    values = np.asarray(f(np.array([near, inner])), dtype=float)
    f_near, f_inner = values[0], values[1]
    right = math.isinf(anchor)
    if right:
        d_near, d_inner = near, inner
    else:
        d_near, d_inner = abs(near - anchor), abs(inner - anchor)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        slope = (np.log(np.abs(f_near)) - np.log(np.abs(f_inner))) / (
            math.log(d_near) - math.log(d_inner)
        )
        # a vanishing inner value means F is cut off between the two nodes, not a power
        active = (f_near != 0.0) & np.isfinite(slope)
        if right:
            # F ~ x^slope on [near, inf)
            tail = np.where(active, f_near * near / (-slope - 1.0), 0.0)
            bad = active & ~(slope < -1.0)
        else:
            tail = np.where(active, f_near * d_near / (slope + 1.0), 0.0)
            bad = active & ~(slope > -1.0)
    if np.any(bad):
        raise DivergenceError(
            f"Integrand decays like a power {np.atleast_1d(slope)[np.atleast_1d(bad)][0]:.4f} "
            "at the end of the range; the integral diverges"
        )
    return tail


def tanh_sinh(
    f: Integrand,
    a: float,
    b: float,
    tol: float = 1e-10,
    atol: Value = 0.0,
    max_levels: int = MAX_LEVELS,
    closure: bool = False,
) -> QuadResult:
    """
    Integrate ``f`` over the finite interval [a, b] with the tanh-sinh rule.

    Nodes are generated from their distance to the nearer endpoint so that
    algebraic singularities at either end keep full relative precision.

    Args:
        f: Vectorized integrand
        a: Lower limit
        b: Upper limit, b > a
        tol: Relative tolerance on the level difference
        atol: Absolute tolerance floor, a scalar or one value per component
        max_levels: Maximum number of step halvings plus one
        closure: Add a power-law estimate of the part below the smallest node at ``a``

    Returns:
        QuadResult with value and error estimate

    Raises:
        ConvergenceError: If the levels do not agree within ``max_levels`` or the
            integrand is not finite at a node
    """
    if b <= a:
        raise ValueError(f"tanh_sinh requires a < b, got [{a}, {b}]")
    width = b - a

    def nodes(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s = HALF_PI * np.sinh(t)
        e = np.exp(-2.0 * np.abs(s))
        distance = width * e / (1.0 + e)
        x = np.where(t < 0, a + distance, b - distance)
        w = 0.5 * width * HALF_PI * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
        # nodes that round onto an endpoint are dropped
        return x, np.where((distance > 0) & (x > a) & (x < b), w, 0.0)

    tail = 0.0
    if closure:
        # before refining, so that a divergent end fails fast
        x, w = nodes(np.array([-_TANH_SINH_T_MAX, -_TANH_SINH_T_MAX + _CLOSURE_OFFSET]))
        if (w > 0).all():
            tail = _power_closure(f, x[0], x[1], a)
    label = f"tanh_sinh[{a:.6g}, {b:.6g}]"
    result = _refine(f, nodes, -_TANH_SINH_T_MAX, _TANH_SINH_T_MAX, tol, atol, max_levels, label)
    result.value = _unwrap(result.value + tail)
    return result


def exp_sinh(
    f: Integrand,
    a: float,
    tol: float = 1e-10,
    atol: Value = 0.0,
    scale: Optional[float] = None,
    max_levels: int = MAX_LEVELS,
    closure: bool = False,
    log_reach: float = LOG_REACH,
) -> QuadResult:
    """
    Integrate ``f`` over [a, ∞) with the exp-sinh rule x = a + scale·exp(π/2·sinh t).

    With ``closure`` the part beyond the largest node is added assuming a power-law
    decay estimated at the largest node; a decay no faster than 1/x
    raises DivergenceError.

    Args:
        f: Vectorized integrand
        a: Lower limit
        tol: Relative tolerance on the level difference
        atol: Absolute tolerance floor, a scalar or one value per component
        scale: Length scale of the map (defaults to a, or 1 when a is 0)
        max_levels: Maximum number of step halvings plus one
        closure: Add the power-law tail beyond the largest node
        log_reach: The largest node lies below a + scale·e^log_reach

    Returns:
        QuadResult with value and error estimate
    """
    if scale is None:
        scale = a if a > 0 else 1.0
    log_scale = math.log(scale)
    reach = min(log_reach, _LOG_X_MAX - log_scale)
    t_high = max(1.0, math.asinh(reach / HALF_PI))
    t_high = math.floor(t_high / _INITIAL_STEP) * _INITIAL_STEP

    def nodes(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s = HALF_PI * np.sinh(t)
        growth = np.exp(s + log_scale)
        x = a + growth
        w = HALF_PI * np.cosh(t) * growth
        return x, np.where((x > a) & np.isfinite(x), w, 0.0)

    tail = 0.0
    if closure:
        x, _ = nodes(np.array([t_high, t_high - _CLOSURE_OFFSET]))
        tail = _power_closure(f, x[0], x[1], math.inf)
    label = f"exp_sinh[{a:.6g}, inf)"
    result = _refine(f, nodes, _EXP_SINH_T_LOW, t_high, tol, atol, max_levels, label)
    result.value = _unwrap(result.value + tail)
    return result


Rule = Callable[..., QuadResult]


def _rules(
    f: Integrand,
    pieces: Sequence[Tuple[float, float]],
    tol: float,
    pivot: float,
    closure: bool,
) -> List[Rule]:
    """One quadrature call per range; half-lines split into a head and an exp-sinh tail."""
    rules: List[Rule] = []
    for lo, hi in pieces:
        if not math.isinf(hi):
            rules.append(partial(tanh_sinh, f, lo, hi, tol, closure=closure))
            continue
        split = pivot if lo < pivot else _mid(lo, hi)
        if lo < split:
            rules.append(partial(tanh_sinh, f, lo, split, tol, closure=closure))
            rules.append(partial(exp_sinh, f, split, tol, scale=split, closure=closure))
        else:
            rules.append(partial(exp_sinh, f, lo, tol, closure=closure))
    return rules


def _integrate_ranges(rules: Sequence[Rule], tol: float) -> QuadResult:
    """
    Sum the ranges so that each one is accurate to ``tol`` times the whole integral.

    A first pass with a small level budget estimates the total; ranges that have not
    converged by then are redone with that estimate as absolute floor, so a range
    carrying a negligible share of the mass does not have to reach full relative
    precision on its own.
    """
    if not rules:
        raise ValueError("integration needs at least one range")
    first: List[Union[QuadResult, ConvergenceError]] = []
    for rule in rules:
        try:
            first.append(rule(max_levels=SCOUT_LEVELS))
        except ConvergenceError as exc:
            if exc.value is None:
                raise
            first.append(exc)
    estimate = sum(np.asarray(part.value, dtype=float) for part in first)
    floor = tol * np.abs(estimate)
    results = []
    for rule, part in zip(rules, first):
        if isinstance(part, ConvergenceError):
            logger.debug(f"redoing a range with absolute floor {np.max(floor):.3e}")
            part = rule(atol=floor, max_levels=MAX_LEVELS)
        results.append(part)
    return reduce(add, results)


def integrate(
    f: Integrand,
    a: float,
    b: float = math.inf,
    tol: float = 1e-10,
    pivot: float = 1.0,
    closure: bool = False,
) -> QuadResult:
    """
    Integrate over [a, b] where b may be infinite, splitting at ``pivot``.

    Finite ranges use tanh-sinh; a half-line is split into a tanh-sinh head
    [a, pivot] and an exp-sinh tail [pivot, ∞) when ``pivot`` lies inside it.
    """
    if math.isinf(b) and a >= pivot:
        return exp_sinh(f, a, tol, closure=closure)
    return _integrate_ranges(_rules(f, [(a, b)], tol, pivot, closure), tol)


def integrate_pieces(
    f: Integrand,
    pieces: Sequence[Tuple[float, float]],
    tol: float = 1e-10,
    pivot: float = 1.0,
    closure: bool = False,
) -> QuadResult:
    """
    Integrate over consecutive (lo, hi) pieces to a tolerance relative to their sum.

    An infinite piece is split at ``pivot`` when it starts below it and at twice its
    start otherwise.
    """
    if not pieces:
        raise ValueError("integrate_pieces needs at least one piece")
    return _integrate_ranges(_rules(f, pieces, tol, pivot, closure), tol)


def _mid(lo: float, hi: float) -> float:
    if math.isinf(hi):
        return 2.0 * lo if lo > 0 else 1.0
    return 0.5 * (lo + hi)
