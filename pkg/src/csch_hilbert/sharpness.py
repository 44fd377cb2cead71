"""
Best-possibility of k(σ), seen two ways: the extremal family as ε → 0⁺ and a direct
estimate of the operator norm on a discretized operator.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOL_QUAD, DEFAULT_TOL_SUM, DEFAULT_VERDICT_GUARD
from .errors import ConvergenceError, DivergenceError, DomainError
from .inequality import (
    ExtremalCutoff,
    HolderPair,
    NormWeights,
    PowerProfile,
    Regime,
    bilinear_I,
    default_weight_kind,
    norm_a,
    norm_f,
)
from .kernel import KernelParams, kernel_constant_closed, log_h_from_log
from .measures import Scheme
from .models import OpnormResult, SharpnessTrace, TracePoint, Verdict, judge_less

logger = logging.getLogger(__name__)

DEFAULT_EPS = (0.4, 0.2, 0.1, 0.05)
TRACE_MIN_POINTS = 4
# kernel arguments kept on the operator grid: h(t) is negligible beyond the upper one
_GRID_T_LOW = 1e-4
_GRID_DECAY_EXPONENT = 60.0


def eps_bound(hp: HolderPair, params: KernelParams) -> float:
    """Upper end of the admissible ε interval."""
    gap = params.sigma - params.gamma
    if hp.regime is Regime.REVERSE_FRAC:
        return 0.5 * hp.p * gap
    return 0.5 * hp.q * gap


def default_eps_schedule(hp: HolderPair, params: KernelParams) -> List[float]:
    """{0.4, 0.2, 0.1, 0.05} clipped to the admissible interval, halved until four remain."""
    bound = eps_bound(hp, params)
    schedule = [eps for eps in DEFAULT_EPS if eps < bound]
    if not schedule:
        schedule = [0.5 * bound]
    while len(schedule) < TRACE_MIN_POINTS:
        schedule.append(0.5 * schedule[-1])
    return schedule


def extremal_pair(
    eps: float, hp: HolderPair, scheme: Scheme
) -> Tuple[ExtremalCutoff, PowerProfile]:
    """
    f̃ with reduced profile U^{δ(σ+ε/p)−1} on 0 < x^δ ≤ 1, and ã_n = (V_n−β)^{σ−ε/q−1}ν_{n+1}.

    For p < 0 zeros are not allowed, so f̃ is continued positively off its support.

    Raises:
        DomainError: If ε lies outside the open admissible interval
    """
    bound = eps_bound(hp, scheme.params)
    if not 0.0 < eps < bound:
        raise DomainError(f"ε must satisfy 0 < ε < {bound:.6g}, got {eps}")
    f = ExtremalCutoff(eps, hp, continuation=hp.regime is Regime.REVERSE_NEG)
    a = PowerProfile(scheme.params.sigma - eps / hp.q - 1.0)
    return f, a


def _trace_point(
    eps: float, hp: HolderPair, scheme: Scheme, tol_quad: float, tol_sum: float
) -> TracePoint:
    f, a = extremal_pair(eps, hp, scheme)
    weights = NormWeights(hp, scheme, default_weight_kind(hp.regime))
    tol = max(tol_quad, tol_sum)
    try:
        nf = norm_f(f, hp, scheme, weights, tol)
        na = norm_a(a, hp, scheme, weights, tol)
        result = bilinear_I(f, a, scheme, tol)
    except (ConvergenceError, DivergenceError) as e:
        logger.warning(f"trace point ε={eps:g} failed: {e}")
        return TracePoint(eps=eps, ratio=None, failure=str(e))
    ratio = float(result.value) / (nf * na)
    error = abs(ratio) * (float(result.error) / abs(float(result.value)) + 2.0 * tol)
    logger.debug(f"R({eps:g}) = {ratio:.12g}")
    return TracePoint(eps=eps, ratio=ratio, error=error)


def _extrapolate(points: List[TracePoint], degree: int) -> Tuple[Optional[float], Optional[float]]:
    usable = [point for point in points if point.ratio is not None]
    usable = sorted(usable, key=lambda point: point.eps)[:TRACE_MIN_POINTS]
    if len(usable) <= degree:
        return None, None
    eps = np.array([point.eps for point in usable])
    ratios = np.array([point.ratio for point in usable])
    coefficients = np.polyfit(eps, ratios, degree)
    residuals = ratios - np.polyval(coefficients, eps)
    return float(coefficients[-1]), float(np.sqrt(np.mean(residuals**2)))


def _decreasing(points: List[TracePoint], guard: float) -> bool:
    """Whether the evaluated ratios do not grow as ε shrinks, up to their errors."""
    usable = [point for point in points if point.ratio is not None]
    for earlier, later in zip(usable, usable[1:]):
        slack = 10.0 * ((earlier.error or 0.0) + (later.error or 0.0)) + guard * earlier.ratio
        if later.ratio > earlier.ratio + slack:
            logger.warning(f"R rises from {earlier.ratio:.12g} to {later.ratio:.12g}")
            return False
    return True


def sharpness_trace(
    eps_list: Optional[Sequence[float]],
    hp: HolderPair,
    scheme: Scheme,
    tol_quad: float = DEFAULT_TOL_QUAD,
    tol_sum: float = DEFAULT_TOL_SUM,
    degree: int = 1,
    guard: float = DEFAULT_VERDICT_GUARD,
) -> SharpnessTrace:
    """
    R(ε) = Ĩ/(‖f̃‖·‖ã‖) along a decreasing ε schedule, extrapolated to ε = 0.

    The limit is the constant term of a least-squares polynomial of ``degree`` in ε
    over the four smallest ε (the line R ≈ k − cε by default). A point whose
    evaluation fails is recorded with its failure and left out of the fit.

    Each ratio is judged against k: below it for p > 1, above it in both reverse
    regimes, where the ratios must also decrease toward k as ε shrinks. A ratio on
    the wrong side makes the trace false.

    Args:
        eps_list: Strictly decreasing admissible ε; the default schedule when None
        hp: Hölder pair
        scheme: Scheme; the reverse regimes need U(∞) = V(∞) = ∞
        tol_quad: Quadrature tolerance
        tol_sum: Series tolerance
        degree: Degree of the extrapolating polynomial
        guard: Relative verdict guard of the side and monotonicity checks

    Returns:
        SharpnessTrace

    Raises:
        DomainError: If the schedule is not decreasing or leaves the admissible interval
    """
    if eps_list is None:
        eps_list = default_eps_schedule(hp, scheme.params)
    eps_values = list(eps_list)
    if not eps_values:
        raise DomainError("sharpness trace needs at least one ε")
    if any(later >= earlier for earlier, later in zip(eps_values, eps_values[1:])):
        raise DomainError(f"ε schedule must be strictly decreasing, got {eps_values}")
    bound = eps_bound(hp, scheme.params)
    outside = [eps for eps in eps_values if not 0.0 < eps < bound]
    if outside:
        raise DomainError(f"ε must satisfy 0 < ε < {bound:.6g}, got {outside}")
    if hp.regime is not Regime.FORWARD and not (scheme.cm.u_infinite and scheme.dm.v_infinite):
        raise DomainError(f"regime {hp.regime.value} requires U(∞) = V(∞) = ∞")

    k = kernel_constant_closed(scheme.params).value
    points = [_trace_point(eps, hp, scheme, tol_quad, tol_sum) for eps in eps_values]
    limit, residual = _extrapolate(points, degree)

    forward = hp.regime is Regime.FORWARD
    for point in points:
        if point.ratio is None:
            continue
        error = point.error or 0.0
        if forward:
            point.verdict = judge_less(point.ratio, k, error, guard)
        else:
            point.verdict = judge_less(k, point.ratio, error, guard)
        if point.verdict is Verdict.FALSE:
            logger.warning(
                f"R({point.eps:g}) = {point.ratio:.12g} on the wrong side of k = {k:.12g}"
            )
    approach_ok = forward or _decreasing(points, guard)
    trace = SharpnessTrace(
        regime=hp.regime.value,
        points=points,
        extrapolated_limit=limit,
        fit_residual=residual,
        k_value=k,
        degree=degree,
        approach_ok=approach_ok,
    )
    logger.info(f"sharpness[{hp.regime.value}] limit={limit} k={k:.12g} ok={trace.limit_ok}")
    return trace


@dataclass(frozen=True)
class OperatorGrid:
    """
    The bilinear form discretized on a lattice in u and a compressed index range.

    Columns are nodes u_i (increasing) with weights u_iΔ from a uniform lattice in
    ln u^δ. Rows are the indices n ≤ n_exact followed by log-spaced continuous indices
    up to ``n_max``; ``counts`` is the number of indices a row stands for.
    """

    u_nodes: np.ndarray
    u_weights: np.ndarray
    counts: np.ndarray
    w: np.ndarray
    nu: np.ndarray
    matrix: np.ndarray
    n_max: float

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape


def _grid_rows(
    scheme: Scheme, n_max: float, n_exact: int, log_step: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    dm = scheme.dm
    n_exact = max(n_exact, dm.head_length)
    exact = np.arange(1, min(n_exact, math.floor(n_max)) + 1, dtype=float)
    w, nu = dm.shifted(exact)
    counts = np.ones_like(exact)
    if n_max <= n_exact:
        return counts, w, nu

    start = n_exact + 0.5
    bins = math.ceil(math.log((n_max + 0.5) / start) / log_step)
    edges = start * np.exp(log_step * np.arange(bins + 1))
    centres = start * np.exp(log_step * (np.arange(bins) + 0.5))
    smooth = dm.smooth_tail(n_exact)
    return (
        np.concatenate([counts, np.diff(edges)]),
        np.concatenate([w, smooth.partial_sum(centres) - dm.beta]),
        np.concatenate([nu, smooth.next_weight(centres)]),
    )


def build_operator_grid(
    scheme: Scheme, n_max: float, n_exact: int = 64, log_step: float = 0.05
) -> OperatorGrid:
    """
    Build the discretized operator h(U^δ(x)(V_n−β)) for indices up to ``n_max``.

    Lattices are anchored at fixed points, so a grid with a larger ``n_max`` contains
    every row and column of a smaller one.

    Raises:
        DomainError: If n_max < 1, n_exact < 1 or log_step <= 0
    """
    if n_max < 1 or n_exact < 1 or not log_step > 0:
        raise DomainError(
            f"operator grid needs n_max >= 1, n_exact >= 1, log_step > 0; "
            f"got {n_max}, {n_exact}, {log_step}"
        )
    params = scheme.params
    counts, w, nu = _grid_rows(scheme, n_max, n_exact, log_step)

    t_high = (_GRID_DECAY_EXPONENT / params.decay) ** (1.0 / params.gamma)
    low = math.ceil(math.log(_GRID_T_LOW / w[-1]) / log_step)
    high = math.floor(math.log(t_high / w[0]) / log_step)
    log_y = log_step * np.arange(low, high + 1, dtype=float)
    matrix = np.exp(log_h_from_log(log_y[None, :] + np.log(w)[:, None], params))
    u = np.exp(scheme.delta * log_y)
    if scheme.delta == -1:
        u, matrix = u[::-1], matrix[:, ::-1]
    grid = OperatorGrid(
        u_nodes=u,
        u_weights=u * log_step,
        counts=counts,
        w=w,
        nu=nu,
        matrix=np.ascontiguousarray(matrix),
        n_max=float(n_max),
    )
    logger.debug(f"operator grid n_max={n_max:g}: {grid.shape[0]} rows x {grid.shape[1]} nodes")
    return grid


def _normalize(log_x: np.ndarray, log_measure: np.ndarray, power: float) -> np.ndarray:
    """exp(log_x) scaled to unit ℓ^power norm against exp(log_measure)."""
    finite = np.isfinite(log_x)
    if not finite.any():
        raise DomainError("alternating step produced a vanishing profile")
    x = np.exp(log_x - np.max(log_x[finite]))
    norm = np.sum(np.exp(log_measure) * x**power) ** (1.0 / power)
    return x / norm


def opnorm_estimate(
    grid: OperatorGrid,
    hp: HolderPair,
    scheme: Scheme,
    max_iterations: int = 20_000,
    tol: float = 1e-8,
) -> OpnormResult:
    """
    Estimate sup I(f, a) over ‖f‖_{p,Φ} = ‖a‖_{q,Ψ} = 1 on the grid.

    Each step holds one side fixed and replaces the other by its Hölder-equality
    maximizer, so the quotient never decreases. Starts from a_n ∝ (V_n−β)^{σ−1}ν_{n+1}.

    Args:
        grid: Operator grid
        hp: Hölder pair with p > 1
        scheme: Scheme the grid was built from
        max_iterations: Sweep budget
        tol: Relative change of the quotient that counts as converged

    Returns:
        OpnormResult

    Raises:
        DomainError: Outside the forward regime
        ConvergenceError: If the budget runs out; ``value`` holds the best estimate
    """
    if hp.regime is not Regime.FORWARD:
        raise DomainError("operator norms are estimated in the forward regime (p > 1) only")
    p, q = hp.p, hp.q
    sigma, delta = scheme.params.sigma, scheme.delta
    log_u, log_w = np.log(grid.u_nodes), np.log(grid.w)
    log_nu, log_counts = np.log(grid.nu), np.log(grid.counts)
    log_weights = np.log(grid.u_weights)
    log_phi_weight = (p * (1.0 - delta * sigma) - 1.0) * log_u
    log_psi_weight = (q * (1.0 - sigma) - 1.0) * log_w + (1.0 - q) * log_nu

    a = _normalize((sigma - 1.0) * log_w + log_nu, log_counts + log_psi_weight, q)
    history: List[float] = []
    previous = 0.0
    for iteration in range(1, max_iterations + 1):
        g = grid.matrix.T @ (grid.counts * a)
        with np.errstate(divide="ignore"):
            f = _normalize(
                (q - 1.0) * (np.log(g) - log_phi_weight), log_weights + log_phi_weight, p
            )
        hsum = grid.matrix @ (grid.u_weights * f)
        with np.errstate(divide="ignore"):
            a = _normalize(
                (p - 1.0) * (np.log(hsum) - log_psi_weight), log_counts + log_psi_weight, q
            )
        value = float(np.dot(grid.counts * a, hsum))
        history.append(value)
        change = abs(value - previous)
        if change <= tol * value:
            logger.info(
                f"opnorm n_max={grid.n_max:g}: {value:.12g} after {iteration} sweeps"
            )
            return OpnormResult(
                estimate=value,
                iterations=iteration,
                change=change,
                n_max=grid.n_max,
                shape=grid.shape,
                history=history,
            )
        previous = value
    raise ConvergenceError(
        f"alternating maximization did not settle within {max_iterations} sweeps",
        value=max(history),
        error=change,
    )


def opnorm_ladder(
    scheme: Scheme,
    hp: HolderPair,
    n_max_values: Sequence[float] = (1e10, 1e20, 1e40),
    n_exact: int = 64,
    log_step: float = 0.05,
    max_iterations: int = 20_000,
    tol: float = 1e-8,
) -> List[OpnormResult]:
    """Operator-norm estimates on nested grids of increasing ``n_max``."""
    results = []
    for n_max in sorted(n_max_values):
        grid = build_operator_grid(scheme, n_max, n_exact, log_step)
        results.append(opnorm_estimate(grid, hp, scheme, max_iterations, tol))
    return results
