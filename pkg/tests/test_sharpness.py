"""
Tests for the extremal family, the sharpness trace and the operator-norm estimate.
"""

import dataclasses

import numpy as np
import pytest

from src.csch_hilbert import sharpness
from src.csch_hilbert.errors import DomainError
from src.csch_hilbert.inequality import HolderPair, norm_a, norm_f
from src.csch_hilbert.kernel import kernel_constant_closed
from src.csch_hilbert.models import TracePoint, Verdict
from src.csch_hilbert.sharpness import (
    build_operator_grid,
    default_eps_schedule,
    eps_bound,
    extremal_pair,
    opnorm_estimate,
    opnorm_ladder,
    sharpness_trace,
)

ZETA_11_10 = 10.584448464950810


@pytest.mark.parametrize(
    "p,expected",
    [
        (2.0, [0.4, 0.2, 0.1, 0.05]),
        (0.5, [0.1, 0.05, 0.025, 0.0125]),
        (0.1, [0.0125, 0.00625, 0.003125, 0.0015625]),
    ],
)
def test_default_schedule(cor54_params, p, expected):
    """Test that the default ε values are clipped to the admissible interval and halved."""
    schedule = default_eps_schedule(HolderPair(p), cor54_params)
    np.testing.assert_allclose(schedule, expected, rtol=1e-15)


def test_eps_bound_per_regime(power_params):
    """Test q(σ−γ)/2 for p > 1 and p < 0, and p(σ−γ)/2 for 0 < p < 1."""
    assert eps_bound(HolderPair(2.0), power_params) == pytest.approx(0.5)
    assert eps_bound(HolderPair(-1.0), power_params) == pytest.approx(0.125)
    assert eps_bound(HolderPair(0.5), power_params) == pytest.approx(0.125)


def test_extremal_pair(cor54_scheme):
    """Test the exponents of the extremal pair and the continuation for p < 0."""
    f, a = extremal_pair(0.1, HolderPair(2.0), cor54_scheme)
    assert not f.continuation
    assert a.exponent == pytest.approx(-0.05)
    f, _ = extremal_pair(0.1, HolderPair(-1.0), cor54_scheme)
    assert f.continuation and f.strictly_positive


@pytest.mark.parametrize("eps", [0.0, 0.5, 0.7])
def test_extremal_pair_rejects_eps(cor54_scheme, eps):
    """Test that ε must lie in the open admissible interval."""
    with pytest.raises(DomainError):
        extremal_pair(eps, HolderPair(2.0), cor54_scheme)


def test_extremal_norms(cor54_scheme):
    """Test ‖f̃‖^p = 1/ε and ‖ã‖^q = ζ(1+ε) in the unit scheme."""
    hp = HolderPair(2.0)
    f, a = extremal_pair(0.1, hp, cor54_scheme)
    assert norm_f(f, hp, cor54_scheme) ** 2 == pytest.approx(10.0, rel=1e-8)
    assert norm_a(a, hp, cor54_scheme) ** 2 == pytest.approx(ZETA_11_10, rel=1e-7)


def test_trace_rejects_schedules(cor54_scheme):
    """Test that an increasing schedule and an inadmissible ε are rejected."""
    hp = HolderPair(2.0)
    with pytest.raises(DomainError):
        sharpness_trace([0.1, 0.2], hp, cor54_scheme)
    with pytest.raises(DomainError):
        sharpness_trace([0.6, 0.1], hp, cor54_scheme)
    with pytest.raises(DomainError):
        sharpness_trace([], hp, cor54_scheme)


def test_single_point_trace(cor54_scheme):
    """Test one forward ratio: below k, with no extrapolation from a single point."""
    trace = sharpness_trace([0.4], HolderPair(2.0), cor54_scheme, tol_quad=1e-8, tol_sum=1e-8)
    point = trace.points[0]
    assert 0.0 < point.ratio < trace.k_value
    assert point.error is not None and point.failure is None
    assert trace.extrapolated_limit is None
    assert not trace.limit_ok


@pytest.mark.slow
def test_forward_trace_reaches_constant(cor54_scheme):
    """Test that R(ε) < k on the default schedule and the line through it ends at k(σ) = π²/6."""
    trace = sharpness_trace(None, HolderPair(2.0), cor54_scheme)
    ratios = [point.ratio for point in trace.points]
    assert all(point.failure is None for point in trace.points)
    assert all(r is not None and r < trace.k_value for r in ratios)
    assert all(later > earlier for earlier, later in zip(ratios, ratios[1:]))
    assert trace.degree == 1
    assert trace.sides_ok and trace.limit_ok
    assert trace.verdict is Verdict.TRUE
    assert len(trace.to_records()) == 4


@pytest.mark.slow
def test_reverse_trace_decreases_to_constant(cor51_scheme):
    """Test that R(ε) > k for p < 0 and falls toward k as ε shrinks."""
    trace = sharpness_trace(
        [0.1, 0.05, 0.025, 0.0125], HolderPair(-1.0), cor51_scheme, tol_quad=1e-8, tol_sum=1e-8
    )
    ratios = [point.ratio for point in trace.points]
    assert all(r is not None and r > trace.k_value for r in ratios)
    assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
    assert trace.approach_ok and trace.sides_ok and trace.limit_ok
    assert trace.verdict is Verdict.TRUE


@pytest.mark.slow
def test_fractional_trace_stays_above(cor51_scheme):
    """Test that R(ε) > k for 0 < p < 1 with the weight Φ̃ on the default schedule."""
    hp = HolderPair(0.5)
    trace = sharpness_trace(None, hp, cor51_scheme, tol_quad=1e-8, tol_sum=1e-8)
    assert [point.eps for point in trace.points] == default_eps_schedule(hp, cor51_scheme.params)
    assert trace.regime == "reverse_frac"
    assert all(point.ratio is not None and point.ratio > trace.k_value for point in trace.points)
    assert trace.sides_ok and trace.approach_ok


def _fixed_ratios(monkeypatch, ratios):
    by_eps = dict(ratios)

    def fake(eps, hp, scheme, tol_quad, tol_sum):
        return TracePoint(eps=eps, ratio=by_eps[eps], error=1e-10)

    monkeypatch.setattr(sharpness, "_trace_point", fake)


def test_wrong_side_ratio_is_false(monkeypatch, cor54_scheme):
    """Test that a forward ratio above k makes the trace false even when the limit fits."""
    k = kernel_constant_closed(cor54_scheme.params).value
    eps = [0.4, 0.2, 0.1, 0.05]
    ratios = [k - 0.1 * e for e in eps]
    ratios[1] = k + 0.01
    _fixed_ratios(monkeypatch, zip(eps, ratios))
    trace = sharpness_trace(eps, HolderPair(2.0), cor54_scheme)
    assert trace.limit_ok
    assert [point.verdict for point in trace.points] == [
        Verdict.TRUE,
        Verdict.FALSE,
        Verdict.TRUE,
        Verdict.TRUE,
    ]
    assert not trace.sides_ok
    assert trace.verdict is Verdict.FALSE
    assert trace.to_records()[1]["verdict"] == "false"


def test_rising_reverse_trace_is_false(monkeypatch, cor51_scheme):
    """Test that reverse ratios above k that grow as ε shrinks fail the approach check."""
    k = kernel_constant_closed(cor51_scheme.params).value
    eps = [0.1, 0.05, 0.025, 0.0125]
    _fixed_ratios(monkeypatch, zip(eps, [k * 1.001, k * 1.002, k * 1.003, k * 1.004]))
    trace = sharpness_trace(eps, HolderPair(-1.0), cor51_scheme)
    assert trace.sides_ok
    assert not trace.approach_ok
    assert trace.verdict is Verdict.FALSE


def test_linear_fit_recovers_intercept(monkeypatch, cor54_scheme):
    """Test that exactly linear ratios R = k − ε/2 extrapolate to k with no residual."""
    k = kernel_constant_closed(cor54_scheme.params).value
    eps = [0.4, 0.2, 0.1, 0.05]
    _fixed_ratios(monkeypatch, [(e, k - 0.5 * e) for e in eps])
    trace = sharpness_trace(eps, HolderPair(2.0), cor54_scheme)
    assert trace.extrapolated_limit == pytest.approx(k, rel=1e-12)
    assert trace.fit_residual == pytest.approx(0.0, abs=1e-12)
    assert trace.verdict is Verdict.TRUE


@pytest.mark.parametrize("scheme_name", ["cor54_scheme", "cor52_scheme"])
def test_operator_grid_layout(scheme_name, request):
    """Test increasing nodes with log-lattice weights, and rows counted once each."""
    scheme = request.getfixturevalue(scheme_name)
    grid = build_operator_grid(scheme, 1e4, n_exact=16, log_step=0.1)
    assert np.all(np.diff(grid.u_nodes) > 0)
    np.testing.assert_allclose(grid.u_weights, 0.1 * grid.u_nodes, rtol=1e-14)
    assert np.all(np.diff(grid.w) > 0)
    assert grid.counts[:16].tolist() == [1.0] * 16
    # the last log bin may overshoot n_max by one step
    assert 1e4 <= grid.counts.sum() <= 1e4 * np.exp(0.1) + 1.0
    assert grid.shape == (len(grid.w), len(grid.u_nodes))


def test_operator_grids_are_nested(cor54_scheme):
    """Test that a larger n_max keeps every row and node of a smaller grid."""
    small = build_operator_grid(cor54_scheme, 1e3, n_exact=16, log_step=0.1)
    large = build_operator_grid(cor54_scheme, 1e6, n_exact=16, log_step=0.1)
    assert np.isin(small.u_nodes, large.u_nodes).all()
    assert np.isin(small.w, large.w).all()


def test_operator_grid_rejects_arguments(cor54_scheme):
    """Test that n_max < 1 and a non-positive step are rejected."""
    with pytest.raises(DomainError):
        build_operator_grid(cor54_scheme, 0.5)
    with pytest.raises(DomainError):
        build_operator_grid(cor54_scheme, 1e3, log_step=0.0)


def test_opnorm_rank_one(cor54_scheme):
    """Test the alternating maximization against the closed norm of a rank-one operator."""
    grid = build_operator_grid(cor54_scheme, 1e3, n_exact=16, log_step=0.1)
    rows = grid.w**-0.5
    columns = np.exp(-grid.u_nodes)
    grid = dataclasses.replace(grid, matrix=np.outer(rows, columns))
    hp = HolderPair(2.0)
    p, q = hp.p, hp.q

    # σ = δ = 1: Φ = u^{-1} and Ψ = w^{-1}ν^{-1}
    phi = grid.u_nodes**-1.0
    psi = 1.0 / (grid.w * grid.nu)
    expected = np.sum(grid.u_weights * phi ** (1.0 - q) * columns**q) ** (1.0 / q) * np.sum(
        grid.counts * psi ** (1.0 - p) * rows**p
    ) ** (1.0 / p)

    result = opnorm_estimate(grid, hp, cor54_scheme, max_iterations=50, tol=1e-12)
    assert result.estimate == pytest.approx(expected, rel=1e-9)
    assert result.iterations <= 3


def test_opnorm_ladder_increases(cor54_scheme):
    """Test that estimates grow with n_max and stay below k(σ)."""
    hp = HolderPair(2.0)
    k = kernel_constant_closed(cor54_scheme.params).value
    results = opnorm_ladder(
        cor54_scheme, hp, [1e8, 1e4], log_step=0.1, max_iterations=20_000, tol=1e-7
    )
    estimates = [result.estimate for result in results]
    assert [result.n_max for result in results] == [1e4, 1e8]
    assert estimates[0] < estimates[1] <= k * (1.0 + 1e-3)
    assert estimates[1] > 0.5 * k
    record = results[1].to_record()
    assert record["rows"] == results[1].shape[0]
    assert all(b >= a * (1.0 - 1e-12) for a, b in zip(results[1].history, results[1].history[1:]))


def test_opnorm_needs_forward_regime(cor54_scheme):
    """Test that the operator norm is only estimated for p > 1."""
    grid = build_operator_grid(cor54_scheme, 1e3, n_exact=16, log_step=0.1)
    with pytest.raises(DomainError):
        opnorm_estimate(grid, HolderPair(-1.0), cor54_scheme)


@pytest.mark.slow
def test_opnorm_approaches_constant(cor54_scheme):
    """Test that a long index range brings the estimate close to k(σ)."""
    k = kernel_constant_closed(cor54_scheme.params).value
    (result,) = opnorm_ladder(
        cor54_scheme, HolderPair(2.0), [1e40], log_step=0.1, max_iterations=20_000, tol=1e-8
    )
    assert 0.95 * k <= result.estimate <= k * (1.0 + 1e-3)
