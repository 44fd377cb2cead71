"""
Command line entry point for csch-hilbert.

Each subcommand resolves a run configuration, computes, prints a report to standard
output and optionally writes newline-delimited JSON records. The exit code carries
the outcome: 0 all verdicts true, 1 a false verdict, 2 indeterminate without false,
3 configuration or domain error, 4 convergence failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .config import RunConfig, load_config, validate_config
from .errors import ConfigError, ConvergenceError, DomainError
from .inequality import HolderPair, equivalence_substitution_report, smooth_pair, verify
from .kernel import kernel_constant_closed, kernel_constant_quadrature
from .models import Verdict, judge_equal
from .report import Report
from .sharpness import extremal_pair, opnorm_ladder, sharpness_trace
from .version import __version__
from .weights import hermite_hadamard_check, sandwich_check, weight_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INDETERMINATE = 2
EXIT_CONFIG = 3
EXIT_CONVERGENCE = 4

# relative agreement required between the two routes to k(σ)
CONSTANT_AGREEMENT = 1e-8
# acceptance band of the operator-norm ladder
OPNORM_EXCESS = 1e-3
OPNORM_REACH = 0.95


def cmd_constant(config: RunConfig) -> Report:
    """k(σ) by the closed form and by quadrature."""
    params = config.kernel_params()
    closed = kernel_constant_closed(params)
    quad = kernel_constant_quadrature(params, config.tolerances.quad)
    s, a = params.zeta_arguments
    report = Report(
        command="constant", config=config, columns=["method", "k", "err_estimate"]
    )
    for constant in (closed, quad):
        report.rows.append(
            {"method": constant.method, "k": constant.value, "err_estimate": constant.err_estimate}
        )
    report.summary = {
        "difference": abs(quad.value - closed.value),
        "zeta_s": s,
        "zeta_a": a,
    }
    report.verdict = judge_equal(
        quad.value, closed.value, quad.err_estimate + closed.err_estimate, CONSTANT_AGREEMENT
    )
    return report


def _x_points(config: RunConfig) -> List[float]:
    points = list(config.weights.x_points)
    if config.weights.random_points:
        rng = np.random.default_rng(config.seed)
        points.extend(10.0 ** rng.uniform(-3.0, 3.0, config.weights.random_points))
    return points


def cmd_weights(config: RunConfig) -> Report:
    """ω, ϖ, θ and k over the configured grid, plus the cell and sandwich checks."""
    scheme = validate_config(config)
    tol = config.tolerances
    report = Report(
        command="weights",
        config=config,
        columns=["x", "n", "omega", "varpi", "theta", "k", "verdict", "failure"],
    )
    verdicts: List[Verdict] = []
    for x in _x_points(config):
        for n in config.weights.n_values:
            try:
                row = weight_report(scheme, x, n, tol.quad, tol.sum, tol.guard)
            except ConvergenceError as e:
                logger.warning(f"weights at x={x:g}, n={n}: {e}")
                report.rows.append(
                    {"x": x, "n": n, "verdict": Verdict.INDETERMINATE, "failure": str(e)}
                )
                verdicts.append(Verdict.INDETERMINATE)
                continue
            verdict = Verdict.combine(row.verdicts.values())
            verdicts.append(verdict)
            report.rows.append(
                {
                    "x": row.x,
                    "n": row.n,
                    "omega": row.omega,
                    "varpi": row.varpi,
                    "theta": row.theta_value,
                    "k": row.k_value,
                    "verdict": verdict,
                    **{name: v for name, v in row.verdicts.items()},
                }
            )

    cells = Verdict.combine(
        hermite_hadamard_check(scheme, n, c, tol.quad, guard=tol.guard)
        for n in range(1, config.weights.cell_count + 1)
        for c in config.weights.cell_scales
    )
    sandwich = Verdict.combine(
        sandwich_check(scheme, c, tol.quad, tol.guard) for c in config.weights.cell_scales
    )
    report.summary = {"hermite_hadamard": cells, "sandwich": sandwich}
    report.verdict = Verdict.combine(verdicts + [cells, sandwich])
    return report


def cmd_verify(config: RunConfig) -> Report:
    """The three inequalities for one test pair in the regime selected by p."""
    scheme = validate_config(config)
    block, tol = config.verify, config.tolerances
    hp = HolderPair(block.p)
    if block.family == "smooth":
        f, a = smooth_pair(hp, scheme, block.tau, block.kappa)
    else:
        f, a = extremal_pair(block.eps, hp, scheme)
    result = verify(hp, f, a, scheme, tol_quad=tol.quad, tol_sum=tol.sum, guard=tol.guard)

    report = Report(
        command="verify", config=config, columns=["relation", "lhs", "rhs", "slack", "verdict"]
    )
    bounds = {
        "I": result.k_value * result.norm_f * result.norm_a,
        "J1": result.k_value * result.norm_f,
        "J2": result.k_value * result.norm_a,
    }
    lhs = {"I": result.i_value, "J1": result.j1, "J2": result.j2}
    for name in ("I", "J1", "J2"):
        report.rows.append(
            {
                "relation": name,
                "lhs": lhs[name],
                "rhs": bounds[name],
                "slack": result.slack[name],
                "verdict": result.inequalities[name],
            }
        )
    report.summary = {
        "regime": result.regime,
        "weight": result.weight_kind,
        "norm_f": result.norm_f,
        "norm_a": result.norm_a,
        "k": result.k_value,
        "holder_step": result.holder_step,
    }
    verdicts = [result.verdict]
    if block.equivalence:
        equivalence = equivalence_substitution_report(f, hp, scheme, tol.sum)
        report.summary["substitution_first"] = equivalence.first_rel_diff
        report.summary["substitution_second"] = equivalence.second_rel_diff
        verdicts.append(Verdict.TRUE if equivalence.holds else Verdict.FALSE)
    report.verdict = Verdict.combine(verdicts)
    return report


def cmd_sharpness(config: RunConfig) -> Report:
    """The ratio R(ε) of the extremal family and its limit as ε → 0."""
    scheme = validate_config(config)
    block, tol = config.sharpness, config.tolerances
    hp = HolderPair(block.p)
    trace = sharpness_trace(block.eps, hp, scheme, tol.quad, tol.sum, block.degree, tol.guard)
    report = Report(
        command="sharpness",
        config=config,
        columns=["eps", "ratio", "error", "verdict", "failure"],
    )
    report.rows = trace.to_records()
    report.summary = {
        "regime": trace.regime,
        "k": trace.k_value,
        "extrapolated_limit": trace.extrapolated_limit,
        "fit_residual": trace.fit_residual,
        "degree": trace.degree,
        "limit_ok": trace.limit_ok,
        "sides_ok": trace.sides_ok,
        "approach_ok": trace.approach_ok,
    }
    report.verdict = trace.verdict
    return report


def cmd_opnorm(config: RunConfig) -> Report:
    """Operator-norm estimates on a ladder of nested grids."""
    scheme = validate_config(config)
    block = config.opnorm
    hp = HolderPair(block.p)
    k = kernel_constant_closed(scheme.params).value
    results = opnorm_ladder(
        scheme, hp, block.n_max, block.n_exact, block.log_step, block.max_iterations, block.tol
    )
    report = Report(
        command="opnorm",
        config=config,
        columns=["n_max", "rows", "nodes", "estimate", "gap", "iterations"],
    )
    for result in results:
        report.rows.append({**result.to_record(), "gap": k - result.estimate})
    estimates = [result.estimate for result in results]
    monotone = all(b >= a - block.tol * b for a, b in zip(estimates, estimates[1:]))
    bounded = all(e <= k + OPNORM_EXCESS for e in estimates)
    # the largest grid must come close to k from below
    within_band = estimates[-1] >= OPNORM_REACH * k
    report.summary = {
        "k": k,
        "monotone": monotone,
        "bounded": bounded,
        "within_band": within_band,
    }
    report.verdict = Verdict.TRUE if monotone and bounded and within_band else Verdict.FALSE
    return report


COMMANDS: Dict[str, Callable[[RunConfig], Report]] = {
    "constant": cmd_constant,
    "weights": cmd_weights,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "opnorm": cmd_opnorm,
}

_VERDICT_EXIT = {
    Verdict.TRUE: EXIT_OK,
    Verdict.FALSE: EXIT_FALSE,
    Verdict.INDETERMINATE: EXIT_INDETERMINATE,
}


def configure_logging(quiet: bool = True) -> None:
    """Configure logging to standard error.

    Args:
        quiet: Whether to disable all logging output
    """
    if quiet:
        logging.disable(logging.CRITICAL)
    else:
        logging.disable(logging.NOTSET)
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            handlers=[logging.StreamHandler(stream=sys.stderr)],
        )


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument(
        "--set",
        dest="sets",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one setting, e.g. kernel.sigma=0.8 (repeatable)",
    )
    common.add_argument("--preset", help="Cor51, Cor52, Cor53, Cor54 or Remark55")
    common.add_argument("--out", type=Path, help="Write newline-delimited JSON records here")
    common.add_argument("--tol-quad", type=float, help="Quadrature tolerance")
    common.add_argument("--tol-sum", type=float, help="Series tolerance")
    common.add_argument("--seed", type=int, help="Seed for randomized sweeps")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")
    common.add_argument("--verbose", action="store_true", help="Enable info logging")

    parser = argparse.ArgumentParser(
        prog="csch-hilbert",
        description="Numerical verification of half-discrete Hilbert-type inequalities "
        "with a hyperbolic cosecant kernel",
    )
    parser.add_argument(
        "--version", "-v", action="store_true", help="Show version information and exit"
    )
    subparsers = parser.add_subparsers(dest="command")
    for name, func in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=func.__doc__)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; sys.argv when None

    Returns:
        Exit code
    """
    args = parse_args(argv)
    if args.version:
        print(f"csch-hilbert v{__version__}")
        return EXIT_OK
    if args.command is None:
        names = ",".join(COMMANDS)
        print(f"usage: csch-hilbert {{{names}}} [options]", file=sys.stderr)
        return EXIT_CONFIG

    configure_logging(quiet=not (args.debug or args.verbose))
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        config = load_config(
            args.config, args.sets, args.preset, args.tol_quad, args.tol_sum, args.seed
        )
        report = COMMANDS[args.command](config)
    except (ConfigError, DomainError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as e:
        logger.error(f"Convergence failure: {e}")
        best = "" if e.value is None else f" (best value {np.max(e.value):.12g})"
        print(f"error: {e}{best}", file=sys.stderr)
        return EXIT_CONVERGENCE

    sys.stdout.write(report.render())
    if args.out is not None:
        report.write_records(args.out)
    logger.info(f"{args.command} finished with verdict {report.verdict.value}")
    return _VERDICT_EXIT[report.verdict]


if __name__ == "__main__":
    sys.exit(main())
