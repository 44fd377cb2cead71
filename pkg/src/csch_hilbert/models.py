"""
Result models shared by the library modules and the report writer.
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional


class Verdict(str, Enum):
    """Outcome of a strict-inequality check that the numerics may not resolve."""

    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"

    @classmethod
    def combine(cls, verdicts: Iterable["Verdict"]) -> "Verdict":
        """Fold several verdicts: any false wins, then any indeterminate."""
        seen = set(verdicts)
        if cls.FALSE in seen:
            return cls.FALSE
        if cls.INDETERMINATE in seen:
            return cls.INDETERMINATE
        return cls.TRUE


def _resolution(a: float, b: float, error: float, guard: float) -> float:
    return max(10.0 * abs(error), guard * max(abs(a), abs(b)))


def judge_less(smaller: float, larger: float, error: float, guard: float) -> Verdict:
    """
    Decide ``smaller < larger`` given the combined numerical error of both sides.

    A gap inside ten error estimates (or inside ``guard`` relative to the operands) is
    reported as indeterminate rather than as a pass or a failure.

    Args:
        smaller: Value expected to be smaller
        larger: Value expected to be larger
        error: Absolute error estimate of the difference
        guard: Relative verdict guard

    Returns:
        The tri-state verdict
    """
    gap = larger - smaller
    if abs(gap) <= _resolution(smaller, larger, error, guard):
        return Verdict.INDETERMINATE
    return Verdict.TRUE if gap > 0 else Verdict.FALSE


def judge_at_most(value: float, bound: float, error: float, guard: float) -> Verdict:
    """Decide the non-strict ``value <= bound``; equality within resolution passes."""
    if bound - value >= -_resolution(value, bound, error, guard):
        return Verdict.TRUE
    return Verdict.FALSE


def judge_equal(value: float, target: float, error: float, tol: float) -> Verdict:
    """Decide ``value == target`` to relative tolerance ``tol``."""
    if abs(value - target) <= max(tol * abs(target), 10.0 * abs(error)):
        return Verdict.TRUE
    return Verdict.FALSE


class ConstantMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class KernelConstant:
    """The best constant k(σ) together with how it was obtained."""

    value: float
    method: ConstantMethod
    err_estimate: float


@dataclass
class WeightReport:
    """Weight coefficients at one (x, n) pair and the verdicts of their bounds."""

    x: float
    n: int
    omega: float
    omega_error: float
    varpi: float
    varpi_error: float
    k_value: float
    theta_value: float
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    omega_lower: Optional[float] = None
    omega_upper: Optional[float] = None

    def to_record(self) -> dict:
        record = asdict(self)
        record["verdicts"] = {name: v.value for name, v in self.verdicts.items()}
        return record


@dataclass
class VerificationReport:
    """Response model for one verification run of an inequality triple."""

    regime: str
    weight_kind: str
    i_value: float
    j1: float
    j2: float
    norm_f: float
    norm_a: float
    k_value: float
    inequalities: Dict[str, Verdict]
    slack: Dict[str, float]
    errors: Dict[str, float]
    holder_step: Verdict

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(self.inequalities.values())

    def to_record(self) -> dict:
        record = asdict(self)
        record["inequalities"] = {name: v.value for name, v in self.inequalities.items()}
        record["holder_step"] = self.holder_step.value
        return record


def _rel_diff(reference: float, other: float) -> float:
    if not (math.isfinite(reference) and reference != 0.0):
        return math.inf
    return abs(reference - other) / abs(reference)


@dataclass
class EquivalenceReport:
    """Both sides of the two substitution identities."""

    j1_power: float
    a_norm_power: float
    j2_power: float
    f_norm_power: float
    tol: float

    @property
    def first_rel_diff(self) -> float:
        return _rel_diff(self.j1_power, self.a_norm_power)

    @property
    def second_rel_diff(self) -> float:
        return _rel_diff(self.j2_power, self.f_norm_power)

    @property
    def holds(self) -> bool:
        return self.first_rel_diff <= self.tol and self.second_rel_diff <= self.tol


@dataclass
class TracePoint:
    eps: float
    ratio: Optional[float]
    error: Optional[float] = None
    failure: Optional[str] = None
    verdict: Optional[Verdict] = None


@dataclass
class SharpnessTrace:
    """Ratios R(ε) of the extremal family with their extrapolation to ε → 0."""

    regime: str
    points: List[TracePoint]
    extrapolated_limit: Optional[float]
    fit_residual: Optional[float]
    k_value: float
    degree: int
    approach_ok: bool = True

    @property
    def limit_ok(self) -> bool:
        if self.extrapolated_limit is None:
            return False
        allowed = max(0.01 * self.k_value, self.fit_residual or 0.0)
        return abs(self.extrapolated_limit - self.k_value) <= allowed

    @property
    def sides_ok(self) -> bool:
        """Every evaluated ratio lies strictly on the regime's side of k."""
        return all(
            point.verdict is Verdict.TRUE for point in self.points if point.ratio is not None
        )

    @property
    def verdict(self) -> Verdict:
        verdicts = [point.verdict or Verdict.INDETERMINATE for point in self.points]
        verdicts.append(Verdict.TRUE if self.limit_ok and self.approach_ok else Verdict.FALSE)
        return Verdict.combine(verdicts)

    def to_records(self) -> List[dict]:
        records = []
        for point in self.points:
            record = asdict(point)
            record["verdict"] = point.verdict.value if point.verdict else None
            records.append(record)
        return records


@dataclass
class OpnormResult:
    """Estimate of the discretized operator norm by alternating maximization."""

    estimate: float
    iterations: int
    change: float
    n_max: float
    shape: tuple
    history: List[float] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "n_max": self.n_max,
            "estimate": self.estimate,
            "iterations": self.iterations,
            "change": self.change,
            "rows": self.shape[0],
            "nodes": self.shape[1],
        }
