"""
Run configuration: numeric defaults, the pydantic models validating a run, named
presets, and loading from JSON files and ``key=value`` overrides.
"""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError, DomainError
from .kernel import KernelParams
from .measures import Scheme, continuous_from_id, discrete_from_id

logger = logging.getLogger(__name__)

DEFAULT_TOL_QUAD = 1e-10
DEFAULT_TOL_SUM = 1e-8
DEFAULT_VERDICT_GUARD = 1e-6


class Preset(str, Enum):
    COR51 = "Cor51"
    COR52 = "Cor52"
    COR53 = "Cor53"
    COR54 = "Cor54"
    REMARK55 = "Remark55"


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class KernelBlock(_Block):
    rho: float = Field(default=1.0, description="Hyperbolic cosecant rate ρ")
    alpha: float = Field(default=0.5, description="Exponential damping α")
    gamma: float = Field(default=0.4, description="Power γ of t inside the kernel")
    sigma: float = Field(default=0.9, description="Homogeneity parameter σ")


class MeasuresBlock(_Block):
    delta: Literal[-1, 1] = Field(default=1, description="Direction δ")
    continuous: str = Field(default="unit", description="Family id of μ")
    discrete: str = Field(default="unit", description="Family id of ν")
    beta: float = Field(default=0.0, description="Shift β, at most ν₁/2")


class TolerancesBlock(_Block):
    quad: float = Field(default=DEFAULT_TOL_QUAD, gt=0, lt=1e-2, description="Quadrature tolerance")
    sum: float = Field(default=DEFAULT_TOL_SUM, gt=0, lt=1e-2, description="Series tolerance")
    guard: float = Field(
        default=DEFAULT_VERDICT_GUARD, gt=0, lt=1e-1, description="Relative verdict guard"
    )


class WeightsBlock(_Block):
    x_points: List[float] = Field(
        default=[0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0], description="Points x for ω and θ"
    )
    n_values: List[int] = Field(default=[1, 2, 3, 10, 100], description="Indices n for ϖ")
    cell_scales: List[float] = Field(
        default=[0.1, 1.0, 10.0], description="Scales c for the cell and sandwich checks"
    )
    cell_count: int = Field(default=10, ge=1, description="Cells n = 1..cell_count checked")
    random_points: int = Field(
        default=0, ge=0, description="Extra log-uniform x in [1e-3, 1e3] drawn from the seed"
    )


class VerifyBlock(_Block):
    p: float = Field(default=2.0, description="Hölder exponent p")
    family: Literal["smooth", "extremal"] = Field(default="smooth", description="Test pair")
    tau: Optional[float] = Field(default=None, description="Exponent τ of the smooth f")
    kappa: Optional[float] = Field(default=None, description="Decay κ of the smooth a")
    eps: float = Field(default=0.1, gt=0, description="ε of the extremal pair")
    equivalence: bool = Field(default=False, description="Also check the substitution identities")


class SharpnessBlock(_Block):
    p: float = Field(default=2.0, description="Hölder exponent p")
    eps: Optional[List[float]] = Field(default=None, description="Decreasing ε schedule")
    degree: int = Field(default=1, ge=1, le=3, description="Degree of the extrapolating fit")


class OpnormBlock(_Block):
    p: float = Field(default=2.0, gt=1, description="Hölder exponent p > 1")
    n_max: List[float] = Field(default=[1e10, 1e20, 1e40], description="Ladder of truncations")
    n_exact: int = Field(default=64, ge=1, description="Indices kept exactly before compression")
    log_step: float = Field(
        default=0.05, gt=0, le=0.5, description="Lattice step in log u and log n"
    )
    max_iterations: int = Field(default=20_000, ge=1, description="Alternating steps per grid")
    tol: float = Field(default=1e-8, gt=0, description="Relative change that stops the iteration")


class RunConfig(_Block):
    """A fully resolved run: kernel, measures, tolerances and per-command blocks."""

    preset: Optional[Preset] = None
    seed: int = Field(default=0, description="Seed for randomized sweeps")
    kernel: KernelBlock = Field(default_factory=KernelBlock)
    measures: MeasuresBlock = Field(default_factory=MeasuresBlock)
    tolerances: TolerancesBlock = Field(default_factory=TolerancesBlock)
    weights: WeightsBlock = Field(default_factory=WeightsBlock)
    verify: VerifyBlock = Field(default_factory=VerifyBlock)
    sharpness: SharpnessBlock = Field(default_factory=SharpnessBlock)
    opnorm: OpnormBlock = Field(default_factory=OpnormBlock)

    def kernel_params(self) -> KernelParams:
        k = self.kernel
        return KernelParams(rho=k.rho, alpha=k.alpha, gamma=k.gamma, sigma=k.sigma)

    def scheme(self) -> Scheme:
        m = self.measures
        return Scheme(
            delta=m.delta,
            cm=continuous_from_id(m.continuous),
            dm=discrete_from_id(m.discrete, m.beta),
            params=self.kernel_params(),
        )


_POWER_MEASURES = {"continuous": "power_damped(0.5)", "discrete": "power_seq(0.5)", "beta": 0.25}
_UNIT_MEASURES = {"continuous": "unit", "discrete": "unit", "beta": 0.0}

PRESETS: Dict[Preset, Dict[str, Any]] = {
    Preset.COR51: {
        "kernel": {"rho": 1.0, "alpha": 0.5, "gamma": 0.4, "sigma": 0.9},
        "measures": {"delta": 1, **_POWER_MEASURES},
    },
    Preset.COR52: {
        "kernel": {"rho": 1.0, "alpha": 0.5, "gamma": 0.4, "sigma": 0.9},
        "measures": {"delta": -1, **_POWER_MEASURES},
    },
    Preset.COR53: {
        "kernel": {"rho": 1.0, "alpha": 1.0, "gamma": 0.4, "sigma": 0.9},
        "measures": {"delta": 1, **_POWER_MEASURES},
    },
    Preset.COR54: {
        "kernel": {"rho": 1.0, "alpha": 1.0, "gamma": 0.5, "sigma": 1.0},
        "measures": {"delta": 1, **_UNIT_MEASURES},
    },
    Preset.REMARK55: {
        "kernel": {"rho": 1.0, "alpha": 0.5, "gamma": 0.4, "sigma": 0.9},
        "measures": {"delta": 1, **_UNIT_MEASURES},
    },
}


def _preset_violations(config: RunConfig, scheme: Scheme) -> List[str]:
    k, m = config.kernel, config.measures
    unit = m.continuous == "unit" and m.discrete == "unit"
    infinite = scheme.cm.u_infinite and scheme.dm.v_infinite
    checks = {
        Preset.COR51: {"δ = 1": m.delta == 1, "U(∞) = V(∞) = ∞": infinite},
        Preset.COR52: {"δ = −1": m.delta == -1, "U(∞) = V(∞) = ∞": infinite},
        Preset.COR53: {"α = ρ": math.isclose(k.alpha, k.rho)},
        Preset.COR54: {
            "α = ρ": math.isclose(k.alpha, k.rho),
            "γ = σ/2": math.isclose(k.gamma, 0.5 * k.sigma),
            "μ = ν = 1": unit,
        },
        Preset.REMARK55: {"μ = ν = 1": unit, "β = 0": m.beta == 0.0},
    }[config.preset]
    return [name for name, ok in checks.items() if not ok]


def validate_config(config: RunConfig) -> Scheme:
    """
    Build the scheme of ``config`` and re-check its preset's hypotheses.

    Raises:
        ConfigError: If a parameter invariant or a preset hypothesis fails
    """
    try:
        scheme = config.scheme()
    except DomainError as e:
        raise ConfigError(str(e)) from e
    if config.preset is not None:
        failed = _preset_violations(config, scheme)
        if failed:
            raise ConfigError(f"preset {config.preset.value} requires {', '.join(failed)}")
    return scheme


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_assignment(data: Dict[str, Any], assignment: str) -> None:
    """Apply one ``dotted.key=value`` override in place."""
    key, sep, raw = assignment.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {assignment!r}")
    parts = key.strip().split(".")
    node = data
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"cannot set {key!r}: {part!r} is not a section")
        node = child
    node[parts[-1]] = _parse_value(raw.strip())


def read_config_file(path: Path) -> Dict[str, Any]:
    """Read a JSON run configuration."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def load_config(
    path: Optional[Path] = None,
    sets: Iterable[str] = (),
    preset: Optional[str] = None,
    tol_quad: Optional[float] = None,
    tol_sum: Optional[float] = None,
    seed: Optional[int] = None,
) -> RunConfig:
    """
    Resolve a run configuration.

    Sources apply in order: defaults, preset, JSON file, ``sets`` overrides, then the
    explicit tolerance and seed arguments. A preset named in the file is honoured
    unless ``preset`` is given.

    Args:
        path: Optional JSON file
        sets: ``dotted.key=value`` overrides; values are parsed as JSON when possible
        preset: Preset name
        tol_quad: Quadrature tolerance override
        tol_sum: Series tolerance override
        seed: Seed override

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: On unreadable input, schema violations or broken preset hypotheses
    """
    data: Dict[str, Any] = read_config_file(path) if path is not None else {}
    for assignment in sets:
        _apply_assignment(data, assignment)
    chosen = preset if preset is not None else data.get("preset")
    if chosen is not None:
        try:
            preset_enum = Preset(chosen)
        except ValueError as e:
            names = ", ".join(p.value for p in Preset)
            raise ConfigError(f"unknown preset {chosen!r}; expected one of {names}") from e
        data = _deep_merge(PRESETS[preset_enum], data)
        data["preset"] = preset_enum.value
    if tol_quad is not None:
        data.setdefault("tolerances", {})["quad"] = tol_quad
    if tol_sum is not None:
        data.setdefault("tolerances", {})["sum"] = tol_sum
    if seed is not None:
        data["seed"] = seed

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration:\n{e}") from e
    validate_config(config)
    logger.info(f"Resolved configuration with preset {config.preset}")
    return config
