"""
Tests for run configuration: defaults, presets, JSON files and key=value overrides.
"""

import json
import math

import pytest

from src.csch_hilbert.config import (
    DEFAULT_TOL_QUAD,
    DEFAULT_TOL_SUM,
    PRESETS,
    Preset,
    load_config,
    validate_config,
)
from src.csch_hilbert.errors import ConfigError
from src.csch_hilbert.kernel import kernel_constant_closed
from src.csch_hilbert.measures import PowerDamped, PowerSequence, UnitDensity


def test_defaults():
    """Test the configuration resolved without any source."""
    config = load_config()
    assert config.preset is None
    assert config.tolerances.quad == DEFAULT_TOL_QUAD
    assert config.tolerances.sum == DEFAULT_TOL_SUM
    assert config.verify.p == 2.0
    assert config.opnorm.n_max == [1e10, 1e20, 1e40]
    scheme = validate_config(config)
    assert scheme.delta == 1
    assert isinstance(scheme.cm, UnitDensity)


@pytest.mark.parametrize("preset", list(Preset))
def test_every_preset_validates(preset):
    """Test that each preset satisfies its own hypotheses."""
    config = load_config(preset=preset.value)
    assert config.preset is preset
    assert config.kernel.model_dump() == PRESETS[preset]["kernel"]


def test_cor54_preset():
    """Test the unit scheme with α = ρ = σ = 1 and γ = 1/2."""
    config = load_config(preset="Cor54")
    assert (config.kernel.alpha, config.kernel.gamma, config.kernel.sigma) == (1.0, 0.5, 1.0)
    assert config.measures.continuous == "unit" and config.measures.discrete == "unit"


def test_cor54_preset_accepts_other_scales():
    """Test that Cor54 only needs α = ρ and γ = σ/2, and k = π²/(6σρ²) there."""
    sets = ["kernel.rho=2", "kernel.alpha=2", "kernel.sigma=0.8", "kernel.gamma=0.4"]
    config = load_config(preset="Cor54", sets=sets)
    scheme = validate_config(config)
    k = kernel_constant_closed(scheme.params).value
    assert k == pytest.approx(math.pi**2 / (6.0 * 0.8 * 2.0**2), rel=1e-10)
    with pytest.raises(ConfigError) as excinfo:
        load_config(preset="Cor54", sets=["kernel.alpha=1.5"])
    assert "α = ρ" in str(excinfo.value)


def test_cor52_preset_scheme():
    """Test that the δ = −1 preset builds power measures with the shift."""
    scheme = validate_config(load_config(preset="Cor52"))
    assert scheme.delta == -1
    assert isinstance(scheme.cm, PowerDamped)
    assert isinstance(scheme.dm, PowerSequence)
    assert scheme.beta == 0.25


def test_config_file(tmp_path):
    """Test a JSON file that names a preset and a command block."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "Cor51", "verify": {"p": -1.0}}))
    config = load_config(path=path)
    assert config.preset is Preset.COR51
    assert config.verify.p == -1.0
    assert config.measures.discrete == "power_seq(0.5)"


def test_explicit_preset_wins_over_file(tmp_path):
    """Test that a preset argument replaces the one named in the file."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"preset": "Cor51"}))
    assert load_config(path=path, preset="Cor53").preset is Preset.COR53


def test_overrides_and_arguments():
    """Test dotted overrides, JSON and bare string values, and the explicit arguments."""
    config = load_config(
        sets=["verify.family=extremal", "verify.eps=0.05", "sharpness.eps=[0.2, 0.1]"],
        tol_quad=1e-6,
        tol_sum=1e-5,
        seed=11,
    )
    assert config.verify.family == "extremal"
    assert config.verify.eps == 0.05
    assert config.sharpness.eps == [0.2, 0.1]
    assert config.tolerances.quad == 1e-6
    assert config.tolerances.sum == 1e-5
    assert config.seed == 11


def test_override_breaks_preset():
    """Test that an override violating the preset's hypotheses is reported by name."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(preset="Cor54", sets=["kernel.sigma=0.8"])
    message = str(excinfo.value)
    assert "preset Cor54 requires" in message
    assert "γ = σ/2" in message


def test_kernel_invariant_becomes_config_error():
    """Test that a parameter invariant failure surfaces as a ConfigError."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(sets=["kernel.gamma=0.95"])
    assert "0<γ<σ≤1" in str(excinfo.value)


@pytest.mark.parametrize(
    "sets",
    [
        ["kernel.sigma"],
        ["=1"],
        ["kernel.omega=1"],
        ["kernel=3", "kernel.rho=1"],
        ["tolerances.quad=0.5"],
        ["measures.discrete=gauss(2)"],
        ["measures.delta=0"],
    ],
)
def test_bad_overrides(sets):
    """Test malformed assignments, unknown keys and out-of-range values."""
    with pytest.raises(ConfigError):
        load_config(sets=sets)


def test_unknown_preset():
    """Test that an unknown preset lists the known ones."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(preset="Cor99")
    assert "Cor54" in str(excinfo.value)


@pytest.mark.parametrize(
    "content,message",
    [
        ("{not json", "not valid JSON"),
        ("[1, 2]", "JSON object"),
    ],
)
def test_bad_config_files(tmp_path, content, message):
    """Test unreadable and non-object configuration files."""
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ConfigError) as excinfo:
        load_config(path=path)
    assert message in str(excinfo.value)


def test_missing_config_file(tmp_path):
    """Test that a missing file is a ConfigError."""
    with pytest.raises(ConfigError) as excinfo:
        load_config(path=tmp_path / "absent.json")
    assert "not found" in str(excinfo.value)
