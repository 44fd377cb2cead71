"""
Pytest configuration file.

This file configures logging and the schemes shared by the tests.
"""

import logging
import os
import sys
from pathlib import Path

import pytest
from dotenv import load_dotenv

# Load environment variables from .env.test
load_dotenv(".env.test")

# Add the project root to the Python path to ensure imports work correctly
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.csch_hilbert.kernel import KernelParams  # noqa: E402
from src.csch_hilbert.measures import (  # noqa: E402
    PowerDamped,
    PowerSequence,
    Scheme,
    UnitDensity,
    UnitSequence,
)


# Configure logging for all tests
@pytest.fixture(autouse=True)
def setup_logging():
    """
    Configure logging for all tests.

    This fixture runs automatically for all tests and sets up logging with:
    - Format from LOG_FORMAT environment variable
    - Level from LOG_LEVEL environment variable
    - Console output
    """
    log_level = os.getenv("LOG_LEVEL", "DEBUG")
    log_format = os.getenv(
        "LOG_FORMAT",
        "%(asctime)s - %(levelname)s - %(filename)s:%(lineno)d - %(funcName)s - %(message)s",
    )

    formatter = logging.Formatter(log_format)
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)

    # the command line may have disabled logging in an earlier test
    logging.disable(logging.NOTSET)
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level.upper()))
    root_logger.handlers = []
    root_logger.addHandler(console_handler)

    yield

    root_logger.handlers = []


@pytest.fixture
def cor54_params():
    """α = ρ = 1, γ = 1/2, σ = 1, where k(σ) = π²/6."""
    return KernelParams(rho=1.0, alpha=1.0, gamma=0.5, sigma=1.0)


@pytest.fixture
def cor54_scheme(cor54_params):
    return Scheme(delta=1, cm=UnitDensity(), dm=UnitSequence(), params=cor54_params)


@pytest.fixture
def power_params():
    return KernelParams(rho=1.0, alpha=0.5, gamma=0.4, sigma=0.9)


@pytest.fixture
def cor51_scheme(power_params):
    """δ = 1 with μ = (1+t)^{-1/2}, ν_n = n^{-1/2} and β = 1/4."""
    return Scheme(
        delta=1, cm=PowerDamped(0.5), dm=PowerSequence(0.5, beta=0.25), params=power_params
    )


@pytest.fixture
def cor52_scheme(power_params):
    """The same measures as cor51_scheme with δ = −1."""
    return Scheme(
        delta=-1, cm=PowerDamped(0.5), dm=PowerSequence(0.5, beta=0.25), params=power_params
    )
