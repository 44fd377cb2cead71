"""
Exception hierarchy for csch-hilbert.

Library code raises these; only the command line maps them to exit codes.
"""

from typing import Optional, Union

import numpy as np


class HilbertError(Exception):
    """Base class for all package errors."""


class DomainError(HilbertError, ValueError):
    """An argument or configuration violates a mathematical precondition."""


class DivergenceError(DomainError):
    """A sum or integral that must be finite diverges for the given inputs."""


class ConfigError(HilbertError):
    """A run configuration could not be read or validated."""


class ConvergenceError(HilbertError, RuntimeError):
    """A numerical procedure exhausted its budget before reaching tolerance.

    Attributes:
        value: Best value computed before giving up
        error: Error estimate belonging to ``value``
    """

    def __init__(
        self,
        message: str,
        value: Optional[Union[float, np.ndarray]] = None,
        error: Optional[Union[float, np.ndarray]] = None,
    ) -> None:
        super().__init__(message)
        self.value = value
        self.error = error
