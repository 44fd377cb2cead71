"""
csch-hilbert - numerical verification of half-discrete Hilbert-type inequalities
with the hyperbolic cosecant kernel h(t) = csch(ρt^γ)·e^{−αt^γ}.

Primary entry points:
- kernel_constant_closed / kernel_constant_quadrature: the best constant k(σ) two ways
- omega / varpi / weight_report: weight coefficients and their bounds by k(σ)
- verify: the three equivalent inequalities in the forward and reverse regimes
- sharpness_trace / opnorm_ladder: numerical evidence that k(σ) is best possible
"""

from .errors import ConfigError, ConvergenceError, DivergenceError, DomainError, HilbertError
from .inequality import HolderPair, NormWeights, Regime, WeightKind, smooth_pair, verify
from .kernel import KernelParams, kernel_constant_closed, kernel_constant_quadrature
from .measures import Scheme, continuous_from_id, discrete_from_id
from .models import Verdict
from .sharpness import extremal_pair, opnorm_ladder, sharpness_trace
from .version import __version__, get_version
from .weights import omega, varpi, weight_report

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "HilbertError",
    "HolderPair",
    "KernelParams",
    "NormWeights",
    "Regime",
    "Scheme",
    "Verdict",
    "WeightKind",
    "__version__",
    "continuous_from_id",
    "discrete_from_id",
    "extremal_pair",
    "get_version",
    "kernel_constant_closed",
    "kernel_constant_quadrature",
    "omega",
    "opnorm_ladder",
    "sharpness_trace",
    "smooth_pair",
    "varpi",
    "verify",
    "weight_report",
]
