"""Convolution-algebra calculus for non-autonomous linear ODE propagators.

Core layers: adaptive Chebyshev series (:mod:`.cheb`), the order-capped
convolution algebra (:mod:`.kernel`), closed-form powers and propagation
(:mod:`.starcalc`), analytic eigendecomposition (:mod:`.spectral`),
anchor-parameterized norms (:mod:`.norms`), best-L2 polynomial
approximation with its error-bound chain (:mod:`.approx`), and reference
ODE solvers (:mod:`.odesolve`). The service and CLI layers wrap these.
"""

__version__ = "0.1.0"

from .cheb import ChebSeries, Interval
from .errors import (
    ConfigError,
    CrossingError,
    DomainError,
    ExpressionError,
    IntervalMismatchError,
    NonHermitianError,
    NumericalError,
    ShapeError,
    StarApproxError,
    UnresolvedFunctionError,
)
from .kernel import SmoothKernel, StarElement, StarMatrix
from .starcalc import StarPolynomial

__all__ = [
    "__version__",
    "ChebSeries",
    "Interval",
    "SmoothKernel",
    "StarElement",
    "StarMatrix",
    "StarPolynomial",
    "StarApproxError",
    "DomainError",
    "IntervalMismatchError",
    "UnresolvedFunctionError",
    "CrossingError",
    "NonHermitianError",
    "ShapeError",
    "ExpressionError",
    "ConfigError",
    "NumericalError",
]
