"""Small values of trigonometric polynomials and Mahler measures on the circle."""

from .errors import AccuracyError, ConvergenceError, InvalidInputError, NotNormalizableError
from .trigpoly import AlgebraicPoly, TrigPoly, bandwidth, derivative, evaluate, height, normalize

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AlgebraicPoly",
    "ConvergenceError",
    "InvalidInputError",
    "NotNormalizableError",
    "TrigPoly",
    "bandwidth",
    "derivative",
    "evaluate",
    "height",
    "normalize",
]
