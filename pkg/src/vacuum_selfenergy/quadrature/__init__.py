"""Adaptive quadrature engine: semi-infinite, oscillatory and nested integrals."""
from ._types import ConvergenceError, QuadratureConfig, QuadratureResult
from .acceleration import wynn_epsilon
from .adaptive import gk21_panels, integrate
from .extrapolation import ExtrapolationResult, extrapolate_to_zero
from .semi_infinite import (integrate_double_k, integrate_oscillatory, integrate_semi_infinite,
                            log_points)

__all__ = [
    "ConvergenceError",
    "ExtrapolationResult",
    "QuadratureConfig",
    "QuadratureResult",
    "extrapolate_to_zero",
    "gk21_panels",
    "integrate",
    "integrate_double_k",
    "integrate_oscillatory",
    "integrate_semi_infinite",
    "log_points",
    "wynn_epsilon",
]
