"""Configuration and result records shared by the integration routines."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

#: Number of nodes of the Gauss-Kronrod rule used everywhere.
RULE_SIZE = 21

Number = Union[float, np.ndarray]


class ConvergenceError(ArithmeticError):
    """Raised when a caller needs a value but the integration did not converge.

    The offending :class:`QuadratureResult` is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for one integration axis.

    A result is accepted once ``abs_error_estimate <= max(abs_tol, rel_tol * |value|)``.
    With ``relative_to_magnitude`` the relative part is taken against the
    integral of ``|f|`` instead; this is the useful criterion for components
    that cancel to nearly zero and whose errors are propagated further anyway.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_evaluations: int = 2_000_000
    subdivision_limit: int = 20_000
    relative_to_magnitude: bool = False

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_evaluations < RULE_SIZE:
            raise ValueError(f"max_evaluations must be at least {RULE_SIZE}")
        if self.subdivision_limit < 1:
            raise ValueError("subdivision_limit must be positive")

    def replace(self, **changes) -> "QuadratureConfig":
        return replace(self, **changes)

    def inner(self, factor: float = 50.0) -> "QuadratureConfig":
        """Config for a nested inner axis: tolerances tightened by ``factor``."""
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)

    def tolerance(self, value: Number, magnitude: Number = None) -> Number:
        if self.relative_to_magnitude and magnitude is not None:
            value = magnitude
        return np.maximum(self.abs_tol, self.rel_tol * np.abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral with its error estimate and cost.

    ``value`` and ``abs_error_estimate`` are floats for scalar integrands and
    arrays of the integrand's trailing shape for vector-valued integrands.
    """

    value: Number
    abs_error_estimate: Number
    evaluations: int
    converged: bool
    message: str = ""

    def __float__(self):
        return float(self.value)

    def require(self, what: str = "integral") -> "QuadratureResult":
        """Return ``self`` if converged, otherwise raise :class:`ConvergenceError`."""
        if not self.converged:
            detail = f": {self.message}" if self.message else ""
            raise ConvergenceError(f"{what} did not converge{detail}", self)
        return self
