"""Argument checks shared across modules."""
from __future__ import annotations

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


def require_positive(value, name):
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)) or not np.all(v > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def require_nonnegative(value, name):
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)) or not np.all(v >= 0):
        raise DomainError(f"{name} must be non-negative and finite, got {value!r}")
    return value


def check_component(component, allowed=("electric", "magnetic")):
    if component not in allowed:
        raise ValueError(f"component must be one of {', '.join(allowed)}; got {component!r}")
    return component
