"""Spherical Bessel kernels and closed-form damped Bessel transforms.

All functions accept scalars or numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numpy.polynomial import polynomial as P

from ._validation import DomainError, require_nonnegative, require_positive

# Below this |x| the trigonometric forms lose digits to cancellation; the
# power series is summed there instead.
SERIES_SWITCH = 0.5
_N_TERMS = 10


def _coefficients(order):
    # j_l(x) = x**l * sum_n (-x**2/2)**n / (n! (2l+2n+1)!!)
    out = []
    for n in range(_N_TERMS):
        double_fact = math.prod(range(2 * order + 2 * n + 1, 0, -2))
        out.append((-0.5) ** n / (math.factorial(n) * double_fact))
    return np.array(out)


_J0_SERIES = _coefficients(0)
_J1_SERIES = _coefficients(1)


class KernelArgs(NamedTuple):
    """Arguments ``(k, k', r)`` of the angular kernels."""

    k: float
    k_prime: float
    r: float

    def validated(self) -> "KernelArgs":
        require_nonnegative(self.k, "k")
        require_nonnegative(self.k_prime, "k_prime")
        require_nonnegative(self.r, "r")
        return self


def _series_branch(x, series, trig):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xt = np.where(small, 1.0, x)
    out = np.where(small, series(xs), trig(xt))
    return out if out.ndim else float(out)


def sph_j0(x):
    """Spherical Bessel function ``j0(x) = sin(x)/x``."""
    return _series_branch(x, lambda x: P.polyval(x * x, _J0_SERIES), lambda x: np.sin(x) / x)


def sph_j1(x):
    """Spherical Bessel function ``j1(x) = sin(x)/x**2 - cos(x)/x``."""
    return _series_branch(x, lambda x: x * P.polyval(x * x, _J1_SERIES),
                          lambda x: (np.sin(x) / x - np.cos(x)) / x)


def j1_over_x(x):
    """``j1(x)/x``, equal to 1/3 at the origin."""
    return _series_branch(x, lambda x: P.polyval(x * x, _J1_SERIES),
                          lambda x: (np.sin(x) / x - np.cos(x)) / (x * x))


def kernel_QE(k, k_prime, r):
    """Electric angular kernel.

    ``j0 j0' - j0 j1'/(k'r) - j1/(kr) j0' + 3 j1/(kr) j1'/(k'r)``; it tends to
    2/3 at ``r = 0`` for any ``k, k'``.
    """
    x = np.multiply(k, r)
    y = np.multiply(k_prime, r)
    a0, b0 = sph_j0(x), sph_j0(y)
    a1, b1 = j1_over_x(x), j1_over_x(y)
    return a0 * b0 - a0 * b1 - a1 * b0 + 3.0 * a1 * b1


def kernel_QM(k, k_prime, r):
    """Magnetic angular kernel ``2 j1(kr) j1(k'r)``."""
    return 2.0 * sph_j1(np.multiply(k, r)) * sph_j1(np.multiply(k_prime, r))


def _check_sr(s, r):
    require_positive(s, "s")
    require_positive(r, "r")
    return np.asarray(s, dtype=float), np.asarray(r, dtype=float)


def _out(v):
    return v if np.ndim(v) else float(v)


def laplace_k3_j1(s, r):
    """``int_0^inf k^3 j1(kr) exp(-s k) dk = 8 r s / (r^2 + s^2)^3``."""
    s, r = _check_sr(s, r)
    return _out(8.0 * r * s / (r * r + s * s) ** 3)


def laplace_k3_j0(s, r):
    """``int_0^inf k^3 j0(kr) exp(-s k) dk = 2 (3 s^2 - r^2) / (s^2 + r^2)^3``."""
    s, r = _check_sr(s, r)
    return _out(2.0 * (3.0 * s * s - r * r) / (s * s + r * r) ** 3)


def laplace_k2_j1(s, r):
    """``int_0^inf k^2 j1(kr) exp(-s k) dk = 2 r / (s^2 + r^2)^2``."""
    s, r = _check_sr(s, r)
    return _out(2.0 * r / (s * s + r * r) ** 2)


def electric_eta_integrand(s, r):
    """Squared-transform combination entering the electric density.

    ``A^2 - 2 A B / r + 3 B^2 / r^2`` with ``A = laplace_k3_j0`` and
    ``B = laplace_k2_j1``; equals ``8 (3 s^4 - 2 s^2 r^2 + 3 r^4) / (s^2 + r^2)^6``.
    """
    A = laplace_k3_j0(s, r)
    Br = np.divide(laplace_k2_j1(s, r), r)
    return A * A - 2.0 * A * Br + 3.0 * Br * Br


def magnetic_eta_integrand(s, r):
    """``2 laplace_k3_j1(s, r)**2 = 128 r^2 s^2 / (s^2 + r^2)^6``."""
    C = laplace_k3_j1(s, r)
    return 2.0 * C * C


__all__ = [
    "DomainError",
    "KernelArgs",
    "electric_eta_integrand",
    "j1_over_x",
    "kernel_QE",
    "kernel_QM",
    "laplace_k2_j1",
    "laplace_k3_j0",
    "laplace_k3_j1",
    "magnetic_eta_integrand",
    "sph_j0",
    "sph_j1",
]
