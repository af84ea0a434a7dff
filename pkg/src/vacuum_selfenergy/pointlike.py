"""Energy densities around a point-like polarizable source.

Units: densities are multiples of ``alpha * hbar * c`` with ``hbar = c = 1``
and unit polarizability; lengths are dimensionless.

Normalisation. In the double wavenumber representation

    u_el(r) = ELECTRIC_PREFACTOR * int dk dk' Q_E(k, k', r) k^3 k'^3 / (k + k')
    u_mag(r) = -MAGNETIC_PREFACTOR * int dk dk' Q_M(k, k', r) k^3 k'^3 / (k + k')

the electric prefactor is twice the magnetic one. This is the choice that
reproduces the single-eta integrands (and therefore the 23/(4 pi)^2 and
7/(4 pi)^2 coefficients) and makes ``2 Q_E - Q_M`` integrate to zero over
space, which is what the global cancellation needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import _contour, kernels
from ._validation import DomainError, check_component, require_nonnegative, require_positive
from .quadrature import (ConvergenceError, QuadratureConfig, QuadratureResult, integrate_double_k,
                         integrate_semi_infinite)

PI = math.pi
FOUR_PI_SQ = (4 * PI) ** 2

ELECTRIC_PREFACTOR = 1.0 / (2 * PI**3)
MAGNETIC_PREFACTOR = 1.0 / (4 * PI**3)

#: ``u * r**7`` for the closed forms.
ELECTRIC_COEFFICIENT = 23.0 / FOUR_PI_SQ
MAGNETIC_COEFFICIENT = -7.0 / FOUR_PI_SQ

#: Exponents of the small-cutoff expansion ``q(gamma) = q(0) + c1 gamma**p1 + ...``
#: at fixed r > 0. The cutoff removes ``int_0^gamma`` of an even integrand,
#: so only odd powers occur; the magnetic integrand vanishes like eta**2.
GAMMA_POWERS = {
    "electric": (1, 3, 5, 7, 9, 11),
    "magnetic": (3, 5, 7, 9, 11, 13),
}

UNITS = "densities in units of alpha*hbar*c"

#: Default for single-density evaluations: densities span many decades, so
#: only the relative tolerance should bind.
DENSITY_CONFIG = QuadratureConfig(abs_tol=1e-250, rel_tol=1e-10)

# Below this r/gamma the closed forms cancel badly and a power series is used.
_SERIES_SWITCH = 0.5
_SERIES_TERMS = 48


@dataclass(frozen=True)
class CutoffParams:
    """Regulators: exponential frequency cutoff ``gamma`` and lower eta limit ``eta_m``."""

    gamma: float = 0.0
    eta_m: float = 0.0

    def __post_init__(self):
        require_nonnegative(self.gamma, "gamma")
        require_nonnegative(self.eta_m, "eta_m")


# ---------------------------------------------------------------------------
# closed forms away from the source

def closed_electric_density(r):
    """``23 / (16 pi^2 r^7)``; only valid for ``r > 0``."""
    require_positive(r, "r")
    return ELECTRIC_COEFFICIENT / np.power(r, 7.0)


def closed_magnetic_density(r):
    """``-7 / (16 pi^2 r^7)``; only valid for ``r > 0``."""
    require_positive(r, "r")
    return MAGNETIC_COEFFICIENT / np.power(r, 7.0)


def closed_density(r, component):
    if component == "total":
        return closed_electric_density(r) + closed_magnetic_density(r)
    check_component(component)
    return closed_electric_density(r) if component == "electric" else closed_magnetic_density(r)


# ---------------------------------------------------------------------------
# single-eta representation

def _eta_integrand(component, r):
    if component == "electric":
        return lambda eta: ELECTRIC_PREFACTOR * kernels.electric_eta_integrand(eta, r)
    return lambda eta: -MAGNETIC_PREFACTOR * kernels.magnetic_eta_integrand(eta, r)


def eta_repr_density(r, component, config=None, *, full_output=False):
    """Density from the eta-decoupled integral, evaluated numerically.

    The integrand is the product of closed-form damped Bessel transforms at
    ``s = eta``; the remaining integral over ``eta`` is done by quadrature.
    Raises :class:`ConvergenceError` if the quadrature fails, unless
    ``full_output`` is set, in which case the :class:`QuadratureResult` is
    returned as is.
    """
    require_positive(r, "r")
    check_component(component)
    r = float(r)
    res = integrate_semi_infinite(_eta_integrand(component, r), config or DENSITY_CONFIG, scale=r)
    if full_output:
        return res
    return res.require(f"{component} eta integral at r={r:g}").value


# ---------------------------------------------------------------------------
# exponential cutoff: closed forms

def _binomial_series(n_terms):
    # (1 + y)**-6 = sum_n (-1)**n C(n+5, 5) y**n
    return np.array([(-1) ** n * math.comb(n + 5, 5) for n in range(n_terms)], dtype=float)


_C6 = _binomial_series(_SERIES_TERMS)
_N = np.arange(_SERIES_TERMS)
# magnetic: int_0^1 u^8 (1 + x^2 u^2)^-6 du = sum_n c_n x^2n / (9 + 2n)
_MAG_SERIES = _C6 / (9 + 2 * _N)
# electric: int_0^1 u^6 (3 - 2y + 3y^2)(1 + y)^-6 du with y = x^2 u^2
_b = 3 * _C6
_b[1:] -= 2 * _C6[:-1]
_b[2:] += 3 * _C6[:-2]
_EL_SERIES = _b / (7 + 2 * _N)


def _electric_shape(x):
    """``int_1^inf (3x^4 - 2x^2 t^2 + 3t^4) / (x^2 + t^2)^6 dt`` for x >= 0."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    series = np.polynomial.polynomial.polyval(xs * xs, _EL_SERIES)
    x2 = xl * xl
    poly = (((1095 * x2 + 2390) * x2 + 2944) * x2 + 1610) * x2 + 345
    closed = (345 * np.arctan(xl) - xl * poly / (1 + x2) ** 5) / (480 * xl**7)
    return np.where(small, series, closed)


def _magnetic_shape(x):
    """``int_1^inf t^2 / (x^2 + t^2)^6 dt`` for x >= 0."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    series = np.polynomial.polynomial.polyval(xs * xs, _MAG_SERIES)
    closed = _magnetic_closed_form(xl, 1.0) / (64 * xl * xl)
    return np.where(small, series, closed)


def _magnetic_closed_form(r, gamma):
    # the six terms of the cutoff-regularised magnetic integral
    r2 = r * r
    d = r2 + gamma * gamma
    return (32 / 5 * r2 * gamma / d**5
            - 4 / 5 * gamma / d**4
            - 14 / 15 * gamma / (r2 * d**3)
            - 7 / 6 * gamma / (r2 * r2 * d**2)
            - 7 / 4 * gamma / (r2**3 * d)
            + 7 / 4 / r2**3 * np.arctan2(r, gamma) / r)


def _out(v):
    return v if np.ndim(v) else float(v)


def regularized_I(r, gamma):
    """Cutoff-regularised ``int dk dk' j1(kr) j1(k'r) k^3 k'^3 exp(-gamma(k+k')) / (k+k')``.

    Closed form: ``32/5 r^2 g/(r^2+g^2)^5 - 4/5 g/(r^2+g^2)^4 - 14/15 g/(r^2 (r^2+g^2)^3)
    - 7/6 g/(r^4 (r^2+g^2)^2) - 7/4 g/(r^6 (r^2+g^2)) + 7/(4 r^7) arctan(r/g)``.
    For ``r/gamma < 0.5`` the terms cancel heavily and the equivalent power
    series in ``(r/gamma)^2`` is summed instead.
    """
    require_positive(r, "r")
    require_positive(gamma, "gamma")
    r = np.asarray(r, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    x = r / gamma
    return _out(64 * x * x * _magnetic_shape(x) / gamma**7)


def regularized_density(r, gamma, component):
    """Density with the exponential cutoff ``exp(-gamma (k + k'))``; finite at ``r = 0``.

    Electric: ``(4/pi^3) int_gamma^inf (3r^4 - 2r^2 s^2 + 3s^4)/(r^2+s^2)^6 ds`` in
    closed form; magnetic: ``-regularized_I / (2 pi^3)``. ``component`` may
    also be ``"total"``.
    """
    require_nonnegative(r, "r")
    require_positive(gamma, "gamma")
    r = np.asarray(r, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    x = r / gamma
    if component == "total":
        return _out(regularized_density(r, gamma, "electric")
                    + regularized_density(r, gamma, "magnetic"))
    check_component(component)
    if component == "electric":
        return _out(4 / PI**3 * _electric_shape(x) / gamma**7)
    return _out(-32 / PI**3 * x * x * _magnetic_shape(x) / gamma**7)


# ---------------------------------------------------------------------------
# exponential cutoff: brute-force double wavenumber oracle

def _double_k_rotated(component, r, gamma, config):
    # Rays along (gamma + i r): exp(i k r - gamma k) then decays without oscillating.
    p = math.hypot(gamma, r)
    omega = complex(gamma, r) / p

    def damping(k):
        return np.exp(-gamma * k)

    terms = _contour.bessel_terms(component, r, damping, damping)
    return _contour.rotated_quadrant(terms, omega, p, config)


def _double_k_real_axis(kernel, r, gamma, config):
    def f(k, kp):
        return kernel(k, kp, r) * (k * kp) ** 3 * np.exp(-gamma * (k + kp)) / (k + kp)
    return integrate_double_k(f, config, scale=1.0 / gamma)


def _double_k(component, r, gamma, config):
    config = config or DENSITY_CONFIG
    # On the real axis the Bessel factors barely oscillate over the decay
    # length 1/gamma when r <= gamma; beyond that the rotated contours are
    # both well conditioned and free of oscillation.
    if r <= gamma:
        kernel = kernels.kernel_QE if component == "electric" else kernels.kernel_QM
        res = _double_k_real_axis(kernel, r, gamma, config)
        factor = 1.0 if component == "electric" else 0.5
    else:
        res = _double_k_rotated(component, r, gamma, config)
        factor = 1.0
    return QuadratureResult(factor * res.value, factor * res.abs_error_estimate,
                            res.evaluations, res.converged, res.message)


def regularized_I_quadrature(r, gamma, config=None):
    """Brute-force evaluation of the cutoff-regularised double integral.

    Independent of the closed form. For ``r > gamma`` both contours are
    rotated into the complex plane along the directions where the
    ``exp(+-i k r - gamma k)`` factors decay without oscillating, and the
    quadrant is integrated in polar coordinates; otherwise the real-axis
    integral is done directly.
    """
    require_positive(r, "r")
    require_positive(gamma, "gamma")
    return _double_k("magnetic", float(r), float(gamma), config)


def regularized_density_quadrature(r, gamma, component, config=None):
    """Double-wavenumber quadrature of the cutoff-regularised density.

    Same routes as :func:`regularized_I_quadrature`. At ``r = 0`` the
    kernels are constant (``Q_E = 2/3``, ``Q_M = 0``).
    """
    require_nonnegative(r, "r")
    require_positive(gamma, "gamma")
    check_component(component)
    r = float(r)
    gamma = float(gamma)
    if r == 0.0 and component == "magnetic":
        return QuadratureResult(0.0, 0.0, 1, True)
    res = _double_k(component, r, gamma, config)
    factor = ELECTRIC_PREFACTOR if component == "electric" else -2.0 * MAGNETIC_PREFACTOR
    return QuadratureResult(factor * res.value, abs(factor) * res.abs_error_estimate,
                            res.evaluations, res.converged, res.message)


# ---------------------------------------------------------------------------
# global energies

@dataclass(frozen=True)
class GlobalEnergyReport:
    """Space-integrated electric and magnetic energies under a regulator."""

    electric_total: float
    magnetic_total: float
    sum_total: float
    regulator: CutoffParams
    abs_error_estimate: float = 0.0
    method: str = "closed"


def _global_closed(eta_m):
    return 3.0 / (16.0 * PI * eta_m**4)


def global_energy(regulator, method="closed", config=None):
    """Space integrals of the point-like densities with the eta integral cut at ``eta_m``.

    ``method="closed"`` returns ``3 / (16 pi eta_m^4)`` and its negative;
    ``method="quadrature"`` performs the radial-then-eta double integral
    numerically (the order in which it converges).
    """
    eta_m = regulator.eta_m
    if not eta_m > 0:
        raise DomainError("regulator must be positive: eta_m > 0 (the totals diverge otherwise)")
    if method == "closed":
        e = _global_closed(eta_m)
        return GlobalEnergyReport(e, -e, 0.0, regulator)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    config = config or QuadratureConfig()
    inner_cfg = config.inner()
    evaluations = 0

    def per_eta(eta):
        nonlocal evaluations

        def radial(x):
            # r = x * eta puts the peak of every column near x = 1
            e = eta[None, :]
            r = x[:, None] * e
            d6 = (r * r + e * e) ** 6
            el = (3 * r**4 - 2 * r * r * e * e + 3 * e**4) / d6
            mag = -8 * r * r * e * e / d6
            w = 16 / PI**2 * r * r * e
            return np.stack([w * el, w * mag], axis=-1)

        res = integrate_semi_infinite(radial, inner_cfg)
        evaluations += res.evaluations
        res.require(f"radial integral near eta={eta[0]:.6g}")
        return res.value, res.abs_error_estimate

    res = integrate_semi_infinite(per_eta, config, a=eta_m, scale=eta_m, with_errors=True)
    res.require("eta integral")
    el, mag = (float(v) for v in res.value)
    # each eta slice cancels on its own, so the sum carries no extra error
    return GlobalEnergyReport(el, mag, el + mag, regulator,
                              float(np.sum(res.abs_error_estimate)), "quadrature")


@dataclass(frozen=True)
class SingularRow:
    gamma: float
    electric: float
    magnetic: float
    total: float
    electric_expected: float
    abs_error_estimate: float
    converged: bool
    message: str = ""

    @property
    def electric_gamma4(self):
        return self.electric * self.gamma**4


@dataclass(frozen=True)
class SingularCancellationReport:
    rows: Tuple[SingularRow, ...]
    slope: Optional[float]
    total_tolerance: float
    electric_rel_tolerance: float

    @property
    def passed(self):
        if not self.rows:
            return False
        for row in self.rows:
            if not row.converged:
                return False
            if abs(row.total) > self.total_tolerance:
                return False
            if abs(row.electric / row.electric_expected - 1) > self.electric_rel_tolerance:
                return False
        return True


def radial_config(gamma):
    """Default tolerances of :func:`radial_integrals` at cutoff ``gamma``.

    The summed column is zero, so its tolerance is absolute; it is tied to
    the size of the separate totals, below which round-off dominates.
    """
    require_positive(gamma, "gamma")
    return QuadratureConfig(abs_tol=max(1e-10, 1e-12 * _global_closed(gamma)), rel_tol=1e-11)


def radial_integrals(gamma, config=None):
    """``int_0^inf 4 pi r^2 u(r, gamma) dr`` for electric, magnetic and their sum.

    The sum is integrated pointwise (not as a difference of the two totals).
    """
    require_positive(gamma, "gamma")
    config = config or radial_config(gamma)

    def f(r):
        el = regularized_density(r, gamma, "electric")
        mag = regularized_density(r, gamma, "magnetic")
        w = 4 * PI * r * r
        return np.stack([w * el, w * mag, w * (el + mag)], axis=-1)

    return integrate_semi_infinite(f, config, scale=gamma)


def singular_row(gamma, config=None):
    """:func:`radial_integrals` at one ``gamma`` as a :class:`SingularRow`.

    A quadrature failure is recorded in the row (``converged=False`` and a
    message) rather than raised.
    """
    gamma = float(gamma)
    try:
        res = radial_integrals(gamma, config)
    except ConvergenceError as exc:
        nan = math.nan
        return SingularRow(gamma, nan, nan, nan, _global_closed(gamma), math.inf, False, str(exc))
    el, mag, tot = (float(v) for v in np.broadcast_to(res.value, (3,)))
    return SingularRow(gamma, el, mag, tot, _global_closed(gamma),
                       float(np.max(res.abs_error_estimate)), res.converged, res.message)


def verify_singular_cancellation(gamma_sequence, config=None, *, total_tolerance=1e-8,
                                 electric_rel_tolerance=1e-8):
    """Check that the cutoff-regularised densities integrate to zero in total.

    For each ``gamma`` the electric, magnetic and total radial integrals are
    computed; the electric one must equal ``3 / (16 pi gamma^4)``. A failure at
    one ``gamma`` is recorded in its row and the remaining values are still
    processed. ``slope`` is the least-squares exponent of the electric total
    against ``gamma`` (expected -4).
    """
    gammas = [float(g) for g in gamma_sequence]
    if len(gammas) < 3:
        raise ValueError("need at least 3 gamma values")
    for g in gammas:
        require_positive(g, "gamma")
    if any(b >= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gamma values must be strictly decreasing")
    rows = [singular_row(g, config) for g in gammas]
    ok = [row for row in rows if row.converged and row.electric > 0]
    slope = None
    if len(ok) >= 2:
        slope = float(np.polyfit(np.log([r.gamma for r in ok]),
                                 np.log([r.electric for r in ok]), 1)[0])
    return SingularCancellationReport(tuple(rows), slope, total_tolerance, electric_rel_tolerance)


# ---------------------------------------------------------------------------
# singular structure at the source

class DeltaTerm(NamedTuple):
    """``coefficient * delta^(n)(r) / r^m`` with an exact rational coefficient."""

    derivative_order: int
    inverse_power: int
    rational: Fraction


@dataclass(frozen=True)
class SingularExpansion:
    """Regular ``1/r^7`` term plus delta-derivative terms, all times ``prefactor``."""

    component: str
    regular_rational: Fraction
    delta_rationals: Tuple[DeltaTerm, ...]
    prefactor: float = 1.0 / FOUR_PI_SQ
    prefactor_label: str = "1/(4 pi)^2"

    @property
    def regular_coeff(self):
        return float(self.regular_rational) * self.prefactor

    @property
    def delta_terms(self) -> List[Tuple[int, int, float]]:
        return [(t.derivative_order, t.inverse_power, float(t.rational) * self.prefactor)
                for t in self.delta_rationals]

    def rows(self):
        """``(n, m, rational)`` rows; the regular term is reported as ``n = None, m = 7``."""
        return [(None, 7, self.regular_rational)] + [tuple(t) for t in self.delta_rationals]


def _table(regular, deltas, sign=1):
    return (sign * Fraction(regular),
            tuple(DeltaTerm(n, m, sign * Fraction(c)) for n, m, c in deltas))


_ELECTRIC_TABLE = _table(23, [(0, 6, -23), (1, 5, 10), (2, 4, Fraction(-7, 3)),
                              (3, 3, Fraction(1, 3)), (4, 2, Fraction(1, 15))])
_MAGNETIC_TABLE = _table(7, [(0, 6, -7), (1, 5, 2), (2, 4, Fraction(1, 3)),
                             (3, 3, Fraction(-1, 3)), (4, 2, Fraction(-1, 15))], sign=-1)
# same bracket as the magnetic table, for the bare regularised integral
_I_TABLE = _table(7, [(0, 6, -7), (1, 5, 2), (2, 4, Fraction(1, 3)),
                      (3, 3, Fraction(-1, 3)), (4, 2, Fraction(-1, 15))])


def singular_expansion(component):
    """Coefficient table of the density as a distribution including ``r = 0``."""
    check_component(component)
    regular, deltas = _ELECTRIC_TABLE if component == "electric" else _MAGNETIC_TABLE
    return SingularExpansion(component, regular, deltas)


def regularized_I_expansion():
    """Limit ``gamma -> 0`` of :func:`regularized_I` as a distribution, prefactor ``pi/8``."""
    regular, deltas = _I_TABLE
    return SingularExpansion("I", regular, deltas, prefactor=PI / 8, prefactor_label="pi/8")


__all__ = [
    "ConvergenceError",
    "CutoffParams",
    "DENSITY_CONFIG",
    "DeltaTerm",
    "ELECTRIC_COEFFICIENT",
    "ELECTRIC_PREFACTOR",
    "GAMMA_POWERS",
    "GlobalEnergyReport",
    "MAGNETIC_COEFFICIENT",
    "MAGNETIC_PREFACTOR",
    "SingularCancellationReport",
    "SingularExpansion",
    "SingularRow",
    "UNITS",
    "closed_density",
    "closed_electric_density",
    "closed_magnetic_density",
    "eta_repr_density",
    "global_energy",
    "radial_config",
    "radial_integrals",
    "regularized_I",
    "regularized_I_expansion",
    "regularized_I_quadrature",
    "regularized_density",
    "regularized_density_quadrature",
    "singular_expansion",
    "singular_row",
    "verify_singular_cancellation",
]
