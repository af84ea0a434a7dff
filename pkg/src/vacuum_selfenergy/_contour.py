"""Double wavenumber integrals with both contours rotated off the real axis.

On the real axis ``j_l(x) = Re h_l(x)`` with ``h0(x) = -i e^{ix}/x`` and
``h1(x) = -e^{ix}(x + i)/x^2``. A product of two Bessel factors is split as

    j(x) j(y) = Re[h(x) h(y)] / 2 + Re[h(x) h*(y)] / 2,    h*(y) = conj(h(conj y)),

and in each piece ``k`` and ``k'`` are moved onto rays on which the
``exp(+-i k r)`` factors decay. The weights multiplying the Bessel factors
must be analytic in the swept sectors and real on the real axis.
"""
from __future__ import annotations

import math

import numpy as np

from .quadrature import ConvergenceError, QuadratureConfig, QuadratureResult, integrate
from .quadrature import integrate_semi_infinite


def k3_h0(k, r):
    """``k^3 h0(k r)`` written without the removable singularity at 0."""
    return -1j * k * k * np.exp(1j * k * r) / r


def k3_h1_over_x(k, r):
    """``k^3 h1(k r) / (k r)``."""
    return -np.exp(1j * k * r) * (k * r + 1j) / r**3


def k3_h1(k, r):
    """``k^3 h1(k r)``."""
    return -np.exp(1j * k * r) * (k * r + 1j) * k / r**2


def bessel_terms(component, r, f, g):
    """``(weight, F, G)`` triples with ``sum weight F(k) G(k')`` the complexified kernel.

    ``f`` and ``g`` weight the ``k`` and ``k'`` factors. The electric terms
    reproduce ``Q_E k^3 k'^3``; the magnetic one is ``j1 j1 k^3 k'^3`` (no
    factor 2).
    """
    def weighted(w, basis):
        return lambda k: w(k) * basis(k, r)

    if component == "magnetic":
        return [(1.0, weighted(f, k3_h1), weighted(g, k3_h1))]
    a0, a1 = weighted(f, k3_h0), weighted(f, k3_h1_over_x)
    b0, b1 = weighted(g, k3_h0), weighted(g, k3_h1_over_x)
    return [(1.0, a0, b0), (-1.0, a0, b1), (-1.0, a1, b0), (3.0, a1, b1)]


def rotated_quadrant(terms, omega, decay_rate, config=None, *, inner_factor=50.0):
    """``int_0^inf int_0^inf sum w F(k) G(k') / (k + k') dk dk'`` along rotated rays.

    ``omega`` is the unit direction of the ``k`` ray (upper half plane). The
    quadrant is integrated in polar coordinates ``(rho, theta)`` so that the
    Jacobian cancels the ``1/(k + k')`` singularity at the corner. ``decay_rate``
    sets the radial length scale.
    """
    config = config or QuadratureConfig()
    # inner errors are propagated, so the inner axis only needs accuracy
    # relative to the size of what it integrates
    inner_cfg = config.inner(inner_factor).replace(relative_to_magnitude=True)
    conj_terms = [(w, f, _reflected(g)) for w, f, g in terms]
    omega_bar = np.conj(omega)
    evaluations = 0

    def angular(theta):
        nonlocal evaluations
        c = np.cos(theta)[None, :]
        s = np.sin(theta)[None, :]
        same_jac = omega / (c + s)
        opposite_jac = 1.0 / (c * omega + s * omega_bar)

        def radial(rho):
            rho = rho[:, None]
            k = rho * c * omega
            kp = rho * s * omega
            same = sum(w * f(k) * g(kp) for w, f, g in terms)
            kp = rho * s * omega_bar
            opposite = sum(w * f(k) * g(kp) for w, f, g in conj_terms)
            return 0.5 * np.real(same * same_jac + opposite * opposite_jac)

        res = integrate_semi_infinite(radial, inner_cfg, scale=1.0 / decay_rate)
        evaluations += res.evaluations
        if not np.all(np.isfinite(res.value)):
            raise ConvergenceError(f"radial integral failed: {res.message}", res)
        return res.value, res.abs_error_estimate

    try:
        res = integrate(angular, 0.0, math.pi / 2, config, with_errors=True)
    except ConvergenceError as exc:
        return QuadratureResult(math.nan, math.inf, evaluations, False, str(exc))
    return QuadratureResult(res.value, res.abs_error_estimate, res.evaluations + evaluations,
                            res.converged, res.message)


def polar_quadrant(f, scale, config=None, *, inner_factor=50.0):
    """``int_0^inf int_0^inf f(k, k') dk dk'`` in polar coordinates on the real quadrant.

    Integrands carrying ``1/(k + k')`` become bounded at the corner, and
    algebraic tails decay along every ray instead of piling up in one
    nested direction. ``f`` broadcasts over ``(rho, theta)`` grids.
    """
    config = config or QuadratureConfig()
    # inner errors are propagated, so the inner axis only needs accuracy
    # relative to the size of what it integrates
    inner_cfg = config.inner(inner_factor).replace(relative_to_magnitude=True)
    evaluations = 0

    def angular(theta):
        nonlocal evaluations
        c = np.cos(theta)[None, :]
        s = np.sin(theta)[None, :]

        def radial(rho):
            rho = rho[:, None]
            return rho * f(rho * c, rho * s)

        res = integrate_semi_infinite(radial, inner_cfg, scale=scale)
        evaluations += res.evaluations
        if not np.all(np.isfinite(res.value)):
            raise ConvergenceError(f"radial integral failed: {res.message}", res)
        return res.value, res.abs_error_estimate

    try:
        res = integrate(angular, 0.0, math.pi / 2, config, with_errors=True)
    except ConvergenceError as exc:
        return QuadratureResult(math.nan, math.inf, evaluations, False, str(exc))
    return QuadratureResult(res.value, res.abs_error_estimate, res.evaluations + evaluations,
                            res.converged, res.message)


def _reflected(fn):
    return lambda k: np.conj(fn(np.conj(k)))
