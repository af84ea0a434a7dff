"""Energy densities around an extended polarizable source.

The source has a spherically symmetric density with form factor ``rho(k)``
and a polarizability ``alpha(k)``. The densities are

    u_el(R) = ELECTRIC_PREFACTOR int dk dk' w(k, k') Q_E(k, k', R) k^3 k'^3 / (k + k')
    u_mag(R) = -MAGNETIC_PREFACTOR int dk dk' w(k, k') Q_M(k, k', R) k^3 k'^3 / (k + k')

with ``w = (alpha(k) + alpha(k')) rho(k) rho(k') / 2``; for ``rho = 1`` and a
static unit polarizability they reduce to the point-like densities. The size
of the source cuts off large wavenumbers, so the densities are finite at
``R = 0`` and integrable over all space.

Two independent routes are provided. The ``"eta"`` route writes
``1/(k + k')`` as ``int_0^inf exp(-eta (k + k')) d eta``, which factorises the
double integral into products of one-dimensional damped Bessel transforms of
the weights, evaluated by quadrature. The ``"double"`` route integrates over
the ``(k, k')`` quadrant directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _contour, kernels
from ._validation import DomainError, check_component, require_nonnegative, require_positive
from .pointlike import (DENSITY_CONFIG, ELECTRIC_PREFACTOR, GAMMA_POWERS, MAGNETIC_PREFACTOR,
                        UNITS, closed_density)
from .quadrature import (ConvergenceError, ExtrapolationResult, QuadratureConfig, QuadratureResult,
                         extrapolate_to_zero, integrate, integrate_semi_infinite)

FORM_FACTOR_KINDS = ("point", "gaussian", "lorentzian-squared")
POLARIZABILITY_KINDS = ("static", "rational")
_KIND_ALIASES = {"lorentzian2": "lorentzian-squared"}

# Rational weights are continued onto the ray arg k = pi/4, clear of their
# poles on the imaginary axis; exp(i k R) decays there. The Gaussian only
# decays for arg k < pi/4 and uses half that angle.
_RAY = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
_GAUSSIAN_RAY = complex(math.cos(math.pi / 8), math.sin(math.pi / 8))
# Below k R = _SPLIT the transforms stay on the real axis: the Hankel
# splitting would cancel badly near k = 0.
_SPLIT = math.pi
# The double route rotates its contours from R = _ROTATE_FROM * length_scale
# on; closer in, see _double_route.
_ROTATE_FROM = 0.5


class InadmissibleSourceError(DomainError):
    """The source's large-k decay is too weak for finite densities."""


# ---------------------------------------------------------------------------
# source descriptors

@dataclass(frozen=True)
class FormFactor:
    """Form factor ``rho(k)`` of a normalised spherical density.

    ``gaussian``: ``exp(-k^2 a^2 / 4)``; ``lorentzian-squared`` (alias
    ``lorentzian2``): ``1 / (1 + k^2 a^2)^2``; ``point``: 1, with ``a = 0``.
    """

    kind: str = "point"
    a: float = 0.0

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind, self.kind)
        if kind not in FORM_FACTOR_KINDS:
            raise ValueError(f"unknown form factor {self.kind!r}; expected one of "
                             f"{', '.join(FORM_FACTOR_KINDS)}")
        object.__setattr__(self, "kind", kind)
        if kind == "point":
            if self.a != 0:
                raise DomainError("a point form factor has no size: a must be 0")
        else:
            require_positive(self.a, "a")
        object.__setattr__(self, "a", float(self.a))

    @property
    def decay_exponent(self) -> float:
        """Power ``p`` with ``rho(k) ~ k^-p`` at large ``k`` (infinite for the Gaussian)."""
        return {"point": 0.0, "gaussian": math.inf, "lorentzian-squared": 4.0}[self.kind]

    @property
    def continuable(self) -> bool:
        """Whether ``rho`` stays bounded on the ray ``arg k = pi/4``."""
        return self.kind != "gaussian"

    @property
    def ray(self) -> complex:
        """Unit direction along which the one-dimensional transforms are continued."""
        return _GAUSSIAN_RAY if self.kind == "gaussian" else _RAY

    def evaluate(self, k):
        """``rho(k)`` for real or complex ``k``, without argument checks."""
        if self.kind == "gaussian":
            return np.exp(-0.25 * (k * self.a) ** 2)
        if self.kind == "lorentzian-squared":
            return 1.0 / (1.0 + (k * self.a) ** 2) ** 2
        return np.ones_like(k)

    def __call__(self, k):
        return form_factor_value(self, k)

    def describe(self):
        return "point" if self.kind == "point" else f"{self.kind}:{self.a:g}"


def form_factor_value(ff: FormFactor, k):
    """``rho(k)`` for ``k >= 0``; equal to 1 at ``k = 0`` for every kind."""
    require_nonnegative(k, "k")
    out = ff.evaluate(np.asarray(k, dtype=float))
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class Polarizability:
    """Polarizability ``alpha(k)``: ``static`` (``alpha0``) or ``rational``
    (``alpha0 k0^2 / (k0^2 + k^2)``)."""

    kind: str = "static"
    alpha0: float = 1.0
    k0: Optional[float] = None

    def __post_init__(self):
        if self.kind not in POLARIZABILITY_KINDS:
            raise ValueError(f"unknown polarizability {self.kind!r}; expected static or rational")
        require_positive(self.alpha0, "alpha0")
        if self.kind == "rational":
            if self.k0 is None:
                raise DomainError("rational polarizability needs k0")
            require_positive(self.k0, "k0")
        elif self.k0 is not None:
            raise DomainError("static polarizability takes no k0")

    @property
    def decay_exponent(self) -> float:
        return 0.0 if self.kind == "static" else 2.0

    def evaluate(self, k):
        if self.kind == "static":
            return self.alpha0 * np.ones_like(k)
        return self.alpha0 * self.k0**2 / (self.k0**2 + k * k)

    def __call__(self, k):
        require_nonnegative(k, "k")
        out = self.evaluate(np.asarray(k, dtype=float))
        return out if np.ndim(out) else float(out)

    def describe(self):
        if self.kind == "static":
            return f"static:{self.alpha0:g}"
        return f"rational:{self.alpha0:g}:{self.k0:g}"


@dataclass(frozen=True)
class ExtendedSource:
    """Form factor plus polarizability, optionally with an exponential cutoff.

    ``cutoff`` multiplies every wavenumber factor by ``exp(-cutoff k)``; it is
    what makes a point form factor usable here. Without it the combined
    large-k decay exponent of ``alpha(k) rho(k)`` must exceed 2, otherwise
    :class:`InadmissibleSourceError` is raised.
    """

    form_factor: FormFactor
    polarizability: Polarizability = field(default_factory=Polarizability)
    cutoff: float = 0.0

    def __post_init__(self):
        require_nonnegative(self.cutoff, "cutoff")
        if not (self.decay_exponent > 2 or self.cutoff > 0):
            raise InadmissibleSourceError(
                f"inadmissible source: alpha(k) rho(k) decays like k^-{self.decay_exponent:g}, "
                "need an exponent above 2 or a positive cutoff")

    @property
    def decay_exponent(self) -> float:
        return self.form_factor.decay_exponent + self.polarizability.decay_exponent

    @property
    def length_scale(self) -> float:
        """Size below which the source structure matters."""
        return max(self.form_factor.a, self.cutoff)

    @property
    def continuable(self) -> bool:
        return self.form_factor.continuable

    def weights(self, k):
        """``(alpha rho, rho)`` times the cutoff factor, for real or complex ``k``."""
        rho = self.form_factor.evaluate(k)
        if self.cutoff > 0:
            rho = rho * np.exp(-self.cutoff * k)
        return self.polarizability.evaluate(k) * rho, rho

    def describe(self):
        out = f"{self.form_factor.describe()} alpha={self.polarizability.describe()}"
        return out + (f" cutoff={self.cutoff:g}" if self.cutoff > 0 else "")


# ---------------------------------------------------------------------------
# eta route

def _inner_config(config, factor=50.0):
    return config.inner(factor).replace(relative_to_magnitude=True,
                                        max_evaluations=min(config.max_evaluations, 200_000))


def _stack_real(source, k, eta, R):
    """Real-axis transform integrands, shape ``(nk, n_eta, nR, 6)``."""
    kk = k[:, None, None]
    base = kk**3 * np.exp(-eta[None, :, None] * kk)
    f, g = source.weights(kk)
    if R is None:
        a0 = np.ones_like(base)
        a1 = a0 / 3.0
        c = np.zeros_like(base)
    else:
        x = kk * R[None, None, :]
        a0, a1, c = kernels.sph_j0(x), kernels.j1_over_x(x), kernels.sph_j1(x)
        base = base * np.ones_like(x)
    fb, gb = f * base, g * base
    return np.stack([fb * a0, fb * a1, fb * c, gb * a0, gb * a1, gb * c], axis=-1)


def _stack_ray(source, t, eta, R):
    """Transform integrands on the ray ``k R = _SPLIT + t omega``; real part taken."""
    omega = source.form_factor.ray
    x = _SPLIT + t[:, None, None] * omega
    k = x / R[None, None, :]
    damp = np.exp(-eta[None, :, None] * k) * omega / R[None, None, :]
    f, g = source.weights(k)
    h0 = _contour.k3_h0(k, R)
    h1x = _contour.k3_h1_over_x(k, R)
    h1 = _contour.k3_h1(k, R)
    fd, gd = f * damp, g * damp
    return np.real(np.stack([fd * h0, fd * h1x, fd * h1, gd * h0, gd * h1x, gd * h1], axis=-1))


def _transforms(source, eta, R, config):
    """Damped Bessel transforms of both weights at every ``(eta, R)`` pair.

    Returns ``(values, errors)`` of shape ``(n_eta, nR, 6)``; ``R`` is either
    ``None`` (the source centre) or an array of positive distances.
    """
    k_scale = 1.0 / source.length_scale
    if R is None:
        res = integrate_semi_infinite(lambda k: _stack_real(source, k, eta, R), config,
                                      scale=2.0 * k_scale)
        values, errors = res.value, res.abs_error_estimate
    else:
        # real segment k R in [0, _SPLIT] (substituting u = k R), then the ray
        def segment(u):
            k = u[:, None] / R[None, :]
            return _stack_real_scaled(source, k, eta, R)

        near = integrate(segment, 0.0, _SPLIT, config)
        far = integrate_semi_infinite(lambda t: _stack_ray(source, t, eta, R), config)
        values = near.value + far.value
        errors = near.abs_error_estimate + far.abs_error_estimate
        res = QuadratureResult(values, errors, near.evaluations + far.evaluations,
                               near.converged and far.converged,
                               near.message or far.message)
    if not np.all(np.isfinite(values)):
        raise ConvergenceError(f"wavenumber transform failed: {res.message}", res)
    return values, errors, res.evaluations


def _stack_real_scaled(source, k, eta, R):
    # k has shape (nu, nR) with k = u / R; dk = du / R
    kk = k[:, None, :]
    x = kk * R[None, None, :]
    base = kk**3 * np.exp(-eta[None, :, None] * kk) / R[None, None, :]
    f, g = source.weights(kk)
    a0, a1, c = kernels.sph_j0(x), kernels.j1_over_x(x), kernels.sph_j1(x)
    fb, gb = f * base, g * base
    return np.stack([fb * a0, fb * a1, fb * c, gb * a0, gb * a1, gb * c], axis=-1)


def _eta_products(T, E):
    """Electric and magnetic eta-integrands with first-order error propagation."""
    Af, Bf, Cf, Ag, Bg, Cg = np.moveaxis(T, -1, 0)
    eAf, eBf, eCf, eAg, eBg, eCg = np.moveaxis(E, -1, 0)
    el = ELECTRIC_PREFACTOR * (Af * Ag - Af * Bg - Bf * Ag + 3.0 * Bf * Bg)
    mag = -2.0 * MAGNETIC_PREFACTOR * Cf * Cg
    el_err = ELECTRIC_PREFACTOR * (eAf * (abs(Ag) + abs(Bg)) + eAg * (abs(Af) + abs(Bf))
                                   + eBf * (abs(Ag) + 3 * abs(Bg)) + eBg * (abs(Af) + 3 * abs(Bf)))
    mag_err = 2.0 * MAGNETIC_PREFACTOR * (eCf * abs(Cg) + eCg * abs(Cf))
    return np.stack([el, mag], axis=-1), np.stack([el_err, mag_err], axis=-1)


def _eta_route(source, R, config):
    """Both components at every distance in ``R`` (all positive) or at the centre (``None``).

    Returns a :class:`QuadratureResult` whose value has shape ``(nR, 2)``.
    """
    inner_cfg = _inner_config(config)
    evaluations = 0

    def per_eta(eta):
        nonlocal evaluations
        T, E, n = _transforms(source, eta, R, inner_cfg)
        evaluations += n
        return _eta_products(T, E)

    def per_v(v):
        # eta = v^2 smooths the logarithmic growth of the transforms at eta -> 0
        values, errors = per_eta(v * v)
        jac = (2.0 * v)[:, None, None]
        return values * jac, errors * jac

    length = source.length_scale
    if R is not None:
        length = max(length, float(np.median(R)))
    try:
        res = integrate_semi_infinite(per_v, config, scale=math.sqrt(length), with_errors=True)
    except ConvergenceError as exc:
        return QuadratureResult(np.nan, np.inf, evaluations, False, str(exc))
    return QuadratureResult(res.value, res.abs_error_estimate, res.evaluations + evaluations,
                            res.converged, res.message)


# ---------------------------------------------------------------------------
# direct double-k route

def _double_route(source, R, component, config):
    # The Hankel splitting cancels like (L/R)^3 and is used from R = L/2 on.
    # Inside that the real quadrant is used; for algebraic form factors it is
    # slow at 0 < R < L/2 (long oscillating tails), fast at R = 0.
    if R > 0 and R >= _ROTATE_FROM * source.length_scale and source.continuable:
        terms = _contour.bessel_terms(component, R, lambda k: source.weights(k)[0],
                                      lambda k: source.weights(k)[1])
        res = _contour.rotated_quadrant(terms, _RAY, R * _RAY.imag, config)
    else:
        kernel = kernels.kernel_QE if component == "electric" else kernels.kernel_QM
        factor = 1.0 if component == "electric" else 0.5

        def f(k, kp):
            fk, _ = source.weights(k)
            _, gk = source.weights(kp)
            return factor * fk * gk * kernel(k, kp, R) * (k * kp) ** 3 / (k + kp)

        res = _contour.polar_quadrant(f, 2.0 / source.length_scale, config)
    pref = ELECTRIC_PREFACTOR if component == "electric" else -2.0 * MAGNETIC_PREFACTOR
    return QuadratureResult(pref * res.value, abs(pref) * res.abs_error_estimate,
                            res.evaluations, res.converged, res.message)


# ---------------------------------------------------------------------------
# public evaluators

_COMPONENT_INDEX = {"electric": 0, "magnetic": 1}


def _pick(res, component, row=0):
    value = np.asarray(res.value).reshape(-1, 2)[row] if np.ndim(res.value) else np.array([np.nan] * 2)
    error = (np.asarray(res.abs_error_estimate).reshape(-1, 2)[row]
             if np.ndim(res.abs_error_estimate) else np.array([np.inf] * 2))
    if component == "total":
        v, e = float(value.sum()), float(error.sum())
    else:
        i = _COMPONENT_INDEX[component]
        v, e = float(value[i]), float(error[i])
    return QuadratureResult(v, e, res.evaluations, res.converged, res.message)


def extended_density(source: ExtendedSource, R, component="electric", *, route="eta",
                     config: QuadratureConfig = None, full_output=False):
    """Energy density of ``component`` at distance ``R >= 0`` from the source centre.

    Parameters
    ----------
    source : ExtendedSource
    R : float
    component : {"electric", "magnetic", "total"}
    route : {"eta", "double"}
        Evaluation route, see the module docstring.
    config : QuadratureConfig, optional
    full_output : bool
        Return the :class:`QuadratureResult` instead of raising on failure.

    Returns
    -------
    float or QuadratureResult
    """
    require_nonnegative(R, "R")
    check_component(component, ("electric", "magnetic", "total"))
    config = config or DENSITY_CONFIG
    R = float(R)
    if route == "eta":
        res = _pick(_eta_route(source, np.array([R]) if R > 0 else None, config), component)
    elif route == "double":
        if component == "total":
            parts = [_double_route(source, R, c, config) for c in ("electric", "magnetic")]
            res = QuadratureResult(parts[0].value + parts[1].value,
                                   parts[0].abs_error_estimate + parts[1].abs_error_estimate,
                                   parts[0].evaluations + parts[1].evaluations,
                                   parts[0].converged and parts[1].converged,
                                   parts[0].message or parts[1].message)
        elif component == "magnetic" and R == 0:
            res = QuadratureResult(0.0, 0.0, 1, True)
        else:
            res = _double_route(source, R, component, config)
    else:
        raise ValueError(f"unknown route {route!r}; expected 'eta' or 'double'")
    if full_output:
        return res
    return res.require(f"{component} density at R={R:g}").value


def extended_profile(source: ExtendedSource, R_values: Sequence[float], config=None):
    """Electric and magnetic densities on a grid, as an array of shape ``(n, 2)``.

    Raises :class:`ConvergenceError` naming the first distance that failed.
    """
    config = config or DENSITY_CONFIG
    out = np.empty((len(R_values), 2))
    for i, R in enumerate(R_values):
        require_nonnegative(R, "R")
        res = _eta_route(source, np.array([float(R)]) if R > 0 else None, config)
        res.require(f"densities at R={float(R):g}")
        out[i] = np.asarray(res.value).reshape(2)
    return out


def point_source_density(R, component="electric", *, polarizability: Polarizability = None,
                         cutoffs=(0.2, 0.1, 0.05, 0.025), config=None):
    """Density of a point form factor, through an auxiliary cutoff sent to zero.

    Each cutoff ``gamma`` gives an admissible source whose density is
    evaluated like any other extended source; the sequence is extrapolated
    with the odd-power corrections of the cutoff expansion.

    Returns
    -------
    ExtrapolationResult
    """
    require_positive(R, "R")
    check_component(component, ("electric", "magnetic", "total"))
    cutoffs = tuple(float(g) for g in cutoffs)
    if len(cutoffs) < 2:
        raise ValueError("need at least 2 cutoffs")
    polarizability = polarizability or Polarizability()
    samples = [(g, extended_density(ExtendedSource(FormFactor("point"), polarizability, g), R,
                                    component, config=config)) for g in cutoffs]
    powers = GAMMA_POWERS["magnetic" if component == "magnetic" else "electric"]
    return extrapolate_to_zero(samples, min(3, len(samples) - 1), powers)


# ---------------------------------------------------------------------------
# global energy

@dataclass(frozen=True)
class ExtendedGlobalReport:
    """Space-integrated densities of an extended source after ``eps -> 0``.

    ``rows`` holds ``(eps, electric, magnetic, total)`` for each damping
    value; the totals are the extrapolated limits with error estimates that
    combine quadrature and extrapolation errors.
    """

    electric_total: float
    magnetic_total: float
    total: float
    electric_error: float
    magnetic_error: float
    total_error: float
    rows: Tuple[Tuple[float, float, float, float], ...]
    converged: bool
    message: str = ""

    @property
    def relative_total(self):
        return abs(self.total) / abs(self.electric_total)

    def passed(self, tolerance=1e-6):
        """Total vanishes within ``tolerance`` times the electric-only total."""
        return self.converged and self.relative_total <= tolerance


def extended_global_energy(source: ExtendedSource, *, eps_sequence=(0.04, 0.02, 0.01, 0.005),
                           R_max=math.inf, config: QuadratureConfig = None):
    """``int 4 pi R^2 exp(-eps R) u(R) dR`` for each ``eps``, extrapolated to ``eps = 0``.

    Every ``eps`` is integrated on one shared set of radial nodes, so each
    density evaluation is reused across the whole sequence.
    """
    eps = [float(e) for e in eps_sequence]
    if len(eps) < 2:
        raise ValueError("need at least 2 damping values")
    for e in eps:
        require_positive(e, "eps")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("damping values must be strictly decreasing")
    if not R_max > 0:
        raise DomainError("R_max must be positive")
    config = config or QuadratureConfig(abs_tol=1e-13, rel_tol=1e-9)
    eta_cfg = config.inner(50.0)
    eps_arr = np.array(eps)
    evaluations = 0

    def radial(R):
        nonlocal evaluations
        res = _eta_route(source, R, eta_cfg)
        evaluations += res.evaluations
        if not np.all(np.isfinite(res.value)):
            raise ConvergenceError(f"densities failed near R={R[0]:.6g}: {res.message}", res)
        w = (4 * math.pi * R * R)[:, None] * np.exp(-np.outer(R, eps_arr))
        u, e = np.asarray(res.value), np.asarray(res.abs_error_estimate)
        values = w[:, :, None] * u[:, None, :]
        errors = w[:, :, None] * e[:, None, :]
        return values, errors

    try:
        if math.isinf(R_max):
            res = integrate_semi_infinite(radial, config, scale=source.length_scale,
                                          with_errors=True)
        else:
            res = integrate(radial, 0.0, R_max, config, with_errors=True)
    except ConvergenceError as exc:
        nan = math.nan
        return ExtendedGlobalReport(nan, nan, nan, math.inf, math.inf, math.inf, (), False, str(exc))
    vals = np.asarray(res.value)
    errs = np.asarray(res.abs_error_estimate)
    rows = tuple((e, float(v[0]), float(v[1]), float(v[0] + v[1])) for e, v in zip(eps, vals))
    order = min(3, len(eps) - 1)

    def limit(column, quad_err):
        ext = extrapolate_to_zero([(row[0], row[column]) for row in rows], order)
        return ext.value, ext.error_estimate + float(np.max(quad_err))

    el, el_err = limit(1, errs[:, 0])
    mag, mag_err = limit(2, errs[:, 1])
    tot, tot_err = limit(3, errs[:, 0] + errs[:, 1])
    return ExtendedGlobalReport(el, mag, tot, el_err, mag_err, tot_err, rows, res.converged,
                                res.message)


# ---------------------------------------------------------------------------
# kernel identity behind the cancellation

@dataclass(frozen=True)
class KernelCancellation:
    """Damped radial integral of the kernel combination, extrapolated to zero damping."""

    value: float
    error_estimate: float
    samples: Tuple[Tuple[float, float], ...]
    quadrature_error: float
    extrapolation: ExtrapolationResult

    def __float__(self):
        return self.value


def kernel_radial_cancellation(k, k_prime, *, eps_sequence=(0.008, 0.004, 0.002, 0.001),
                               electric_weight=2.0, config: QuadratureConfig = None):
    """``lim_{eps->0} int_0^inf 4 pi r^2 exp(-eps r) (w Q_E - Q_M)(k, k', r) dr``.

    The default weight ``w = 2`` matches the relative normalisation of the
    two densities; with it the non-decaying parts of the two kernels cancel
    and the limit is zero. The damped integrals are summed half-period by
    half-period; they behave like ``c eps`` for small ``eps`` and are
    extrapolated polynomially. For any other weight they grow without bound
    as ``eps -> 0`` and the extrapolated value is meaningless; the samples
    still show the growth.

    Raises :class:`ConvergenceError` if a damped integral does not converge.
    """
    require_positive(k, "k")
    require_positive(k_prime, "k_prime")
    eps = [float(e) for e in eps_sequence]
    if len(eps) < 2:
        raise ValueError("need at least 2 damping values")
    for e in eps:
        require_positive(e, "eps")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("damping values must be strictly decreasing")
    config = config or QuadratureConfig(abs_tol=1e-9, rel_tol=1e-10, max_evaluations=20_000_000)
    half_period = math.pi / (k + k_prime)
    samples = []
    quad_err = 0.0
    for e in eps:
        def f(r, e=e):
            return (4 * math.pi * r * r * np.exp(-e * r)
                    * (electric_weight * kernels.kernel_QE(k, k_prime, r)
                       - kernels.kernel_QM(k, k_prime, r)))

        res = integrate_semi_infinite(f, config, half_period=half_period)
        res.require(f"damped kernel integral at eps={e:g}")
        samples.append((e, float(res.value)))
        quad_err = max(quad_err, float(res.abs_error_estimate))
    ext = extrapolate_to_zero(samples, min(3, len(samples) - 1))
    return KernelCancellation(ext.value, ext.error_estimate + quad_err, tuple(samples), quad_err, ext)


# ---------------------------------------------------------------------------
# point-like limit

@dataclass(frozen=True)
class PointLimitStudy:
    """Densities at fixed ``R`` for shrinking source sizes and their ``a -> 0`` limit."""

    R: float
    component: str
    sizes: Tuple[float, ...]
    values: Tuple[float, ...]
    limit: ExtrapolationResult
    target: float
    empirical_order: Optional[float]

    @property
    def deviation(self):
        return self.limit.value - self.target


def point_limit_study(R, sizes, component="electric", *, form="gaussian",
                      polarizability: Polarizability = None, config=None, powers=(2, 4, 6)):
    """Shrink the source at fixed ``R > 0`` and extrapolate to ``a = 0``.

    The corrections for a smooth normalised density are even in ``a``, hence
    the default ``powers``. ``empirical_order`` is estimated from the last
    three sizes as ``log(d1/d2)/log(a1/a2)`` of successive differences.
    """
    require_positive(R, "R")
    check_component(component, ("electric", "magnetic", "total"))
    sizes = tuple(float(a) for a in sizes)
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes")
    for a in sizes:
        require_positive(a, "a")
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly decreasing")
    polarizability = polarizability or Polarizability()
    values = tuple(extended_density(ExtendedSource(FormFactor(form, a), polarizability), R,
                                    component, config=config) for a in sizes)
    order = min(len(powers), len(sizes) - 1)
    limit = extrapolate_to_zero(list(zip(sizes, values)), order, powers)
    d1, d2 = values[-2] - values[-3], values[-1] - values[-2]
    a1, a2 = sizes[-3] / sizes[-2], sizes[-2] / sizes[-1]
    empirical = None
    if d1 != 0 and d2 != 0 and a1 == a2:
        empirical = math.log(abs(d1 / d2)) / math.log(a1)
    alpha0 = polarizability.alpha0
    return PointLimitStudy(float(R), component, sizes, values, limit,
                           alpha0 * float(closed_density(R, component)), empirical)


__all__ = [
    "ExtendedGlobalReport",
    "ExtendedSource",
    "FORM_FACTOR_KINDS",
    "FormFactor",
    "InadmissibleSourceError",
    "KernelCancellation",
    "POLARIZABILITY_KINDS",
    "PointLimitStudy",
    "Polarizability",
    "UNITS",
    "extended_density",
    "extended_global_energy",
    "extended_profile",
    "form_factor_value",
    "kernel_radial_cancellation",
    "point_limit_study",
    "point_source_density",
]
