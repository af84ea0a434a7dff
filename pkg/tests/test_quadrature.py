import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacuum_selfenergy import kernels
from vacuum_selfenergy.quadrature import (ConvergenceError, QuadratureConfig, QuadratureResult,
                                          extrapolate_to_zero, gk21_panels, integrate,
                                          integrate_double_k, integrate_oscillatory,
                                          integrate_semi_infinite, log_points, wynn_epsilon)
from vacuum_selfenergy.quadrature.adaptive import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES


# ---------------------------------------------------------------------------
# the rule itself

@pytest.mark.parametrize("degree", range(32))
def test_kronrod_exact_through_degree_31(degree):
    kron, _, _, _ = gk21_panels(lambda x: x**degree, np.array([0.0]), np.array([1.0]))
    assert kron[0] == pytest.approx(1.0 / (degree + 1), rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("degree", range(20))
def test_gauss_weights_exact_through_degree_19(degree):
    exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
    assert np.dot(GAUSS_WEIGHTS, NODES**degree) == pytest.approx(exact, abs=1e-14)


def test_rule_weights_sum_to_interval_length():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.all(np.diff(NODES) > 0)


def test_gauss_rule_not_exact_at_degree_20():
    exact = 2.0 / 21
    assert abs(np.dot(GAUSS_WEIGHTS, NODES**20) - exact) > 1e-8


# ---------------------------------------------------------------------------
# finite intervals

def test_integrate_smooth():
    res = integrate(np.sin, 0.0, math.pi)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-13)
    assert res.evaluations > 0


def test_integrate_reversed_limits_flip_sign():
    assert integrate(np.exp, 1.0, 0.0).value == pytest.approx(-(math.e - 1), rel=1e-13)


def test_integrate_empty_interval():
    res = integrate(np.exp, 2.0, 2.0)
    assert res.value == 0.0 and res.converged


def test_integrate_endpoint_singularity():
    res = integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_integrate_vector_valued():
    res = integrate(lambda x: np.stack([x, x**2, np.cos(x)], axis=-1), 0.0, 1.0)
    assert np.allclose(res.value, [0.5, 1 / 3, math.sin(1.0)], rtol=1e-13)
    assert res.abs_error_estimate.shape == (3,)


def test_integrate_breakpoints():
    res = integrate(np.abs, -1.0, 2.0, points=[0.0])
    assert res.value == pytest.approx(2.5, rel=1e-14)


def test_integrate_rejects_infinite_limits():
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, math.inf)


def test_budget_exhaustion_is_reported():
    res = integrate(lambda x: np.sin(1 / x), 1e-6, 1.0, QuadratureConfig(max_evaluations=200))
    assert not res.converged
    assert "budget" in res.message
    with pytest.raises(ConvergenceError) as info:
        res.require("test integral")
    assert info.value.result is res


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_integrand_is_reported():
    res = integrate(lambda x: 1 / (x - 0.5), 0.0, 1.0)
    assert not res.converged
    assert "non-finite" in res.message


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=-1)
    with pytest.raises(ValueError):
        QuadratureConfig(max_evaluations=5)
    with pytest.raises(ValueError):
        QuadratureConfig(subdivision_limit=0)


def test_config_inner_and_tolerance():
    cfg = QuadratureConfig(abs_tol=1e-10, rel_tol=1e-8)
    inner = cfg.inner(50)
    assert inner.abs_tol == pytest.approx(2e-12) and inner.rel_tol == pytest.approx(2e-10)
    assert cfg.tolerance(1.0) == pytest.approx(1e-8)
    mag = cfg.replace(relative_to_magnitude=True)
    assert mag.tolerance(0.0, magnitude=100.0) == pytest.approx(1e-6)


def test_converged_results_meet_their_tolerance():
    cfg = QuadratureConfig(abs_tol=1e-11, rel_tol=1e-9)
    for f, a, b in [(np.exp, 0, 3), (lambda x: np.sqrt(x), 0, 2), (np.cos, 0, 30)]:
        res = integrate(f, a, b, cfg)
        assert res.converged
        assert res.abs_error_estimate <= cfg.tolerance(res.value)


# ---------------------------------------------------------------------------
# semi-infinite ranges

def test_semi_infinite_exponential():
    res = integrate_semi_infinite(lambda x: np.exp(-x))
    assert res.converged
    assert res.value == pytest.approx(1.0, rel=1e-12)


def test_semi_infinite_laplace_k3_j1():
    res = integrate_semi_infinite(lambda k: k**3 * kernels.sph_j1(k) * np.exp(-k))
    assert res.value == pytest.approx(1.0, rel=1e-10)


def test_semi_infinite_eta_integrand():
    # 23 pi / 64, also confirmed with an independent 30-digit quadrature
    res = integrate_semi_infinite(lambda e: (3 - 2 * e**2 + 3 * e**4) / (1 + e**2) ** 6)
    assert res.value == pytest.approx(23 * math.pi / 64, rel=1e-12)
    assert res.value == pytest.approx(1.1290098598838319451, rel=1e-12)


def test_semi_infinite_lower_limit_and_scale():
    res = integrate_semi_infinite(lambda x: 1 / x**2, a=2.0, scale=5.0)
    assert res.value == pytest.approx(0.5, rel=1e-12)


def test_semi_infinite_with_breakpoints():
    f = lambda x: np.exp(-((x - 300.0) ** 2))
    res = integrate_semi_infinite(f, points=log_points(300.0, 2, 4), scale=300.0)
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_log_points_are_geometric():
    pts = log_points(2.0, decades=2)
    assert pts[0] == pytest.approx(0.02) and pts[-1] == pytest.approx(200.0)
    assert np.allclose(np.diff(np.log10(pts)), 1.0)


def test_oscillatory_damped():
    # int_0^inf sin(x) e^{-x/10} dx = 1 / (1 + 1/100) * ... = 10^2/(1 + 10^2)
    res = integrate_semi_infinite(lambda x: np.sin(x) * np.exp(-0.1 * x), half_period=math.pi)
    assert res.converged
    assert res.value == pytest.approx(1 / 1.01, rel=1e-10)


def test_oscillatory_conditionally_convergent():
    res = integrate_oscillatory(lambda x: np.sin(x) / x, 1e-300, math.pi,
                                QuadratureConfig(abs_tol=1e-10, rel_tol=1e-10))
    assert res.converged
    assert res.value == pytest.approx(math.pi / 2, rel=1e-9)


def test_oscillatory_rejects_bad_period():
    with pytest.raises(ValueError):
        integrate_oscillatory(np.sin, 0.0, 0.0)


def test_oscillatory_budget_reported():
    res = integrate_oscillatory(lambda x: np.sin(x) * np.sqrt(x), 0.0, math.pi,
                                QuadratureConfig(max_evaluations=2000))
    assert not res.converged


# ---------------------------------------------------------------------------
# nested integrals

def test_double_k_product():
    res = integrate_double_k(lambda k, kp: np.exp(-k - kp))
    assert res.converged
    assert res.value == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("gamma, expected", [
    (1.0, 0.24111345261220120849),
    (0.5, None),
])
def test_double_k_matches_regularized_I(gamma, expected):
    from vacuum_selfenergy.pointlike import regularized_I

    def f(k, kp):
        return (kernels.sph_j1(k) * kernels.sph_j1(kp) * (k * kp) ** 3
                * np.exp(-gamma * (k + kp)) / (k + kp))

    res = integrate_double_k(f, QuadratureConfig(abs_tol=1e-9, rel_tol=1e-9), scale=1 / gamma)
    assert res.converged
    target = expected if expected is not None else regularized_I(1.0, gamma)
    assert res.value == pytest.approx(target, rel=1e-9)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_double_k_reports_inner_failure():
    res = integrate_double_k(lambda k, kp: np.exp(-k - kp) / (kp - 1.0 + 0 * k))
    assert not res.converged


# ---------------------------------------------------------------------------
# acceleration and extrapolation

def test_wynn_alternating_series():
    s = np.cumsum([(-1) ** k / (2 * k + 1) for k in range(20)])
    assert wynn_epsilon(s) == pytest.approx(math.pi / 4, rel=1e-12)


def test_wynn_constant_sequence():
    assert wynn_epsilon([2.0, 2.0, 2.0]) == 2.0
    with pytest.raises(ValueError):
        wynn_epsilon([])


def test_extrapolate_polynomial_exact():
    res = extrapolate_to_zero([(h, 3 + h * h) for h in (0.4, 0.2, 0.1)], 2)
    assert res.value == pytest.approx(3.0, abs=1e-10)


def test_extrapolate_known_powers():
    samples = [(h, 1 + 2 * h + 5 * h**3) for h in (0.4, 0.2, 0.1)]
    res = extrapolate_to_zero(samples, 2, powers=(1, 3))
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.powers == (1.0, 3.0)


def test_extrapolate_error_estimate_is_difference_of_orders():
    samples = [(h, math.exp(h)) for h in (0.4, 0.2, 0.1, 0.05)]
    res = extrapolate_to_zero(samples, 3)
    assert abs(res.value - 1.0) <= 10 * res.error_estimate
    assert abs(res.value - 1.0) < 5e-5


@pytest.mark.parametrize("samples, order", [
    ([(0.1, 1.0), (0.2, 1.0), (0.05, 1.0)], 1),    # not decreasing
    ([(0.2, 1.0), (0.1, 1.0)], 2),                 # too few
    ([(0.2, 1.0), (-0.1, 1.0)], 1),                # non-positive h
    ([(0.2, 1.0), (0.1, math.nan)], 1),            # non-finite value
    ([(0.2, 1.0), (0.1, 1.0)], 0),                 # order below 1
])
def test_extrapolate_rejects_bad_input(samples, order):
    with pytest.raises(ValueError):
        extrapolate_to_zero(samples, order)


def test_extrapolate_rejects_missing_powers():
    with pytest.raises(ValueError):
        extrapolate_to_zero([(0.4, 1), (0.2, 1), (0.1, 1)], 2, powers=(1,))


# ---------------------------------------------------------------------------
# properties

@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.0, 5.0))
def test_semi_infinite_exponential_property(rate, a):
    res = integrate_semi_infinite(lambda x: np.exp(-rate * x), a=a, scale=1 / rate)
    exact = math.exp(-rate * a) / rate
    assert res.converged
    assert abs(res.value - exact) <= max(10 * res.abs_error_estimate, 1e-13 * exact)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(0.1, 4.0))
def test_polynomial_integration_property(coeffs, b):
    poly = np.polynomial.Polynomial(coeffs)
    res = integrate(poly, 0.0, b)
    exact = poly.integ()(b) - poly.integ()(0.0)
    assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_extrapolation_reproduces_quadratics(c0, c1, c2):
    samples = [(h, c0 + c1 * h + c2 * h * h) for h in (0.5, 0.25, 0.125)]
    assert extrapolate_to_zero(samples, 2).value == pytest.approx(c0, abs=1e-11)


def test_result_is_float_convertible():
    assert float(QuadratureResult(1.5, 0.0, 1, True)) == 1.5


def test_determinism():
    f = lambda x: np.cos(3 * x) * np.exp(-x)
    a = integrate_semi_infinite(f)
    b = integrate_semi_infinite(f)
    assert a.value == b.value and a.abs_error_estimate == b.abs_error_estimate
