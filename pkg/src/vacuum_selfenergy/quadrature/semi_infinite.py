"""Integration over ``[a, inf)``: rational map, oscillatory summation, nesting."""
from __future__ import annotations

import math

import numpy as np

from ._types import QuadratureConfig, QuadratureResult
from .acceleration import wynn_epsilon
from .adaptive import gk21_panels, integrate


def _mapped(f, a, scale, with_errors):
    # x = a + scale * t / (1 - t) sends [0, 1) onto [a, inf).
    # Nodes that round to t = 1 sit at infinity, where an integrable f has
    # no weight; they are dropped rather than evaluated.
    def g(t):
        one_minus = 1.0 - t
        live = one_minus > 0
        if not np.all(live):
            return _drop_endpoint(g, t, live, with_errors)
        x = a + scale * t / one_minus
        jac = scale / one_minus**2
        out = f(x)
        if with_errors:
            values, errors = out
            values = np.asarray(values, dtype=float)
            shape = (-1,) + (1,) * (values.ndim - 1)
            j = jac.reshape(shape)
            return values * j, np.asarray(errors, dtype=float) * j
        values = np.asarray(out, dtype=float)
        return values * jac.reshape((-1,) + (1,) * (values.ndim - 1))
    return g


def _drop_endpoint(g, t, live, with_errors):
    inner = g(t[live]) if np.any(live) else None
    if inner is None:
        raise FloatingPointError("all nodes at infinity")
    parts = inner if with_errors else (inner,)
    full = []
    for part in parts:
        part = np.asarray(part, dtype=float)
        out = np.zeros((t.size,) + part.shape[1:])
        out[live] = part
        full.append(out)
    return tuple(full) if with_errors else full[0]


def log_points(scale, decades=4, per_decade=1):
    """Log-spaced breakpoints ``scale * 10**k`` around ``scale``.

    Useful as ``points=`` for integrands peaked away from the origin.
    """
    k = np.arange(-decades, decades + 1e-9, 1.0 / per_decade)
    return list(scale * 10.0**k)


def integrate_semi_infinite(f, config=None, *, a=0.0, scale=1.0, points=None,
                            half_period=None, with_errors=False):
    """Integrate ``f`` over ``[a, inf)``.

    Without ``half_period`` the range is mapped onto ``[0, 1)`` by
    ``x = a + scale * t / (1 - t)`` and integrated adaptively; ``scale``
    should be the length over which ``f`` decays. ``points`` are breakpoints
    in ``x`` for the initial subdivision (see :func:`log_points`).

    With ``half_period`` the integrand is treated as oscillatory: it is
    summed interval by interval and the partial sums are accelerated, see
    :func:`integrate_oscillatory`.
    """
    config = config or QuadratureConfig()
    if half_period is not None:
        return integrate_oscillatory(f, a, half_period, config, with_errors=with_errors)
    tpoints = None
    if points is not None:
        tpoints = [(p - a) / (scale + (p - a)) for p in points if p > a]
    return integrate(_mapped(f, float(a), float(scale), with_errors), 0.0, 1.0, config,
                     points=tpoints, with_errors=with_errors)


def integrate_oscillatory(f, a, half_period, config=None, *, min_intervals=12, chunk=32,
                          with_errors=False):
    """Integrate an oscillatory ``f`` over ``[a, inf)``.

    The range is cut into intervals of length ``half_period`` (ideally the
    spacing of zeros of the oscillating factor). Intervals are integrated in
    vectorised chunks, falling back to adaptive subdivision where the single
    rule is not accurate enough, and the sequence of partial sums is
    accelerated with the epsilon algorithm. Summation stops as soon as either
    the accelerated limit is stable or the tail has become negligible.
    """
    config = config or QuadratureConfig()
    h = float(half_period)
    if not h > 0:
        raise ValueError("half_period must be positive")
    partial = []
    running = 0.0
    err_sum = 0.0
    evaluations = 0
    n = 0
    previous = None
    last_size = math.inf
    while True:
        lo = a + h * np.arange(n, n + chunk)
        hi = lo + h
        kron, err, resabs, bad = gk21_panels(f, lo, hi, with_errors)
        evaluations += 21 * chunk
        if np.any(bad):
            return QuadratureResult(np.nan, np.inf, evaluations, False,
                                    f"non-finite integrand beyond x={lo[0]:.6g}")
        # per-interval budget: a small share of the tolerance we are heading for
        target = max(config.abs_tol, config.rel_tol * abs(running)) / 20.0
        # never ask a single interval for more than its round-off allows
        floor = 100 * np.finfo(float).eps * resabs
        for i in np.nonzero(np.any((err > np.maximum(target, floor)).reshape(chunk, -1), axis=1))[0]:
            sub_tol = max(target, float(np.max(floor[i])))
            sub = integrate(f, lo[i], hi[i],
                            config.replace(abs_tol=sub_tol, rel_tol=config.rel_tol / 20),
                            with_errors=with_errors)
            evaluations += sub.evaluations
            kron[i], err[i] = sub.value, sub.abs_error_estimate
        for value in kron:
            running += value
            partial.append(running)
        err_sum += float(np.sum(err))
        n += chunk

        tol = config.tolerance(running)
        tail = float(np.sum(np.abs(resabs[-chunk // 4:])))
        if n >= min_intervals and tail <= 1e-3 * tol:
            # damped: the remaining terms are negligible, no extrapolation needed
            return QuadratureResult(running, err_sum + tail, evaluations, err_sum + tail <= tol)
        estimate = wynn_epsilon(partial[-40:])
        # growing terms mean a divergent integral; its accelerated value
        # would be a summation artefact
        size = float(np.mean(np.abs(kron)))
        shrinking = size <= last_size
        last_size = size
        if previous is not None and n >= min_intervals and shrinking:
            accel_err = abs(estimate - previous)
            tol = config.tolerance(estimate)
            if accel_err + err_sum <= tol:
                return QuadratureResult(estimate, accel_err + err_sum, evaluations, True)
        previous = estimate
        if evaluations + 21 * chunk > config.max_evaluations:
            accel_err = abs(estimate - partial[-1])
            return QuadratureResult(estimate, accel_err + err_sum, evaluations, False,
                                    f"evaluation budget of {config.max_evaluations} exhausted "
                                    f"after {n} intervals")


def integrate_double_k(f, config=None, *, scale=1.0, inner_scale=None, inner_factor=50.0,
                       inner_budget=20_000):
    """Nested integral of ``f(k, k')`` over the quadrant ``(0, inf)^2``.

    ``f`` must broadcast: it is called as ``f(k[None, :], kp[:, None])`` and
    returns an array of shape ``(len(kp), len(k))``. The inner integral over
    ``k'`` runs for a whole panel of outer nodes at once with tolerances
    tightened by ``inner_factor`` and at most ``inner_budget`` evaluations.
    Inner error estimates are folded into the outer error budget, so an inner
    integral that stops short only matters if the outer one then cannot meet
    its tolerance; in that case the offending ``k`` are named in the message.
    """
    config = config or QuadratureConfig()
    inner_cfg = config.inner(inner_factor).replace(
        max_evaluations=min(config.max_evaluations, inner_budget), relative_to_magnitude=True)
    inner_scale = scale if inner_scale is None else inner_scale
    stats = {"evaluations": 0, "short_at": []}

    def outer(k):
        res = integrate_semi_infinite(lambda kp: f(k[None, :], kp[:, None]), inner_cfg,
                                      scale=inner_scale)
        stats["evaluations"] += res.evaluations
        if not res.converged:
            stats["short_at"].append(float(k[0]))
            if not np.all(np.isfinite(res.value)):
                raise FloatingPointError(res.message)
        return res.value, res.abs_error_estimate

    try:
        res = integrate_semi_infinite(outer, config, scale=scale, with_errors=True)
    except FloatingPointError as exc:
        return QuadratureResult(np.nan, np.inf, stats["evaluations"], False,
                                f"inner integral failed near k={stats['short_at'][-1]:.6g}: {exc}")
    message = res.message
    if not res.converged and stats["short_at"]:
        where = ", ".join(f"{k:.6g}" for k in stats["short_at"][:5])
        message = (message + "; " if message else "") + f"inner integral not converged near k={where}"
    return QuadratureResult(res.value, res.abs_error_estimate,
                            res.evaluations + stats["evaluations"], res.converged, message)
