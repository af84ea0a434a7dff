"""Globally adaptive Gauss-Kronrod (10/21 point) integration.

Integrands are vectorised: ``f`` receives a 1-D array of abscissae and returns
an array whose leading axis matches it. Any trailing axes make the integrand
vector-valued; all components then share one set of panels and a panel is
refined while any component is short of its tolerance.

If ``with_errors=True`` the integrand returns ``(values, errors)`` where
``errors`` bounds the absolute error of each value (for example an inner
integral of a nested quadrature); those errors are folded into the panel error
estimates.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from ._types import QuadratureConfig, QuadratureResult

# QUADPACK qk21 abscissae (descending, last is the centre) and weights.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525478620,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS_WEIGHTS = np.zeros(21)
for _i, _w in zip(range(1, 10, 2), _WG):
    GAUSS_WEIGHTS[_i] = _w
    GAUSS_WEIGHTS[20 - _i] = _w

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


def _call(f, x, with_errors):
    out = f(x)
    if with_errors:
        values, errors = out
        return np.asarray(values, dtype=float), np.abs(np.asarray(errors, dtype=float))
    return np.asarray(out, dtype=float), None


def gk21_panels(f, a, b, with_errors=False):
    """Apply the 21-point Kronrod rule to each panel ``[a[i], b[i]]``.

    Returns ``(kronrod, error, resabs, bad)`` with leading axis over panels;
    ``bad`` flags non-finite results. The error follows the QUADPACK
    heuristic, including its round-off floor.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a.shape[0]
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = (centre[:, None] + half[:, None] * NODES).ravel()
    fx, ferr = _call(f, x, with_errors)
    tail = fx.shape[1:]
    fx = fx.reshape((p, 21) + tail)
    hb = half.reshape((p,) + (1,) * len(tail))

    kron = np.einsum("j,pj...->p...", KRONROD_WEIGHTS, fx)
    gauss = np.einsum("j,pj...->p...", GAUSS_WEIGHTS, fx)
    resabs = np.einsum("j,pj...->p...", KRONROD_WEIGHTS, np.abs(fx))
    mean = 0.5 * kron
    resasc = np.einsum("j,pj...->p...", KRONROD_WEIGHTS, np.abs(fx - mean[:, None]))
    absh = np.abs(hb)
    kron = kron * hb
    resabs = resabs * absh
    resasc = resasc * absh
    err = np.abs((kron - gauss * hb))
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.where(resabs > _UFLOW / (50 * _EPS), np.maximum(50 * _EPS * resabs, err), err)
    if ferr is not None:
        ferr = ferr.reshape((p, 21) + tail)
        err = err + absh * np.einsum("j,pj...->p...", KRONROD_WEIGHTS, ferr)
    bad = ~np.isfinite(kron) | ~np.isfinite(err)
    return kron, err, resabs, bad


class _Panels:
    """Panel store for one adaptive run."""

    def __init__(self):
        self.a = []
        self.b = []
        self.value = []
        self.error = []
        self.resabs = []
        self.alive = []
        self.heap = []

    def add(self, a, b, value, error, resabs, priority):
        idx = len(self.a)
        self.a.append(a)
        self.b.append(b)
        self.value.append(value)
        self.error.append(error)
        self.resabs.append(resabs)
        self.alive.append(True)
        heapq.heappush(self.heap, (-priority, idx))
        return idx

    def totals(self):
        live = [i for i, ok in enumerate(self.alive) if ok]
        live.sort(key=lambda i: self.a[i])
        values = np.array([self.value[i] for i in live])
        errors = np.array([self.error[i] for i in live])
        resabs = np.array([self.resabs[i] for i in live])
        return values.sum(axis=0), errors.sum(axis=0), resabs.sum(axis=0)


def _priority(err, scale):
    return float(np.max(err / scale))


def integrate(f, a, b, config=None, *, points=None, with_errors=False):
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand (see module docstring).
    a, b : float
        Finite limits.
    config : QuadratureConfig, optional
    points : sequence of float, optional
        Interior breakpoints used for the initial subdivision.
    with_errors : bool
        ``f`` returns ``(values, errors)``.

    Returns
    -------
    QuadratureResult
    """
    config = config or QuadratureConfig()
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate needs finite limits; use integrate_semi_infinite")
    if a == b:
        probe, _ = _call(f, np.array([a]), with_errors)
        zero = np.zeros(probe.shape[1:]) if probe.ndim > 1 else 0.0
        return QuadratureResult(zero, zero, 1, True)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a]
    if points is not None:
        edges += sorted(float(p) for p in points if a < p < b)
    edges.append(b)
    res = _adaptive(f, np.array(edges), config, with_errors)
    if sign < 0:
        res = QuadratureResult(-res.value, res.abs_error_estimate, res.evaluations,
                               res.converged, res.message)
    return res


def _adaptive(f, edges, config, with_errors):
    a0 = edges[:-1]
    b0 = edges[1:]
    kron, err, resabs, bad = gk21_panels(f, a0, b0, with_errors)
    evaluations = 21 * len(a0)
    if np.any(bad):
        return _non_finite(kron, evaluations, a0, b0, bad)

    panels = _Panels()
    total = kron.sum(axis=0)
    run_abs = resabs.sum(axis=0)
    scale = np.maximum(config.tolerance(total, run_abs), _UFLOW)
    for i in range(len(a0)):
        panels.add(a0[i], b0[i], kron[i], err[i], resabs[i], _priority(err[i], scale))

    message = ""
    converged = False
    run_value = total.copy() if np.ndim(total) else float(total)
    run_error = err.sum(axis=0)
    while True:
        tol = config.tolerance(run_value, run_abs)
        if np.all(run_error <= tol):
            run_value, run_error, run_abs = panels.totals()
            tol = config.tolerance(run_value, run_abs)
            if np.all(run_error <= tol):
                converged = True
                break
        if evaluations + 42 > config.max_evaluations:
            message = f"evaluation budget of {config.max_evaluations} exhausted"
            break
        if len(panels.a) >= config.subdivision_limit:
            message = f"subdivision limit of {config.subdivision_limit} reached"
            break
        _, idx = heapq.heappop(panels.heap)
        lo, hi = panels.a[idx], panels.b[idx]
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi) or (hi - lo) <= 8 * _EPS * max(abs(lo), abs(hi)):
            message = f"round-off limit reached near x={mid:.6g}"
            break
        kron, err, resabs, bad = gk21_panels(f, np.array([lo, mid]), np.array([mid, hi]), with_errors)
        evaluations += 42
        if np.any(bad):
            return _non_finite(kron, evaluations, np.array([lo, mid]), np.array([mid, hi]), bad)
        panels.alive[idx] = False
        run_value = run_value - panels.value[idx] + kron[0] + kron[1]
        run_error = run_error - panels.error[idx] + err[0] + err[1]
        run_abs = run_abs - panels.resabs[idx] + resabs[0] + resabs[1]
        scale = np.maximum(tol, _UFLOW)
        panels.add(lo, mid, kron[0], err[0], resabs[0], _priority(err[0], scale))
        panels.add(mid, hi, kron[1], err[1], resabs[1], _priority(err[1], scale))

    total, total_err, _ = panels.totals()
    if np.ndim(total) == 0:
        total, total_err = float(total), float(total_err)
    return QuadratureResult(total, total_err, evaluations, converged, message)


def _non_finite(kron, evaluations, a, b, bad):
    flat = bad.reshape(bad.shape[0], -1).any(axis=1)
    i = int(np.argmax(flat))
    shape = kron.shape[1:]
    value = np.full(shape, np.nan)
    error = np.full(shape, np.inf)
    if not shape:
        value, error = float(value), float(error)
    return QuadratureResult(value, error, evaluations, False,
                            f"non-finite integrand on [{a[i]:.6g}, {b[i]:.6g}]")
