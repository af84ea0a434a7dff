"""Richardson-style extrapolation of regulated quantities to zero regulator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class ExtrapolationResult:
    """Extrapolated limit with an error estimate.

    ``error_estimate`` is the difference between the full-order extrapolant
    and the one of order one lower built from the same smallest samples.
    """

    value: float
    error_estimate: float
    order: int
    powers: Tuple[float, ...]
    samples: Tuple[Tuple[float, float], ...]

    def __float__(self):
        return self.value


def _limit(h, v, powers):
    # Fit v = c0 + sum_j c_j h**p_j exactly through len(powers)+1 points.
    scale = h.max()
    x = h / scale
    A = np.column_stack([np.ones_like(x)] + [x**p for p in powers])
    return float(np.linalg.solve(A, v)[0])


def extrapolate_to_zero(samples: Sequence[Tuple[float, float]], order: int,
                        powers: Sequence[float] = None) -> ExtrapolationResult:
    """Extrapolate ``v(h)`` to ``h = 0`` from samples at decreasing ``h``.

    Parameters
    ----------
    samples : sequence of (h, value)
        Strictly decreasing positive ``h``; at least ``order + 1`` of them.
    order : int
        Number of correction terms removed.
    powers : sequence of float, optional
        Exponents of the correction terms, ``v(h) = v0 + c1 h**p1 + ...``.
        Defaults to ``1, 2, ..., order`` (plain polynomial extrapolation).
        Supplying the known exponents (e.g. odd powers only) is the classical
        Richardson refinement.

    Returns
    -------
    ExtrapolationResult
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    powers = tuple(range(1, order + 1)) if powers is None else tuple(float(p) for p in powers)
    if len(powers) < order:
        raise ValueError(f"need {order} correction exponents, got {len(powers)}")
    powers = powers[:order]
    samples = [(float(h), float(v)) for h, v in samples]
    if len(samples) < order + 1:
        raise ValueError(f"need at least {order + 1} samples for order {order}, got {len(samples)}")
    hs = np.array([h for h, _ in samples])
    vs = np.array([v for _, v in samples])
    if not np.all(hs > 0) or not np.all(np.isfinite(hs)):
        raise ValueError("sample parameters must be positive and finite")
    if not np.all(np.diff(hs) < 0):
        raise ValueError("sample parameters must be strictly decreasing")
    if not np.all(np.isfinite(vs)):
        raise ValueError("sample values must be finite")

    h = hs[-(order + 1):]
    v = vs[-(order + 1):]
    value = _limit(h, v, powers)
    if order > 1:
        lower = _limit(h[1:], v[1:], powers[:-1])
    else:
        lower = float(v[-1])
    err = abs(value - lower)
    if not math.isfinite(value):
        raise ValueError("extrapolation produced a non-finite value")
    return ExtrapolationResult(value, err, order, powers, tuple(samples))
