"""Sequence acceleration for partial sums of slowly converging series."""
from __future__ import annotations

import numpy as np


def wynn_epsilon(partial_sums):
    """Limit estimate of a sequence by Wynn's epsilon algorithm.

    Returns the deepest even-column entry that could be formed before the
    table broke down (two equal neighbours). For an alternating series with
    a smooth term envelope this typically gains many digits over the last
    partial sum.

    >>> import math
    >>> s = [sum((-1) ** k / (k + 1) for k in range(n + 1)) for n in range(12)]
    >>> abs(wynn_epsilon(s) - math.log(2)) < 1e-10
    True
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size == 0:
        raise ValueError("need at least one partial sum")
    best = float(s[-1])
    prev = np.zeros(s.size + 1)
    curr = s.copy()
    k = 0
    while curr.size > 1:
        diff = curr[1:] - curr[:-1]
        if np.any(diff == 0):
            break
        nxt = prev[1:curr.size] + 1.0 / diff
        if not np.all(np.isfinite(nxt)):
            break
        prev, curr = curr, nxt
        k += 1
        if k % 2 == 0:
            best = float(curr[-1])
    return best
