"""Golden-section maximization, scalar and batched.

Both variants assume the objective is unimodal on the bracket.  The final
answer is the best of the bracket endpoints and the last interior probe, so
optima sitting exactly on a bound are returned exactly.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def _n_steps(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> tuple[float, float]:
    """Maximize a unimodal scalar function on ``[lo, hi]``.

    Returns ``(x, f(x))``.
    """
    f_lo, f_hi = f(lo), f(hi)
    a, b = lo, hi
    c = a + INV_PHI_SQ * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(_n_steps(hi - lo, tol)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI_SQ * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    candidates = [(lo, f_lo), (c, fc), (d, fd), (hi, f_hi)]
    best = max(candidates, key=lambda p: p[1])
    return best


def golden_section_max_batch(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise golden-section search over independent brackets.

    ``f`` maps an array of abscissae (one per problem) to objective values.
    Every problem takes the same number of steps, fixed by the widest bracket.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    a, b = lo.copy(), hi.copy()
    c = a + INV_PHI_SQ * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    for _ in range(_n_steps(width, tol)):
        left = fc >= fd
        # left: the max lies in [a, d]; otherwise in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        probe = np.where(left, a + INV_PHI_SQ * (b - a), a + INV_PHI * (b - a))
        fprobe = f(probe)
        c = np.where(left, probe, keep)
        fc = np.where(left, fprobe, fkeep)
        d = np.where(left, keep, probe)
        fd = np.where(left, fkeep, fprobe)
    xs = np.stack([lo, c, d, hi])
    fs = np.stack([f(lo), fc, fd, f(hi)])
    idx = np.argmax(fs, axis=0)
    cols = np.arange(xs.shape[1])
    return xs[idx, cols], fs[idx, cols]
