"""Closed-form solution of the DP and the checks that certify it.

The optimal average reward is ``rho = 2 H(a) / (3 + a)`` where ``a`` is the
root in [0, 1] of ``x^4 - 5x^3 + 6x^2 - 4x + 1``.  Under the optimal policy
the belief only visits ``{0, (1-a)/(1+a), 2a/(1+a), 1}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dp import Action, _hb, entropy, maximize_actions, restricted_values
from .search import golden_section_max

QUARTIC = (1.0, -5.0, 6.0, -4.0, 1.0)


def quartic(x):
    return (((x - 5.0) * x + 6.0) * x - 4.0) * x + 1.0


def _quartic_prime(x):
    return ((4.0 * x - 15.0) * x + 12.0) * x - 4.0


def _bisect(lo: float, hi: float) -> float:
    f_lo = quartic(lo)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = quartic(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    # Newton polish, kept only if it improves the residual
    x = 0.5 * (lo + hi)
    for _ in range(3):
        step = quartic(x) / _quartic_prime(x)
        if abs(quartic(x - step)) < abs(quartic(x)):
            x -= step
    return x


@dataclass(frozen=True)
class AnalyticParams:
    a: float
    rho_star: float
    p0: float
    p1: float
    p2: float
    p3: float
    other_root: float

    @property
    def points(self) -> tuple[float, float, float, float]:
        return (self.p0, self.p1, self.p2, self.p3)


def solve_root() -> AnalyticParams:
    """Root of the quartic in [0, 1] by bisection, and the derived constants."""
    a = _bisect(0.0, 1.0)
    other = _bisect(1.0, 4.0)
    rho = 2.0 * float(_hb(np.float64(a))) / (3.0 + a)
    return AnalyticParams(
        a=a,
        rho_star=rho,
        p0=0.0,
        p1=(1.0 - a) / (1.0 + a),
        p2=2.0 * a / (1.0 + a),
        p3=1.0,
        other_root=other,
    )


@lru_cache(maxsize=1)
def default_params() -> AnalyticParams:
    return solve_root()


def ferrari_roots(coeffs=QUARTIC) -> list[complex]:
    """All four roots of a quartic by Ferrari's method (cross-check only)."""
    a4, a3, a2, a1, a0 = (complex(c) for c in coeffs)
    b, c, d, e = a3 / a4, a2 / a4, a1 / a4, a0 / a4
    # depressed quartic y^4 + p y^2 + q y + r with x = y - b/4
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b**3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b**4 / 256
    shift = -b / 4
    if abs(q) < 1e-14:
        roots = []
        for y2 in _quadratic(1, p, r):
            y = cmath.sqrt(y2)
            roots += [y + shift, -y + shift]
        return roots
    # resolvent cubic 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0, need m != 0
    m = next(root for root in _cubic(8, 8 * p, 2 * p * p - 8 * r, -q * q) if abs(root) > 1e-12)
    s = cmath.sqrt(2 * m)
    roots = []
    for sign in (1, -1):
        roots += [
            y + shift
            for y in _quadratic(1, sign * s, p / 2 + m - sign * q / (2 * s))
        ]
    return roots


def _quadratic(a, b, c):
    disc = cmath.sqrt(b * b - 4 * a * c)
    return [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]


def _cubic(a, b, c, d):
    # Cardano on the depressed cubic t^3 + p t + q
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    u = (-q / 2 + disc) ** (1 / 3)
    if abs(u) < 1e-15:
        u = (-q / 2 - disc) ** (1 / 3)
    omega = complex(-0.5, math.sqrt(3) / 2)
    roots = []
    for k in range(3):
        uk = u * omega**k
        t = uk - p / (3 * uk) if abs(uk) > 1e-15 else 0j
        roots.append(t - b / 3)
    return roots


def policy_star(z: float, params: AnalyticParams | None = None) -> Action:
    d, g = policy_star_arrays(z, params)
    return Action(float(d), float(g))


def policy_star_arrays(z, params: AnalyticParams | None = None):
    p = params or default_params()
    z = np.asarray(z, dtype=float)
    a = p.a
    gamma = np.where(z <= p.p1, a + a * z, 1.0 - z)
    delta = np.where(z <= p.p2, z, a * (2.0 - z))
    return delta, gamma


def _h_upper(z, p: AnalyticParams):
    # closed form on [p2, 1]
    a, rho = p.a, p.rho_star
    c = (2.0 * a + (1.0 - a) * z) / 2.0
    return (
        _hb(c) / (1.0 - a)
        - z
        + (a * z - 4.0 * a - z) / (2.0 * (1.0 - a)) * rho
        + c / (1.0 - a) * _hb(2.0 * a / (a * (2.0 - z) + z))
    )


def h_star(z, params: AnalyticParams | None = None):
    """Relative value function solving the Bellman equation, h(1/2) = 1.

    Binary entropy on ``[p1, p2]``, the closed form on ``[p2, 1]``, and the
    mirror image of the latter on ``[0, p1]``.
    """
    p = params or default_params()
    arr = np.asarray(z, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("h_star is defined on [0, 1]")
    folded = np.where(arr < p.p1, 1.0 - arr, arr)
    upper = folded > p.p2
    out = np.where(upper, _h_upper(np.where(upper, folded, 1.0), p), _hb(folded))
    return float(out) if out.ndim == 0 else out


def _h_callable(params: AnalyticParams):
    return lambda z: h_star(np.clip(z, 0.0, 1.0), params)


@dataclass
class BellmanCheck:
    grid: np.ndarray
    residual: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    delta_star: np.ndarray
    gamma_star: np.ndarray

    @property
    def sup_residual(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def argmax_mismatch(self) -> float:
        return float(
            max(
                np.max(np.abs(self.delta - self.delta_star)),
                np.max(np.abs(self.gamma - self.gamma_star)),
            )
        )

    @property
    def argmax_actions(self) -> list[Action]:
        return [Action(float(d), float(g)) for d, g in zip(self.delta, self.gamma)]


def bellman_residual(
    params: AnalyticParams | None = None,
    grid_size: int = 1001,
    action_grid: int = 64,
) -> BellmanCheck:
    """``T h* - h* - rho*`` on a uniform grid, with the maximizing actions.

    ``h*`` is evaluated in closed form inside the operator, never
    interpolated.
    """
    p = params or default_params()
    zs = np.linspace(0.0, 1.0, grid_size)
    values, delta, gamma = maximize_actions(_h_callable(p), zs, action_grid)
    ds, gs = policy_star_arrays(zs, p)
    return BellmanCheck(zs, values - h_star(zs, p) - p.rho_star, delta, gamma, ds, gs)


def restricted_g(z, delta, gamma, params: AnalyticParams | None = None):
    """``T_{delta,gamma} h*(z)``, the objective without the supremum."""
    p = params or default_params()
    return restricted_values(_h_callable(p), z, delta, gamma)


def kkt_check(
    z: float, params: AnalyticParams | None = None, step: float = 1e-6
) -> tuple[float, float, str]:
    """Partial derivatives of ``T_{delta,gamma} h*`` at the optimal action.

    Central differences in the interior of the feasible box, backward
    differences at an upper bound.  Returns ``(d/d delta, d/d gamma, region)``
    with region ``"outer"`` on [0, p1] and [p2, 1], ``"inner"`` on [p1, p2].
    """
    p = params or default_params()
    d, g = policy_star(z, p)

    def g_at(dd, gg):
        return float(restricted_g(z, dd, gg, p))

    def partial(x, upper, along_delta):
        def f(v):
            return g_at(v, g) if along_delta else g_at(d, v)

        if x + step <= upper and x - step >= 0.0:
            return (f(x + step) - f(x - step)) / (2 * step)
        if x >= upper:
            return (f(x) - f(x - step)) / step
        return (f(x + step) - f(x)) / step

    dd = partial(d, z, True)
    dg = partial(g, 1.0 - z, False)
    region = "inner" if p.p1 <= z <= p.p2 else "outer"
    return dd, dg, region


def delta_derivative_identity(params: AnalyticParams | None = None) -> float:
    """Closed-form d/d delta on the outer region: (2 rho + log2 a) / (a - 1)."""
    p = params or default_params()
    return (2.0 * p.rho_star + math.log2(p.a)) / (p.a - 1.0)


def capacity_objective(z):
    return 2.0 * _hb(np.asarray(z, dtype=float)) / (3.0 + np.asarray(z, dtype=float))


def capacity_argmax(grid_size: int = 1001) -> tuple[float, float]:
    """Maximize ``2 H(z) / (3 + z)`` over [0, 1]: grid scan, then golden section."""
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    zs = np.linspace(0.0, 1.0, grid_size)
    i = int(np.argmax(capacity_objective(zs)))
    lo, hi = zs[max(i - 1, 0)], zs[min(i + 1, grid_size - 1)]
    x, v = golden_section_max(lambda t: float(capacity_objective(t)), lo, hi, 1e-13)
    return x, v


def factorization_gap(z):
    """(1-z)^8 - z^6 minus the product of its two quartic factors."""
    z = np.asarray(z, dtype=float)
    lhs = (1 - z) ** 8 - z**6
    rhs = (1 - 4 * z + 6 * z**2 - 3 * z**3 + z**4) * (1 - 4 * z + 6 * z**2 - 5 * z**3 + z**4)
    return lhs - rhs


@dataclass
class ConcavityReport:
    samples: int
    h_violations: int
    g_violations: int
    worst_h_gap: float
    worst_g_gap: float
    continuity_gaps: dict

    @property
    def ok(self) -> bool:
        return (
            self.h_violations == 0
            and self.g_violations == 0
            and max(self.continuity_gaps.values()) <= 1e-10
        )


def concavity_check(
    samples: int = 100_000,
    seed: int = 0,
    params: AnalyticParams | None = None,
    tol: float = 1e-10,
) -> ConcavityReport:
    """Randomized midpoint-concavity tests for ``h*`` and for the restricted
    operator in ``(delta, gamma)``, plus continuity at the breakpoints."""
    if samples < 1:
        raise ValueError("samples must be positive")
    p = params or default_params()
    rng = np.random.default_rng(seed)

    z1, z2 = rng.random(samples), rng.random(samples)
    h_gap = (h_star(z1, p) + h_star(z2, p)) / 2 - h_star((z1 + z2) / 2, p)

    z = rng.random(samples)
    d1, d2 = z * rng.random(samples), z * rng.random(samples)
    g1, g2 = (1 - z) * rng.random(samples), (1 - z) * rng.random(samples)
    mid = restricted_g(z, (d1 + d2) / 2, (g1 + g2) / 2, p)
    g_gap = (restricted_g(z, d1, g1, p) + restricted_g(z, d2, g2, p)) / 2 - mid

    eps = 1e-13
    gaps = {}
    for name, x in (("p1", p.p1), ("p2", p.p2)):
        gaps[f"h@{name}"] = abs(h_star(x - eps, p) - h_star(x + eps, p))
    # both branches of each policy evaluated right at the breakpoint
    gaps["gamma@p1"] = abs((p.a + p.a * p.p1) - (1.0 - p.p1))
    gaps["delta@p2"] = abs(p.p2 - p.a * (2.0 - p.p2))
    gaps["h_branch@p2"] = abs(float(_h_upper(p.p2, p)) - entropy(p.p2))

    return ConcavityReport(
        samples=samples,
        h_violations=int(np.sum(h_gap > tol)),
        g_violations=int(np.sum(g_gap > tol)),
        worst_h_gap=float(np.max(h_gap)),
        worst_g_gap=float(np.max(g_gap)),
        continuity_gaps=gaps,
    )


def key_point_transitions(params: AnalyticParams | None = None) -> dict[tuple[int, int], int]:
    """Successor key point for each (key point index, output) under the star
    policy, computed with the state update.  Unreachable cells map to None."""
    from .dp import disturbance_prob, evolve

    p = params or default_params()
    pts = p.points
    table = {}
    for i, z in enumerate(pts):
        act = policy_star(z, p)
        probs = disturbance_prob(z, act)
        for w in (0, 1):
            if probs[w] == 0.0:
                table[(i, w)] = None
                continue
            nxt = evolve(z, act, w)
            j = min(range(4), key=lambda k: abs(pts[k] - nxt))
            if abs(pts[j] - nxt) > 1e-12:
                raise AssertionError(f"state {nxt} left the key-point set")
            table[(i, w)] = j
    return table
