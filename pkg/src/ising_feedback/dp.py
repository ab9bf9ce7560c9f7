"""Belief-state dynamic program for the Ising channel with feedback.

The DP state ``z`` is the posterior probability that the channel state is 0
given past outputs.  An action is the pair ``(delta, gamma)`` with
``delta = z * p(x=0 | s=0)`` and ``gamma = (1 - z) * p(x=1 | s=1)``, so the
feasible set is the box ``[0, z] x [0, 1 - z]``.  The disturbance is the
channel output.

Value functions ``h`` are any vectorized callables on ``[0, 1]``; the
tabulated :class:`GridFunction` interpolates linearly between nodes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .search import golden_section_max_batch

CLAMP_TOL = 1e-12
FEAS_TOL = 1e-12

ValueFn = Callable[[np.ndarray], np.ndarray]


class Action(NamedTuple):
    delta: float
    gamma: float


@dataclass(frozen=True)
class ActionMatrix:
    """Input distribution ``u[s_prev][x] = p(x | s_prev)``."""

    u11: float
    u12: float
    u21: float
    u22: float

    def __post_init__(self):
        for row in ((self.u11, self.u12), (self.u21, self.u22)):
            if min(row) < 0 or abs(sum(row) - 1.0) > 1e-12:
                raise ValueError(f"not a stochastic row: {row}")


class UnreachableDisturbance(ValueError):
    pass


def entropy(p):
    """Binary entropy in bits, with 0 log 0 = 0.  Accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ValueError(f"entropy argument outside [0, 1]: {p}")
    out = _hb(arr)
    return float(out) if out.ndim == 0 else out


def _hb(p: np.ndarray) -> np.ndarray:
    # Unchecked entropy; tiny rounding overshoot is clipped.
    p = np.clip(p, 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        b = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return a + b


def check_state(z: float) -> float:
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"DP state outside [0, 1]: {z}")
    return float(z)


def check_action(z: float, act: Action) -> Action:
    d, g = act
    if d < -FEAS_TOL or d > z + FEAS_TOL or g < -FEAS_TOL or g > 1 - z + FEAS_TOL:
        raise ValueError(
            f"infeasible action (delta={d}, gamma={g}) at z={z}: "
            "need 0 <= delta <= z and 0 <= gamma <= 1 - z"
        )
    return Action(float(d), float(g))


def action_from_matrix(z: float, u: ActionMatrix) -> Action:
    z = check_state(z)
    return Action(z * u.u11, (1.0 - z) * u.u22)


def matrix_from_action(z: float, act: Action) -> ActionMatrix:
    """Inverse of :func:`action_from_matrix` for ``0 < z < 1``."""
    z = check_state(z)
    if not 0.0 < z < 1.0:
        raise ValueError("the action does not determine both rows at z in {0, 1}")
    u11 = act.delta / z
    u22 = act.gamma / (1.0 - z)
    return ActionMatrix(u11, 1.0 - u11, 1.0 - u22, u22)


def reward(z: float, act: Action) -> float:
    """Per-step mutual information I(X, S; Y | past outputs)."""
    d, g = check_action(check_state(z), act)
    return float(_hb(np.float64(0.5 + (d - g) / 2.0)) + d + g - 1.0)


def disturbance_prob(z: float, act: Action) -> tuple[float, float]:
    d, g = check_action(check_state(z), act)
    return (1.0 + d - g) / 2.0, (1.0 - d + g) / 2.0


def _clamp(x: float) -> float:
    if x < -CLAMP_TOL or x > 1.0 + CLAMP_TOL:
        raise ValueError(f"next state {x} overshoots [0, 1]")
    return min(max(x, 0.0), 1.0)


def evolve(z: float, act: Action, w: int) -> float:
    """Posterior update after observing output ``w``."""
    z = check_state(z)
    d, g = check_action(z, act)
    if w not in (0, 1):
        raise ValueError(f"disturbance must be 0 or 1, got {w}")
    if w == 0:
        den = 1.0 + d - g
        if den <= 0.0:
            raise UnreachableDisturbance("unreachable disturbance w=0")
        return _clamp(1.0 + (d - z) / den)
    den = 1.0 + g - d
    if den <= 0.0:
        raise UnreachableDisturbance("unreachable disturbance w=1")
    return _clamp((1.0 - z - g) / den)


def restricted_values(h: ValueFn, z, delta, gamma) -> np.ndarray:
    """Vectorized ``g(z, a) + E[h(next state)]`` without feasibility checks.

    Broadcasts over ``z``, ``delta``, ``gamma``.  Zero-probability branches
    contribute nothing.  Also used for one-sided derivatives that step a
    hair outside the feasible box.
    """
    z = np.asarray(z, dtype=float)
    d = np.asarray(delta, dtype=float)
    g = np.asarray(gamma, dtype=float)
    den0 = 1.0 + d - g
    den1 = 1.0 + g - d
    p0 = den0 / 2.0
    p1 = den1 / 2.0
    ok0 = den0 > 0
    ok1 = den1 > 0
    z0 = np.clip(1.0 + (d - z) / np.where(ok0, den0, 1.0), 0.0, 1.0)
    z1 = np.clip((1.0 - z - g) / np.where(ok1, den1, 1.0), 0.0, 1.0)
    val = _hb(0.5 + (d - g) / 2.0) + d + g - 1.0
    val = val + np.where(ok0, p0 * h(z0), 0.0) + np.where(ok1, p1 * h(z1), 0.0)
    return val


def restricted_operator(h: ValueFn, z: float, act: Action) -> float:
    z = check_state(z)
    d, g = check_action(z, act)
    return float(restricted_values(h, z, d, g))


def _mesh_argmax(h, zs, m, chunk_elems=2_000_000):
    s = np.linspace(0.0, 1.0, m)
    best_s = np.empty(len(zs))
    best_t = np.empty(len(zs))
    best_v = np.empty(len(zs))
    step = max(1, chunk_elems // (m * m))
    for lo in range(0, len(zs), step):
        zc = zs[lo : lo + step, None, None]
        vals = restricted_values(h, zc, zc * s[None, :, None], (1.0 - zc) * s[None, None, :])
        flat = vals.reshape(len(zc), -1)
        # first occurrence: smallest delta index, then smallest gamma index
        idx = np.argmax(flat, axis=1)
        i, j = np.divmod(idx, m)
        best_s[lo : lo + step] = s[i]
        best_t[lo : lo + step] = s[j]
        best_v[lo : lo + step] = flat[np.arange(len(zc)), idx]
    return best_s, best_t, best_v


def maximize_actions(
    h: ValueFn,
    zs,
    action_grid: int = 64,
    refine: bool = True,
    sweeps: int = 8,
    tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate ``(T h)(z)`` at many states at once.

    Exhaustive search on an ``action_grid x action_grid`` mesh over the
    feasible box, then alternating golden-section refinement of each
    coordinate within one mesh cell of the incumbent.  Refinement only ever
    replaces the incumbent by a strictly better point.

    Returns ``(values, delta, gamma)`` arrays.
    """
    if action_grid < 2:
        raise ValueError("action_grid must be at least 2")
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    s, t, v = _mesh_argmax(h, zs, action_grid)
    if refine:
        width = 1.0 / (action_grid - 1)
        for _ in range(sweeps):
            t_fixed = t
            s_new, v_new = golden_section_max_batch(
                lambda x: restricted_values(h, zs, zs * x, (1.0 - zs) * t_fixed),
                np.clip(s - width, 0.0, 1.0),
                np.clip(s + width, 0.0, 1.0),
                tol,
            )
            better = v_new > v
            s = np.where(better, s_new, s)
            v = np.where(better, v_new, v)
            s_fixed = s
            t_new, v_new = golden_section_max_batch(
                lambda x: restricted_values(h, zs, zs * s_fixed, (1.0 - zs) * x),
                np.clip(t - width, 0.0, 1.0),
                np.clip(t + width, 0.0, 1.0),
                tol,
            )
            better = v_new > v
            t = np.where(better, t_new, t)
            v = np.where(better, v_new, v)
    return v, zs * s, (1.0 - zs) * t


def bellman_operator(
    h: ValueFn, z: float, action_grid: int = 64, refine: bool = True
) -> tuple[float, Action]:
    """``(T h)(z)`` and its maximizing action."""
    z = check_state(z)
    v, d, g = maximize_actions(h, [z], action_grid, refine)
    return float(v[0]), Action(float(d[0]), float(g[0]))


@dataclass
class GridFunction:
    """Values on the uniform grid ``linspace(0, 1, size)``; linear in between."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("need a 1-D array with at least two nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @classmethod
    def zeros(cls, size: int) -> "GridFunction":
        return cls(np.zeros(size))

    @classmethod
    def sample(cls, f: ValueFn, size: int) -> "GridFunction":
        return cls(np.asarray(f(np.linspace(0.0, 1.0, size)), dtype=float))

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.size)

    @property
    def spacing(self) -> float:
        return 1.0 / (self.size - 1)

    def __call__(self, z):
        return np.interp(z, self.grid, self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("z,value\n")
        for z, v in zip(self.grid, self.values):
            buf.write(f"{z:.17g},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        lines = text.strip().splitlines()
        if lines[0].strip() != "z,value":
            raise ValueError("expected header 'z,value'")
        rows = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
        if not np.allclose(rows[:, 0], np.linspace(0.0, 1.0, len(rows)), atol=1e-15):
            raise ValueError("z column is not a uniform grid on [0, 1]")
        return cls(rows[:, 1])
