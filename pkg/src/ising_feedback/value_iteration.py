"""Value iteration ``J_{k+1} = T J_k`` on a uniform belief grid, and a
Monte Carlo histogram of the belief states visited under a policy."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dp import Action, GridFunction, evolve, maximize_actions

Policy = Callable[[float], Action]


@dataclass
class IterationReport:
    k: int
    J: GridFunction
    J_prev: GridFunction
    policy_delta: GridFunction
    policy_gamma: GridFunction
    spans: list[tuple[float, float]] = field(default_factory=list)

    @property
    def h(self) -> GridFunction:
        return GridFunction(self.J.values - self.J.values[0])

    @property
    def rho_lo(self) -> float:
        return self.spans[-1][0]

    @property
    def rho_hi(self) -> float:
        return self.spans[-1][1]

    @property
    def rho_mid(self) -> float:
        return 0.5 * (self.rho_lo + self.rho_hi)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("z,J,h,delta_star,gamma_star\n")
        for row in zip(
            self.J.grid, self.J.values, self.h.values,
            self.policy_delta.values, self.policy_gamma.values,
        ):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()


def iterate(J: GridFunction, action_grid: int = 64, refine: bool = True):
    """One application of the DP operator at every grid node.

    Returns ``(J_next, delta, gamma)``; the last two are the maximizing
    actions per node.
    """
    values, delta, gamma = maximize_actions(J, J.grid, action_grid, refine)
    return GridFunction(values), delta, gamma


def run(
    k: int = 20,
    grid_size: int = 1000,
    action_grid: int = 64,
    J0: GridFunction | None = None,
    refine: bool = True,
) -> IterationReport:
    """Apply :func:`iterate` ``k`` times starting from ``J0`` (zero by default).

    The average reward is bracketed by the min and max over nodes of
    ``J_k - J_{k-1}``; the bracket after every step is kept in ``spans``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    J = J0 if J0 is not None else GridFunction.zeros(grid_size)
    spans = []
    for _ in range(k):
        J_next, delta, gamma = iterate(J, action_grid, refine)
        diff = J_next.values - J.values
        spans.append((float(diff.min()), float(diff.max())))
        J_prev, J = J, J_next
    return IterationReport(
        k=k,
        J=J,
        J_prev=J_prev,
        policy_delta=GridFunction(delta),
        policy_gamma=GridFunction(gamma),
        spans=spans,
    )


def grid_policy(delta: GridFunction, gamma: GridFunction) -> Policy:
    """Policy interpolated from per-node actions, clipped to feasibility."""

    def policy(z: float) -> Action:
        d = min(max(float(delta(z)), 0.0), z)
        g = min(max(float(gamma(z)), 0.0), 1.0 - z)
        return Action(d, g)

    return policy


@dataclass
class Histogram:
    points: np.ndarray
    frequencies: np.ndarray
    bin_edges: np.ndarray
    bin_frequencies: np.ndarray
    count: int

    def mass_near(self, targets, tol: float = 1e-9) -> float:
        targets = np.asarray(targets, dtype=float)
        near = np.min(np.abs(self.points[:, None] - targets[None, :]), axis=1) <= tol
        return float(self.frequencies[near].sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("z,frequency\n")
        for z, f in zip(self.points, self.frequencies):
            buf.write(f"{z:.17g},{f:.17g}\n")
        return buf.getvalue()


def simulate_states(
    policy: Policy,
    steps: int = 250_000,
    seed: int = 0,
    z0: float = 0.0,
    snap: float = 1e-9,
    bins: int = 1000,
) -> Histogram:
    """Run the belief chain for ``steps`` transitions and tally visits.

    The output is sampled from its conditional law at each step.  Visits are
    recorded after each transition (the start state is not counted), each
    with weight ``1 / steps``.  States within ``snap`` of one another share a
    bucket, represented by the first value seen.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(steps)
    buckets: dict[int, list] = {}
    visited = np.empty(steps)
    z = float(z0)
    for i in range(steps):
        d, g = policy(z)
        p0 = (1.0 + d - g) / 2.0
        w = 0 if u[i] < p0 else 1
        z = evolve(z, Action(d, g), w)
        visited[i] = z
        key = int(round(z / snap))
        if key in buckets:
            buckets[key][1] += 1
        else:
            buckets[key] = [z, 1]
    pts = np.array([v[0] for v in buckets.values()])
    cnt = np.array([v[1] for v in buckets.values()], dtype=float)
    order = np.argsort(pts)
    edges = np.linspace(0.0, 1.0, bins + 1)
    hist, _ = np.histogram(visited, bins=edges)
    return Histogram(
        points=pts[order],
        frequencies=cnt[order] / steps,
        bin_edges=edges,
        bin_frequencies=hist / steps,
        count=steps,
    )
