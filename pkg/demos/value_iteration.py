# %% [markdown]
# Value iteration on a 1000-point belief grid, then a look at where the
# optimal policy actually spends its time.

# %%
import numpy as np

from ising_feedback import analytic, value_iteration

p = analytic.default_params()
rep = value_iteration.run(k=20, grid_size=1000, action_grid=64)

for k, (lo, hi) in enumerate(rep.spans, 1):
    if k in (1, 2, 5, 10, 20):
        print(f"k={k:2d}  average reward in [{lo:.6f}, {hi:.6f}]")
print("closed form:", p.rho_star)

# %% h_k is pinned to 0 at z=0, h* is pinned to 1 at z=1/2
zs = rep.J.grid
gap = rep.h.values - (analytic.h_star(zs, p) - p.rho_star)
print("sup |h_20 - h*| =", np.abs(gap).max())

# %% Numerical policy against the closed form
d_star, g_star = analytic.policy_star_arrays(zs, p)
print("max |delta - delta*| =", np.abs(rep.policy_delta.values - d_star).max())
print("max |gamma - gamma*| =", np.abs(rep.policy_gamma.values - g_star).max())

# %% Visits under the optimal policy pile up on four points
hist = value_iteration.simulate_states(lambda z: analytic.policy_star(z, p), 250_000, seed=0)
for z, f in zip(hist.points, hist.frequencies):
    print(f"z = {z:.6f}   frequency = {f:.4f}")
