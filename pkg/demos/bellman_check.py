# %% [markdown]
# Plug the closed-form h* back into the DP operator and see how far the
# Bellman equation is from holding.

# %%
import numpy as np

from ising_feedback import analytic

p = analytic.default_params()
check = analytic.bellman_residual(p, grid_size=1001, action_grid=64)
print("sup |T h* - h* - rho*| :", check.sup_residual)
print("argmax vs (delta*, gamma*):", check.argmax_mismatch)

# %% Derivatives of the one-step objective at the star policy
for z in (0.0, 0.2, 0.5, p.p2 + 1e-3, 0.8, 1.0):
    dd, dg, region = analytic.kkt_check(z, p)
    print(f"z={z:.4f}  {region:5s}  d/ddelta={dd: .2e}  d/dgamma={dg: .2e}")

# %% Concavity, by random midpoints
print(analytic.concavity_check(100_000, seed=0, params=p))

# %% h* is symmetric about 1/2
zs = np.linspace(0, 1, 1001)
print("symmetry gap:", np.abs(analytic.h_star(zs, p) - analytic.h_star(1 - zs, p)).max())
