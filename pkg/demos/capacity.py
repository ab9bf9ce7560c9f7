# %% [markdown]
# Feedback capacity of the Ising channel in closed form.
#
# Everything hangs off one number: the root `a` of a quartic in [0, 1].

# %%
import numpy as np

from ising_feedback import analytic

p = analytic.solve_root()
print("a        =", p.a)
print("quartic  =", analytic.quartic(p.a))
print("capacity =", p.rho_star)

# %% Ferrari's closed form gives the same two real roots
roots = analytic.ferrari_roots()
print(np.round(roots, 12))

# %% The capacity is also a plain 1-D maximization
z, v = analytic.capacity_argmax()
print(f"argmax z = {z:.9f}   max = {v:.12f}")

zs = np.linspace(0, 1, 11)
for z_, f in zip(zs, analytic.capacity_objective(zs)):
    print(f"{z_:4.1f}  {f:.6f}")

# %% The four belief states the optimal policy cycles through
print("key points:", np.round(p.points, 6))
print(analytic.key_point_transitions(p))
