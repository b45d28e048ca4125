# %% [markdown]
# # Local solutions of a semilinear wave equation
#
# u_tt - Delta u = |u|^(3/2) u in three dimensions with small radial data.
# The solution is the fixed point of the Duhamel map on [0, T], where T comes
# from the life-span rule; each Picard step is measured in the mixed amalgam
# norm, and the result is compared with a finite-difference solver.

# %%
import numpy as np

from wienerwave.nlw import Nonlinearity, RadialGrid, fixed_point_solve, leapfrog_solve, persistence_check, sobolev_norm
from wienerwave.regions import ExponentTuple

grid = RadialGrid()
f = grid.sample(lambda r: 0.1 * np.exp(-(r**2)))
g = grid.profile(np.zeros(grid.modes))
tup = ExponentTuple(3, 8, 5, "10/3", "10/3")
F = Nonlinearity(2.5)

res = fixed_point_solve(f, g, F, tup)
print(f"sigma = {res.sigma}, data norm = {res.data_norm:.5f}, T = {res.plan.T}")
print("Picard iterations:", res.iterations, " contraction ratios:", np.round(res.contraction_ratios, 5))

# %% [markdown]
# Leapfrog on a four-times finer grid is an independent reference.

# %%
fd = leapfrog_solve(f, g, F, res.plan.T)
u = res.solution.values[-1]
w = grid.r**2
print("relative L2 gap at T:", np.sqrt(np.sum((u - fd) ** 2 * w) / np.sum(u**2 * w)))
print("persistence:", persistence_check(res))

# %% [markdown]
# The H^sigma norm of u(t) never exceeds the data norm on [0, T]; part of
# the data norm moves into u_t as the pulse disperses.

# %%
print("H^sigma of data:", sobolev_norm(f, res.sigma), " of u(T):", sobolev_norm(grid.profile(u), res.sigma))
