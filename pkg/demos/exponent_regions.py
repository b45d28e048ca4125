# %% [markdown]
# # Exact exponent bookkeeping
#
# Every admissibility condition is checked in exact rational arithmetic;
# infinite exponents are represented explicitly and 1/inf = 0.

# %%
from wienerwave.regions import (ExponentTuple, ExtendedRational, decay_exponents, duhamel_dual_indices, implied_sigma,
                                k_max, life_span, nlw_admissible, sample_propfix, thm1_admissible)

t = ExponentTuple(3, q=30, q_tilde=3, r="9/2", r_tilde="24/5", sigma="4/5")
print("inhomogeneous Strichartz tuple admissible:", thm1_admissible(t))
print("same tuple with r~ = 5:", thm1_admissible(ExponentTuple(3, 30, 3, "9/2", 5, sigma="4/5")))
print("kernel decay exponents (small t, large t):", [str(e) for e in decay_exponents(3, "8/5", "9/2", "24/5")])

# %% [markdown]
# The nonlinear problem: sigma is fixed by scaling, k must stay below
# k_max(sigma), and the Duhamel term is controlled through dual indices.

# %%
nl = ExponentTuple(3, 8, 5, "10/3", "10/3")
sigma = implied_sigma(nl)
print("sigma =", sigma, " k_max =", k_max(3, sigma))
print("k = 5/2 admissible:", nlw_admissible(nl, "5/2"), " k = 3:", nlw_admissible(nl, 3))
d = duhamel_dual_indices(nl, "5/2")
print("dual tuple:", d.tuple.as_strings(), " q~0 =", d.q0_tilde)
plan = life_span(1, 1, 3, 4)
print("life span for C = 1, data norm 1, k = 3, q~0 = 4:", plan.T, "(= 1/4096)")

# %% [markdown]
# The decay range for gamma in (3/2, 2) is a small triangle in (1/r, 1/r~);
# for gamma = 21/10 it is empty.

# %%
print("grid points for gamma = 8/5:", len(sample_propfix(3, "8/5")))
print("grid points for gamma = 21/10:", len(sample_propfix(3, "21/10")))
print("1/inf =", ExtendedRational("inf").inv)
