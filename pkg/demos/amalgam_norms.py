# %% [markdown]
# # Wiener amalgam norms
#
# W(p, q) measures local L^p size through translates of a window and then
# takes an L^q norm of those local sizes. Here we compute it in one
# dimension and for radial functions in three dimensions.

# %%
import numpy as np

from wienerwave.amalgam import (RadialProfile, SampledSignal, Window, amalgam_norm_1d, amalgam_norm_radial,
                                amalgam_surrogate_radial, annulus_mass, lp_norm_1d, weak_lorentz_norm)

h = 1 / 64
x = np.arange(-20, 20, h)
f = np.exp(-(x**2))
sig = SampledSignal(f, x[0], h)
print("W(2,2) / L2 for a Gaussian:", amalgam_norm_1d(sig, 2, 2) / lp_norm_1d(f, h, 2))
print("W(1,inf), W(4,2):", amalgam_norm_1d(sig, 1, "inf"), amalgam_norm_1d(sig, 4, 2))

# %% [markdown]
# The weak-type outer norm uses the decreasing rearrangement. A sequence
# k^(-1/2) has bounded weak L^2 norm while its strong L^2 norm grows like
# sqrt(log N).

# %%
for N in (10**2, 10**4):
    k = np.arange(1, N + 1) ** -0.5
    print(f"N={N}: weak {weak_lorentz_norm(SampledSignal(k), 2):.3f}  strong {lp_norm_1d(k, 1, 2):.3f}")

# %% [markdown]
# For a radial function the local norm depends only on |y|, so the
# three-dimensional norm reduces to one-dimensional integrals. The annulus
# surrogate replaces the window by unit-width annuli.

# %%
g = RadialProfile.from_function(lambda s: np.exp(-(s**2)), np.linspace(0, 8, 200))
print("radial W(12/5, 9/4):", amalgam_norm_radial(g, "12/5", "9/4"))
print("annulus surrogate:   ", amalgam_surrogate_radial(g, "12/5", "9/4"))
const = RadialProfile.from_function(np.ones_like, np.linspace(0, 20, 10))
print("annulus volume at rho=10:", annulus_mass(const, 10.0, 1), "exact", 4 * np.pi / 3 * (11**3 - 9**3))
