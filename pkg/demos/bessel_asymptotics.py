# %% [markdown]
# # Bessel functions and their large-argument remainder
#
# J_nu(m) is evaluated by its power series for small m and by the Hankel
# expansion for large m. The remainder after the leading cosine term decays
# like m^(-3/2); we look at that decay through the crests of |R_nu|.

# %%
import numpy as np
from fractions import Fraction
from scipy.special import jv

from wienerwave.special import SERIES_CROSSOVER, bessel_j, bessel_remainder, remainder_envelope, remainder_envelope_slope

m = np.linspace(0.5, 60, 7)
for nu in (0, 1, Fraction(3, 2)):
    ours = bessel_j(nu, m)
    print(f"nu={nu}: max |ours - scipy| = {np.max(np.abs(ours - jv(float(nu), m))):.1e}")
print("series/Hankel crossover at m =", SERIES_CROSSOVER)

# %% [markdown]
# For nu = 1/2 the leading term is exact, so the remainder vanishes.

# %%
grid = np.linspace(2, 200, 5001)
print("max |R_1/2| =", np.max(np.abs(bessel_remainder(Fraction(1, 2), grid))))

# %% [markdown]
# The crests of |R_nu| trace the envelope; a log-log fit gives its slope.

# %%
for nu in (0, 1, Fraction(3, 2), 2):
    print(f"nu={nu}: envelope slope {remainder_envelope_slope(nu):+.3f}  (expected about -1.5)")
pos, val = remainder_envelope(0)
print("first crests of |R_0|:", np.round(pos[:4], 3), np.round(val[:4], 4))
