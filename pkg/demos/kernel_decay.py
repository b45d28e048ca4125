# %% [markdown]
# # Decay of the kernel's amalgam norm in time
#
# h(t) = ||K_gamma(., t)||_{W(r~/2, r/2)} should decay like t^(large exponent)
# for t >= 1 and grow no faster than t^(small exponent) as t -> 0. We fit
# both slopes with the direct radial estimator and the annulus surrogate.

# %%
import numpy as np

from wienerwave.decaylab import ExperimentConfig, decay_experiment, fit_decay, kernel_time_profile

rep = decay_experiment("8/5", "9/2", "24/5")
for (est, regime), fit in rep.fits.items():
    print(f"{est:9s} {regime:8s} slope {fit.slope:+.4f}  target {rep.targets[regime]}")
print(rep.passes())

# %% [markdown]
# The large-t slope lands on the target. At small t the measured growth is
# much slower than the bound allows: the kernel is homogeneous,
# K(x, t) = t^(gamma-3) K(x/t, 1), which predicts the exponent
# gamma - 3 + 6/r~ = -3/20. Pushing the window toward t = 0 shows both
# estimators approaching it.

# %%
for lo, hi in [(1 / 64, 0.5), (1e-4, 1e-2)]:
    grid = np.geomspace(lo, hi, 12)
    slopes = [fit_decay(kernel_time_profile(ExperimentConfig("8/5", "9/2", "24/5", t_grid=grid, estimator=e)),
                        "small_t").slope for e in ("direct", "surrogate")]
    print(f"t in [{lo:g}, {hi:g}]: direct {slopes[0]:+.4f}  surrogate {slopes[1]:+.4f}")
