import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from wienerwave.amalgam import (RadialProfile, SampledSignal, Window, amalgam_norm_1d, amalgam_norm_radial,
                                amalgam_surrogate_radial, annulus_mass, holder_pairing_ratio, lp_norm_1d,
                                mixed_amalgam_norm, radial_amalgam_norms, weak_lorentz_norm, windowed_lp_radial)
from wienerwave.decaylab import kernel_profile
from wienerwave.regions import ExponentTuple

INDICATOR = Window(profile="indicator")
BALL = 4 * np.pi / 3


def const_profile(end=20.0):
    return RadialProfile.from_function(lambda s: np.ones_like(s), np.linspace(0, end, 64))


@pytest.mark.parametrize("profile", ["smooth_bump", "cosine_taper", "indicator"])
def test_window_unit_l2(profile):
    w = Window(profile=profile)
    one_d = 2 * quad(lambda d: w(d, 1) ** 2, 0, 1, points=[0.5], limit=200)[0]
    three_d = 4 * np.pi * quad(lambda d: w(d, 3) ** 2 * d**2, 0, 1, points=[0.5], limit=200)[0]
    assert one_d == pytest.approx(1, abs=1e-8)
    assert three_d == pytest.approx(1, abs=1e-8)


def test_window_support_and_shape():
    w = Window(support_radius=2.0, l2_normalized=False)
    assert w.shape(np.array([2.0, 2.5]))[:].tolist() == [0.0, 0.0]
    assert w.shape(np.array([0.0]))[0] == pytest.approx(1.0)
    assert w.shape(np.array([1.0]))[0] == pytest.approx(np.exp(1 - 1 / (1 - 0.25)))
    with pytest.raises(ValueError):
        Window(support_radius=0)


def test_weak_lorentz_examples():
    assert weak_lorentz_norm(SampledSignal(np.ones(49)), 2) == pytest.approx(7.0)
    assert weak_lorentz_norm(SampledSignal(np.zeros(5)), 2) == 0.0
    for N in (10**2, 10**3, 10**4):
        k = np.arange(1, N + 1)
        assert weak_lorentz_norm(SampledSignal(k**-0.5), 2) <= 1 + 1e-12
    with pytest.raises(ValueError):
        weak_lorentz_norm(SampledSignal(np.ones(3)), 0)
    with pytest.raises(ValueError):
        weak_lorentz_norm(SampledSignal(-np.ones(3)), 2)


@given(arrays(float, st.integers(1, 60), elements=st.floats(0, 1e3)), st.sampled_from([1, 1.5, 2, 4, 7]),
       st.sampled_from([0.1, 1.0, 3.0]))
def test_weak_below_strong(v, q, step):
    assert weak_lorentz_norm(SampledSignal(v, 0.0, step), q) <= lp_norm_1d(v, step, q) * (1 + 1e-12)


def test_1d_zero_and_empty():
    assert amalgam_norm_1d(SampledSignal(np.zeros(40), 0, 0.1), 2, 3) == 0.0
    with pytest.raises(ValueError):
        amalgam_norm_1d(SampledSignal(np.zeros(0)), 2, 2)


@given(arrays(float, 80, elements=st.floats(-10, 10)), st.floats(-1e3, 1e3), st.sampled_from([(1, 2), (2, 2), (3, "inf"), ("5/2", 4)]),
       st.booleans())
def test_1d_homogeneity(v, lam, pq, weak):
    s = SampledSignal(v, -2.0, 0.05)
    base = amalgam_norm_1d(s, *pq, outer_weak=weak)
    scaled = amalgam_norm_1d(SampledSignal(lam * v, -2.0, 0.05), *pq, outer_weak=weak)
    assert scaled == pytest.approx(abs(lam) * base, rel=1e-12, abs=1e-300)


def test_1d_w22_indicator_partition():
    # translates at spacing 1 of the unit indicator cover each sample twice with phi^2 = 1/2
    h = 0.01
    x = np.arange(0.005, 12, h)
    f = np.exp(-((x - 6) ** 2))
    assert amalgam_norm_1d(SampledSignal(f, x[0], h), 2, 2, INDICATOR) == pytest.approx(lp_norm_1d(f, h, 2), rel=1e-12)


def test_1d_gaussian_w22_near_l2():
    h = 1 / 64
    x = np.arange(-10, 10, h)
    f = np.exp(-(x**2))
    ratio = amalgam_norm_1d(SampledSignal(f, x[0], h), 2, 2) / lp_norm_1d(f, h, 2)
    assert 1 / 1.5 <= ratio <= 1.5


def _family():
    h = 1 / 64
    x = np.arange(-40, 40, h) + h / 2
    fam = [np.exp(-(((x - c) / w) ** 2)) for w in (0.1, 0.5, 1, 3, 8) for c in (0, 7.3)]
    fam += [((x >= a) & (x <= b)).astype(float) for a, b in ((0, 0.3), (0, 2), (-5, 5), (-20, 20), (3, 3.1))]
    fam += [sum(2.0 ** (-j / 2) * np.exp(-4 * ((x - 0.3 * 2**j) / s) ** 2) for j in range(J))
            for J, s in ((4, 1), (6, 2), (8, 0.5), (5, 3), (7, 1.5))]
    return [SampledSignal(f, x[0], h) for f in fam]


# measured once over the 20-function family and frozen
INCLUSION_FROZEN = {((4, 2), (2, 4)): 0.878, ((3, 1), (1, "inf")): 0.654}
WPP_FROZEN = 1.287


@pytest.mark.parametrize("strong,weak", list(INCLUSION_FROZEN))
def test_inclusion_constant(strong, weak):
    fam = _family()
    assert len(fam) == 20
    worst = max(amalgam_norm_1d(s, *weak) / amalgam_norm_1d(s, *strong) for s in fam)
    assert worst <= INCLUSION_FROZEN[(strong, weak)] * 1.001


def test_wpp_versus_lp():
    ratios = [amalgam_norm_1d(s, p, p) / lp_norm_1d(s.samples, s.grid_step, p) for s in _family() for p in (1, 2, 3)]
    assert max(ratios) <= WPP_FROZEN * 1.001
    assert min(ratios) >= 1 / (WPP_FROZEN * 1.001)


def test_ball_volume_and_translation():
    prof = const_profile()
    assert windowed_lp_radial(prof, 0.0, 1, Window(l2_normalized=False, profile="indicator")) == pytest.approx(BALL, rel=1e-3)
    at0 = windowed_lp_radial(prof, 0.0, 1)
    assert windowed_lp_radial(prof, 10.0, 1) == pytest.approx(at0, rel=1e-4)
    assert windowed_lp_radial(prof, 3.0, 2) == pytest.approx(1.0, rel=1e-6)


def test_inverse_radius_monte_carlo():
    prof = RadialProfile.from_function(lambda s: 1 / s, np.geomspace(1e-3, 30, 64))
    got = windowed_lp_radial(prof, 10.0, 2)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, (10**6, 3))
    # cube of volume 8; the window vanishes outside the unit ball
    phi2 = Window()(np.linalg.norm(pts, axis=1), 3) ** 2
    mc = np.sqrt(8.0 * np.mean(phi2 / np.sum((pts + [0, 0, 10]) ** 2, axis=1)))
    assert got == pytest.approx(mc, rel=0.01)
    assert got == pytest.approx(0.1, rel=0.1)


def test_annulus_mass_examples():
    prof = const_profile()
    assert annulus_mass(prof, 0.0, 1) == pytest.approx(BALL, rel=1e-10)
    assert annulus_mass(prof, 10.0, 1) == pytest.approx(BALL * (11**3 - 9**3), rel=1e-10)
    inv_sq = RadialProfile.from_function(lambda s: s**-2.0, np.geomspace(1e-2, 40, 64))
    assert annulus_mass(inv_sq, 10.0, 1) == pytest.approx(8 * np.pi, rel=1e-10)


def test_radial_zero_and_homogeneity():
    g = RadialProfile.from_function(lambda s: np.exp(-(s**2)), np.linspace(0, 8, 200))
    zero = RadialProfile(np.linspace(0, 8, 200), np.zeros(200))
    assert amalgam_norm_radial(zero, 2, 3) == 0.0
    assert amalgam_surrogate_radial(zero, 2, 3) == 0.0
    base = amalgam_norm_radial(g, "12/5", "9/4")
    assert amalgam_norm_radial(g.scaled(-3.5), "12/5", "9/4") == pytest.approx(3.5 * base, rel=1e-12)
    assert amalgam_surrogate_radial(g.scaled(2.0), 2, 3) == pytest.approx(2 * amalgam_surrogate_radial(g, 2, 3), rel=1e-12)


def test_radial_function_and_sampled_paths_agree():
    r = np.linspace(0, 10, 4001)
    g = RadialProfile.from_function(lambda s: np.exp(-(s**2)) * (1 + s), r)
    sampled = RadialProfile(r, g.values)
    assert amalgam_norm_radial(sampled, 2, 3) == pytest.approx(amalgam_norm_radial(g, 2, 3), rel=1e-4)


def test_radial_wpp_identity():
    # int int |f(x)|^p phi(x - y)^p dx dy = ||f||_p^p ||phi||_p^p
    f = lambda s: np.exp(-(s**2) / 2)  # noqa: E731
    g = RadialProfile.from_function(f, np.linspace(0, 12, 300))
    for p in (1.0, 2.0, 3.0):
        lp = 4 * np.pi * quad(lambda s: f(s) ** p * s**2, 0, np.inf)[0]
        want = (lp * Window().radial_moment(p)) ** (1 / p)
        assert amalgam_norm_radial(g, p, p) == pytest.approx(want, rel=1e-6)


def test_sparse_batch_matches_rows():
    r = np.linspace(0, 10, 801)
    rows = np.array([np.exp(-a * r**2) for a in (0.5, 1.0, 2.0)])
    batch = radial_amalgam_norms(rows, r, 2, 3)
    single = [radial_amalgam_norms(v, r, 2, 3) for v in rows]
    assert np.allclose(batch, single, rtol=1e-14)


def test_surrogate_compact_support_parts():
    prof = RadialProfile.from_function(lambda s: np.ones_like(s), np.linspace(0, 2, 50))
    a, b = amalgam_surrogate_radial(prof, 1, 2, parts=True)
    assert np.isfinite(a) and np.isfinite(b) and b > 0
    # B comes from rho in [1, 3] only: beyond that the annulus misses the support
    assert annulus_mass(prof, 3.0 + 1e-9, 1) == pytest.approx(0, abs=1e-9)


def test_divergent_singular_power_rejected():
    # |s - t|^(-1/2) to the power 12/5 is not integrable at the cone
    prof = kernel_profile(1.5, 8.0, 1000, 400)
    with pytest.raises(ValueError):
        amalgam_norm_radial(prof, "12/5", "9/4")


def test_surrogate_ratio_stable_in_time():
    ratios = []
    for t in (4.0, 16.0, 64.0):
        prof = kernel_profile(1.6, t, 1000, 400)
        ratios.append(amalgam_norm_radial(prof, "12/5", "9/4") / amalgam_surrogate_radial(prof, "12/5", "9/4"))
    assert max(ratios) / min(ratios) < 1.01


@pytest.mark.xfail(strict=True, reason="window constant: direct/surrogate = 0.2485, just under 1/4")
def test_surrogate_ratio_interval():
    prof = kernel_profile(1.6, 8.0, 1000, 400)
    ratio = amalgam_norm_radial(prof, "12/5", "9/4") / amalgam_surrogate_radial(prof, "12/5", "9/4")
    assert 0.25 <= ratio <= 4


def _grid():
    h = 1 / 32
    x = np.arange(0, 8, h)
    t = np.arange(0, 4, h)
    return x, t, h


def test_holder_examples():
    x, t, h = _grid()
    G = np.exp(-((x[None, :] - 4) ** 2) - (t[:, None] - 2) ** 2)
    two = ExponentTuple(3, 2, 2, 2, 2)
    assert holder_pairing_ratio(G, np.zeros_like(G), h, h, two) == 0.0
    assert holder_pairing_ratio(G, G, h, h, two) == pytest.approx(1, abs=0.05)
    with pytest.raises(ValueError):
        holder_pairing_ratio(G, G[:-1], h, h, two)


def test_holder_random_trials():
    x, t, h = _grid()
    tup = ExponentTuple(3, 30, 3, "9/2", "24/5")
    rng = np.random.default_rng(11)
    worst = 0.0
    for k in range(50):
        F = rng.standard_normal((t.size, x.size))
        # half the trials pair F with a function of itself, where Holder is nearly sharp
        G = np.abs(F) ** 2 * np.sign(F) if k % 2 else rng.standard_normal(F.shape)
        worst = max(worst, holder_pairing_ratio(F, G, h, h, tup))
    assert worst <= 1.1


def test_mixed_norm_separable_indicator():
    # for F(t, x) = a(t) b(x) the mixed norm factors
    x, t, h = _grid()
    a, b = np.exp(-((t - 2) ** 2)), np.exp(-((x - 4) ** 2))
    got = mixed_amalgam_norm(np.outer(a, b), h, h, 2, 3, 2, 4)
    want = amalgam_norm_1d(SampledSignal(a, 0, h), 2, 3) * amalgam_norm_1d(SampledSignal(b, 0, h), 2, 4)
    assert got == pytest.approx(want, rel=1e-12)
