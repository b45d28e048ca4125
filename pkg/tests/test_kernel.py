import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wienerwave.kernel import (ConeBandError, KernelMethod, KernelQuery, in_cone_band, kernel_closed_form_n3,
                               kernel_closed_form_offset, kernel_damped, kernel_eval, pointwise_bound,
                               verify_pointwise)

ORIGIN_VALUE = math.sqrt(math.pi / 2) / (2 * math.pi**2)


def test_query_validation():
    with pytest.raises(ValueError):
        KernelQuery(3, 3.5, 1, 0)
    with pytest.raises(ValueError):
        KernelQuery(3, 1.5, 0.0, 0)
    with pytest.raises(ValueError):
        KernelQuery(1, 0.5, 1, 0)


def test_damped_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        kernel_damped(KernelQuery(3, 1.5, 1, 0), 0.0)


def test_damping_is_monotone_at_t0():
    q = KernelQuery(3, 1.5, 1, 0)
    assert abs(kernel_damped(q, 10.0)) < abs(kernel_damped(q, 0.01))


def test_origin_value_three_routes():
    q = KernelQuery(3, 1.5, 1.0, 0.0)
    assert kernel_closed_form_n3(1.5, 1.0, 0.0) == pytest.approx(ORIGIN_VALUE, rel=1e-12)
    v = kernel_eval(q)
    assert v.method is KernelMethod.DAMPED_EXTRAPOLATED
    assert v.value == pytest.approx(ORIGIN_VALUE, rel=1e-8)
    assert v.abs_error_estimate >= 0
    assert kernel_damped(q, 1e-4) == pytest.approx(ORIGIN_VALUE, rel=1e-3)


def test_closed_form_real_at_t0():
    r = np.linspace(0.1, 5, 30)
    assert np.all(np.abs(kernel_closed_form_n3(1.5, r, 0.0).imag) == 0)


def test_closed_form_domain():
    with pytest.raises(ValueError):
        kernel_closed_form_n3(2.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        kernel_closed_form_n3(1.5, 1.0, 1.0)


def test_closed_form_large_t_rate():
    t = np.array([1e2, 1e3])
    vals = np.abs(kernel_closed_form_n3(1.5, 1.0, t))
    slope = np.log(vals[1] / vals[0]) / np.log(10)
    # both cone terms are |t|^{-1/2}; their difference is O(r |t|^{-3/2})
    assert slope == pytest.approx(-1.5, abs=0.01)


def test_offset_form_matches_and_stays_exact():
    t = 7.0
    u = np.array([-0.3, 1e-3, 0.4])
    assert np.allclose(kernel_closed_form_offset(1.6, t, t, u), kernel_closed_form_n3(1.6, t + u, t), rtol=1e-9)
    tiny = kernel_closed_form_offset(1.6, t, t, 1e-15)
    assert np.isfinite(tiny)


def test_cone_band():
    assert in_cone_band(1.02, 1.0)
    assert not in_cone_band(1.2, 1.0)
    with pytest.raises(ConeBandError):
        kernel_eval(KernelQuery(3, 1.5, 1.02, 1.0))
    # above (n+1)/2 the band is not enforced
    kernel_eval(KernelQuery(3, 2.5, 3.0, 2.95), tol=1e-6)


def test_conjugation_symmetry():
    a = kernel_eval(KernelQuery(3, 1.5, 2.0, 3.5)).value
    b = kernel_eval(KernelQuery(3, 1.5, 2.0, -3.5)).value
    assert b == pytest.approx(a.conjugate(), rel=1e-8)


def test_damped_matches_closed_form_on_twenty_points():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = rng.uniform(1.1, 1.9)
        r = rng.uniform(0.2, 6)
        t = rng.uniform(-8, 8)
        if abs(r - abs(t)) < 0.2:
            continue
        ref = kernel_closed_form_n3(g, r, t)
        val = kernel_eval(KernelQuery(3, g, r, t), band=0).value
        assert abs(val - ref) <= 1e-7 * abs(ref)


def test_pointwise_bound_values():
    assert pointwise_bound(KernelQuery(3, 1.5, 1, 4)) == pytest.approx(0.25)
    assert pointwise_bound(KernelQuery(3, 1.5, 4, 2)) == pytest.approx(4**-1 * 2**-0.5)
    assert pointwise_bound(KernelQuery(3, 1.5, 1, 0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pointwise_bound(KernelQuery(3, 2.5, 1, 0))
    assert pointwise_bound(KernelQuery(2, 0.75, 1, 0)) == pytest.approx(1.0)


def test_interior_decay_slope():
    t = np.geomspace(4, 64, 12)
    vals = np.abs(kernel_closed_form_n3(1.5, 1.0, t))
    assert np.polyfit(np.log(t), np.log(vals), 1)[0] <= -1 + 0.1


def test_verify_pointwise_single_point_and_empty():
    rep = verify_pointwise(3, 1.5, [(1.0, 0.0)])
    assert rep.max_ratio == pytest.approx(ORIGIN_VALUE, rel=1e-8)
    assert rep.argmax == (1.0, 0.0) and rep.grid_size == 1
    with pytest.raises(ValueError):
        verify_pointwise(3, 1.5, [])


def test_verify_pointwise_refinement_closed_form():
    ev = lambda q: kernel_closed_form_n3(q.gamma, q.radius, q.time)

    def grid(m):
        r = np.geomspace(0.05, 20, m)
        return [(a, b) for a in r for b in r if not in_cone_band(a, b)]

    for g in (1.2, 1.5, 1.8):
        base = verify_pointwise(3, g, grid(20), ev).max_ratio
        fine = verify_pointwise(3, g, grid(40), ev).max_ratio
        assert np.isfinite(base) and abs(fine / base - 1) <= 0.1


def test_verify_pointwise_deterministic_with_threads():
    pts = [(0.5, 2.0), (3.0, 1.0), (2.0, 0.1)]
    assert verify_pointwise(3, 1.5, pts) == verify_pointwise(3, 1.5, pts, threads=3)


@given(st.floats(1.05, 1.95), st.floats(0.2, 10), st.floats(-20, 20))
def test_closed_form_conjugation_property(g, r, t):
    if abs(abs(t) - r) < 1e-3:
        return
    a = kernel_closed_form_n3(g, r, t)
    b = kernel_closed_form_n3(g, r, -t)
    assert b == pytest.approx(np.conj(a), rel=1e-12, abs=1e-300)
