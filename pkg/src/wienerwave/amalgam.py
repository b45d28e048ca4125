"""Discrete Wiener amalgam norms W(p, q).

Two settings are covered:

* one dimension (time), for uniformly sampled signals, with lattice
  translates of a compactly supported window;
* radial functions in three dimensions, where the local norm
  ||f tau_y phi||_p depends on |y| only and reduces exactly to a
  one-dimensional integral in the shell radius s,

      ||f tau_y phi||_p^p = int |f(s)|^p w(s, rho) ds,
      w(s, rho) = (2 pi s / rho) (Psi(min(s + rho, R)) - Psi(|s - rho|)),

  with Psi(x) = int_0^x phi(d)^p d dd and rho = |y|.

Radial profiles may carry an exact evaluator and a list of algebraic
singularities; the quadrature then grades toward each singular radius
and evaluates the profile by offset from it, which keeps integrable
singularities such as |s - t|^(-0.96) accurate to many digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.interpolate import CubicHermiteSpline

from . import _quad
from .regions import ExtendedRational

__all__ = [
    "WindowProfile",
    "Window",
    "SampledSignal",
    "RadialProfile",
    "weak_lorentz_norm",
    "lp_norm_1d",
    "amalgam_norm_1d",
    "windowed_lp_radial",
    "amalgam_norm_radial",
    "radial_amalgam_norms",
    "annulus_mass",
    "amalgam_surrogate_radial",
    "mixed_amalgam_norm",
    "holder_pairing_ratio",
]


def _exponent(p) -> float:
    """Float value of an exponent; accepts numbers, Fractions, strings, ExtendedRational."""
    if isinstance(p, (int, float, np.floating, np.integer)) and not isinstance(p, bool):
        val = float(p)
    else:
        val = float(ExtendedRational(p))
    if not val > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return val


class WindowProfile(str, Enum):
    SMOOTH_BUMP = "smooth_bump"
    COSINE_TAPER = "cosine_taper"
    INDICATOR = "indicator"


@dataclass(frozen=True)
class Window:
    """Radial window phi(|x|) supported in |x| <= support_radius.

    ``taper`` is the fraction of the radius over which the cosine taper falls
    from 1 to 0. With ``l2_normalized`` the window has unit L2 norm in the
    dimension it is evaluated in.
    """

    support_radius: float = 1.0
    profile: WindowProfile = WindowProfile.SMOOTH_BUMP
    l2_normalized: bool = True
    taper: float = 0.5

    def __post_init__(self):
        if not self.support_radius > 0:
            raise ValueError("support_radius must be positive")
        object.__setattr__(self, "profile", WindowProfile(self.profile))
        if not 0 < self.taper <= 1:
            raise ValueError("taper must lie in (0, 1]")

    def shape(self, d):
        """Unnormalized profile at distance d >= 0."""
        x = np.abs(np.asarray(d, dtype=float)) / self.support_radius
        out = np.zeros_like(x)
        inside = x < 1
        if self.profile is WindowProfile.SMOOTH_BUMP:
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        elif self.profile is WindowProfile.COSINE_TAPER:
            flat = 1.0 - self.taper
            ramp = inside & (x > flat)
            out[inside] = 1.0
            out[ramp] = 0.5 * (1.0 + np.cos(np.pi * (x[ramp] - flat) / self.taper))
        else:
            out[x <= 1] = 1.0
        return out

    def _breaks(self):
        R = self.support_radius
        if self.profile is WindowProfile.COSINE_TAPER:
            return [0.0, R * (1.0 - self.taper), R]
        return [0.0, R]

    def normalization(self, dimension: int = 1) -> float:
        if not self.l2_normalized:
            return 1.0
        return _window_constant(self, dimension)

    def __call__(self, d, dimension: int = 1):
        return self.normalization(dimension) * self.shape(d)

    def radial_moment(self, p: float, dimension: int = 3) -> float:
        """int phi(|x|)^p dx over R^dimension."""
        return _moment(self, float(p), dimension)


def _shape_integral(window: Window, weight: Callable, n: int = 40) -> float:
    br = window._breaks()
    edges = np.concatenate([np.linspace(a, b, 9)[:-1] for a, b in zip(br[:-1], br[1:])] + [[br[-1]]])
    # the bump is flat to all orders at R, so plain panels converge fast
    x, w = _quad.panels(np.unique(edges), n)
    return float(np.sum(w * weight(x)))


@lru_cache(maxsize=None)
def _moment(window: Window, p: float, dimension: int) -> float:
    c = window.normalization(dimension)
    if dimension == 1:
        return 2.0 * _shape_integral(window, lambda d: (c * window.shape(d)) ** p)
    if dimension == 3:
        return 4.0 * np.pi * _shape_integral(window, lambda d: (c * window.shape(d)) ** p * d**2)
    raise ValueError("windows are implemented for dimensions 1 and 3")


@lru_cache(maxsize=None)
def _window_constant(window: Window, dimension: int) -> float:
    raw = Window(window.support_radius, window.profile, False, window.taper)
    return 1.0 / np.sqrt(_moment(raw, 2.0, dimension))


@lru_cache(maxsize=64)
def _psi(window: Window, p: float):
    """Psi(x) = int_0^x phi(d)^p d dd as a cubic Hermite interpolant on [0, R]."""
    R = window.support_radius
    c = window.normalization(3)
    dens = lambda d: (c * window.shape(d)) ** p * d  # noqa: E731
    knots = np.linspace(0.0, R, 2049)
    x, w = _quad.gauss_legendre(8)
    h = np.diff(knots)[:, None]
    cells = np.sum(h * w * dens(knots[:-1, None] + h * x), axis=1)
    values = np.concatenate([[0.0], np.cumsum(cells)])
    spline = CubicHermiteSpline(knots, values, dens(knots))

    def psi(v):
        v = np.clip(v, 0.0, R)
        return spline(v)

    return psi


@dataclass(frozen=True)
class SampledSignal:
    samples: np.ndarray
    grid_start: float = 0.0
    grid_step: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        object.__setattr__(self, "samples", arr)

    @property
    def grid(self) -> np.ndarray:
        return self.grid_start + self.grid_step * np.arange(self.samples.size)

    def __len__(self):
        return self.samples.size


def weak_lorentz_norm(signal: SampledSignal, q) -> float:
    """sup_k v_(k) (k step)^(1/q) with v_(k) the k-th largest sample."""
    v = np.asarray(signal.samples)
    if np.iscomplexobj(v) or np.any(v < 0):
        raise ValueError("weak_lorentz_norm expects nonnegative values")
    qq = ExtendedRational(q) if not isinstance(q, (int, float)) else q
    if isinstance(qq, ExtendedRational) and qq.infinite_flag:
        inv_q = 0.0
    else:
        inv_q = 1.0 / _exponent(q)
    if v.size == 0:
        return 0.0
    desc = np.sort(v)[::-1]
    k = np.arange(1, v.size + 1)
    return float(np.max(desc * (k * signal.grid_step) ** inv_q))


def _is_inf(p) -> bool:
    if isinstance(p, (int, float, np.floating)) and not isinstance(p, bool):
        return np.isinf(p)
    return ExtendedRational(p).infinite_flag


def lp_norm_1d(values, step: float, p) -> float:
    """Riemann-sum L^p norm of uniformly sampled values."""
    a = np.abs(np.asarray(values))
    if a.size == 0:
        return 0.0
    if _is_inf(p):
        return float(a.max())
    pp = _exponent(p)
    m = a.max()
    if m == 0:
        return 0.0
    # scale by the max so a**pp neither underflows nor overflows
    return float(m * (np.sum((a / m) ** pp) * step) ** (1.0 / pp))


def _local_norms_1d(signal: SampledSignal, inner_p, window: Window):
    x0, h = signal.grid_start, signal.grid_step
    R = window.support_radius
    v = signal.samples
    end = x0 + h * (v.size - 1)
    k_lo = int(np.floor((x0 - R) / R))
    k_hi = int(np.ceil((end + R) / R))
    out = []
    for k in range(k_lo, k_hi + 1):
        centre = k * R
        i0 = max(0, int(np.ceil((centre - R - x0) / h)))
        i1 = min(v.size, int(np.floor((centre + R - x0) / h)) + 1)
        if i1 <= i0:
            out.append(0.0)
            continue
        xs = x0 + h * np.arange(i0, i1)
        out.append(lp_norm_1d(v[i0:i1] * window(xs - centre, 1), h, inner_p))
    return np.array(out), R


def amalgam_norm_1d(signal: SampledSignal, inner_p, outer_q, window: Window = Window(),
                    outer_weak: bool = False) -> float:
    """||f||_{W(p, q)} with lattice translates k * R of the window, R its radius."""
    if len(signal) == 0:
        raise ValueError("empty signal")
    g, step = _local_norms_1d(signal, inner_p, window)
    if outer_weak:
        return weak_lorentz_norm(SampledSignal(g, 0.0, step), outer_q)
    return lp_norm_1d(g, step, outer_q)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function f(|x|) on [0, radii[-1]], zero beyond.

    ``func`` is an optional exact evaluator used by the quadratures instead
    of linear interpolation of the samples. ``singularities`` lists
    (radius, exponent) pairs with |f(s)| ~ |s - radius|^exponent nearby, and
    ``offset_func(anchor, u)`` evaluates f(anchor + u) without forming the
    sum, which matters when |u| is far below the spacing of floats near
    ``anchor``.
    """

    radii: np.ndarray
    values: np.ndarray
    dimension: int = 3
    func: Callable | None = None
    singularities: tuple = ()
    offset_func: Callable | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values)
        if r.ndim != 1 or r.size < 2 or v.shape != r.shape:
            raise ValueError("radii and values must be matching 1-D arrays of length >= 2")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        if self.dimension != 3:
            raise ValueError("radial profiles are implemented for dimension 3")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v.astype(complex) if np.iscomplexobj(v) else v.astype(float))
        sing = tuple(sorted((float(a), float(e)) for a, e in self.singularities))
        object.__setattr__(self, "singularities", sing)

    @property
    def support_end(self) -> float:
        return float(self.radii[-1])

    @classmethod
    def from_function(cls, func, radii, singularities=(), offset_func=None, label=""):
        radii = np.asarray(radii, dtype=float)
        return cls(radii, func(radii), 3, func, singularities, offset_func, label)

    def scaled(self, c) -> "RadialProfile":
        f = None if self.func is None else (lambda s, f=self.func: c * f(s))
        o = None if self.offset_func is None else (lambda a, u, o=self.offset_func: c * o(a, u))
        return RadialProfile(self.radii, c * self.values, 3, f, self.singularities, o, self.label)

    def evaluate(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= self.radii[0]) & (s <= self.support_end)
        if self.func is not None:
            vals = np.asarray(self.func(s[inside]))
            out = np.zeros(s.shape, dtype=np.result_type(vals, float))
            out[inside] = vals
            return out
        if np.iscomplexobj(self.values):
            out = np.interp(s, self.radii, self.values.real) + 1j * np.interp(s, self.radii, self.values.imag)
        else:
            out = np.interp(s, self.radii, self.values)
        return np.where(inside, out, 0.0)

    def evaluate_near(self, anchor: float, offset):
        offset = np.asarray(offset, dtype=float)
        if self.offset_func is not None:
            s = anchor + offset
            inside = (s >= self.radii[0]) & (s <= self.support_end)
            val = np.asarray(self.offset_func(anchor, offset))
            return np.where(inside, val, 0.0)
        return self.evaluate(anchor + offset)


def _abs_pow(profile: RadialProfile, anchors, offsets, p):
    out = np.empty(offsets.shape)
    for a in np.unique(anchors):
        m = anchors == a
        out[m] = np.abs(profile.evaluate_near(float(a), offsets[m])) ** p
    return out


def _shell_rule(profile: RadialProfile, lo: float, hi: float, p: float, panel_width: float,
                origin_power: float = 2.0):
    """(anchor, offset, weight) nodes on [lo, hi] graded at singular radii.

    ``origin_power`` is the power of s the shell weight vanishes like at
    s = 0, used when 0 is itself singular.
    """
    hi = min(hi, profile.support_end)
    if hi <= lo:
        return np.empty(0), np.empty(0), np.empty(0)
    sing = {a: e for a, e in profile.singularities if lo <= a <= hi}
    points = sorted({lo, hi, *sing})
    parts = []
    for a, b in zip(points[:-1], points[1:]):
        def beta(x):
            if x not in sing:
                return None
            return p * sing[x] + (origin_power if x == 0 else 0.0)
        parts.append(_quad.interval_rule(a, b, beta(a), beta(b), panel_width))
    return tuple(np.concatenate(c) for c in zip(*parts))


def _shell_weight(s, rho, window: Window, p: float):
    """Measure of {x : |x| = s} weighted by phi(|x - y|)^p, |y| = rho (per ds)."""
    R = window.support_radius
    if rho <= 1e-9 * R:
        c = window.normalization(3)
        return 4.0 * np.pi * s**2 * (c * window.shape(s)) ** p
    psi = _psi(window, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (2.0 * np.pi * s / rho) * (psi(np.minimum(s + rho, R)) - psi(np.abs(s - rho)))
    return np.where(np.abs(s - rho) < R, np.maximum(w, 0.0), 0.0)


def _check_dim(profile: RadialProfile):
    if profile.dimension != 3:
        raise ValueError("radial amalgam norms need dimension 3")


def _local_power(profile: RadialProfile, rho: float, p: float, window: Window) -> float:
    R = window.support_radius
    lo, hi = max(0.0, rho - R), rho + R
    anchors, offsets, weights = _shell_rule(profile, lo, hi, p, panel_width=R / 2)
    if weights.size == 0:
        return 0.0
    s = anchors + offsets
    vals = _abs_pow(profile, anchors, offsets, p)
    return float(np.sum(weights * vals * _shell_weight(s, rho, window, p)))


def windowed_lp_radial(profile: RadialProfile, center_distance: float, p, window: Window = Window()) -> float:
    """||f tau_y phi||_{L^p(R^3)} for |y| = center_distance, by exact shell reduction."""
    _check_dim(profile)
    pp = _exponent(p)
    if center_distance < 0:
        raise ValueError("center_distance must be nonnegative")
    return _local_power(profile, float(center_distance), pp, window) ** (1.0 / pp)


def _outer_rule(profile: RadialProfile, reach: float, near_panel: float, breaks=()):
    """Nodes in rho for int_0^{end + reach} (...) rho^2 d rho.

    Uniform panels cover the region around the origin and all singular
    radii; beyond it, panels grow geometrically out to the support end.
    """
    end = profile.support_end + reach
    sing = [a for a, _ in profile.singularities] + [0.0]
    near_end = min(end, max(sing) + 2.0 * reach)
    points = sorted({0.0, near_end, *[b for b in breaks if 0 < b < near_end]})
    nodes, weights = [], []
    for a, b in zip(points[:-1], points[1:]):
        count = max(1, int(np.ceil((b - a) / near_panel)))
        x, w = _quad.panels(np.linspace(a, b, count + 1), 8)
        nodes.append(x)
        weights.append(w)
    if end > near_end:
        ratio = 1.25
        count = max(1, int(np.ceil(np.log(end / near_end) / np.log(ratio))))
        x, w = _quad.panels(np.geomspace(near_end, end, count + 1), 8)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _trapezoid_weights(radii):
    d = np.diff(radii)
    w = np.zeros_like(radii)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


@lru_cache(maxsize=16)
def _sampled_operator(radii_key: bytes, n: int, p: float, window: Window):
    """Sparse A with (A |f|^p)[i] = g(rho_i)^p, plus the outer rho-rule."""
    radii = np.frombuffer(radii_key, dtype=float, count=n)
    R = window.support_radius
    stub = RadialProfile(radii, np.zeros(n))
    rho, w_rho = _outer_rule(stub, R, R / 4)
    tw = _trapezoid_weights(radii)
    rows, cols, vals = [], [], []
    for i, r in enumerate(rho):
        j0 = np.searchsorted(radii, r - R, side="left")
        j1 = np.searchsorted(radii, r + R, side="right")
        if j1 <= j0:
            continue
        s = radii[j0:j1]
        rows.append(np.full(j1 - j0, i))
        cols.append(np.arange(j0, j1))
        vals.append(tw[j0:j1] * _shell_weight(s, r, window, p))
    A = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(rho.size, n)
    )
    return A, rho, w_rho


def radial_amalgam_norms(values, radii, inner_p, outer_q, window: Window = Window()) -> np.ndarray:
    """Radial W(p, q) norms of many sampled profiles sharing one radius grid.

    ``values`` has shape (..., len(radii)). Integration in the shell radius
    is by the trapezoid rule on the samples; the profile is zero beyond the
    last radius.
    """
    radii = np.ascontiguousarray(radii, dtype=float)
    values = np.asarray(values)
    p, q = _exponent(inner_p), _exponent(outer_q)
    A, rho, w_rho = _sampled_operator(radii.tobytes(), radii.size, p, window)
    flat = np.abs(values.reshape(-1, radii.size)) ** p
    g_p = np.maximum((A @ flat.T).T, 0.0)
    total = 4.0 * np.pi * (g_p ** (q / p)) @ (w_rho * rho**2)
    return (total ** (1.0 / q)).reshape(values.shape[:-1])


def amalgam_norm_radial(profile: RadialProfile, inner_p, outer_q, window: Window = Window()) -> float:
    """(4 pi int_0^inf g(rho)^q rho^2 d rho)^(1/q), g(rho) = windowed_lp_radial(f, rho, p).

    Profiles with an exact evaluator are integrated by graded quadrature;
    purely sampled profiles go through :func:`radial_amalgam_norms`.
    """
    _check_dim(profile)
    if profile.func is None:
        return float(radial_amalgam_norms(profile.values, profile.radii, inner_p, outer_q, window))
    p, q = _exponent(inner_p), _exponent(outer_q)
    R = window.support_radius
    rho, w = _outer_rule(profile, R, R / 4)
    g_p = np.array([_local_power(profile, r, p, window) for r in rho])
    total = 4.0 * np.pi * np.sum(w * np.maximum(g_p, 0.0) ** (q / p) * rho**2)
    return float(total ** (1.0 / q))


def annulus_mass(profile: RadialProfile, rho: float, p) -> float:
    """int over max(0, rho - 1) <= |x| <= rho + 1 of |f|^p dx."""
    _check_dim(profile)
    pp = _exponent(p)
    anchors, offsets, weights = _shell_rule(profile, max(0.0, rho - 1.0), rho + 1.0, pp, 0.5)
    if weights.size == 0:
        return 0.0
    s = anchors + offsets
    return float(np.sum(weights * _abs_pow(profile, anchors, offsets, pp) * 4.0 * np.pi * s**2))


def _graded_outer(points, end):
    """rho-rule with geometric grading on both sides of each break point."""
    pts = sorted({p for p in points if 0 <= p <= end} | {0.0, end})
    nodes, weights = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + b)
        for anchor, sign, length in ((a, 1.0, mid - a), (b, -1.0, b - mid)):
            u, w = _quad.graded(length, 0.0, n=8, levels=16)
            nodes.append(anchor + sign * u)
            weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def amalgam_surrogate_radial(profile: RadialProfile, inner_p, outer_q, parts: bool = False):
    """Annulus surrogate (A + B)^(1/q) for the radial amalgam norm.

    A = int_{|y|<=1} I(|y|)^(q/p) dy, B = int_{|y|>=1} (|y|^-2 I(|y|))^(q/p) dy,
    with I the annulus mass at exponent p. With ``parts`` the pair (A, B)
    is returned instead.
    """
    _check_dim(profile)
    p, q = _exponent(inner_p), _exponent(outer_q)
    ratio = q / p
    end = profile.support_end + 1.0
    breaks = [1.0]
    for a, _ in profile.singularities:
        breaks += [a - 1.0, a + 1.0]
    breaks.append(profile.support_end - 1.0)
    near = sorted(b for b in breaks if 0 < b < end)
    far_start = max(near + [1.0]) + 1.0
    rho_n, w_n = _graded_outer(near + [min(far_start, end)], min(far_start, end))
    rho_list, w_list = [rho_n], [w_n]
    if end > far_start:
        count = max(1, int(np.ceil(np.log(end / far_start) / np.log(1.25))))
        x, w = _quad.panels(np.geomspace(far_start, end, count + 1), 8)
        rho_list.append(x)
        w_list.append(w)
    rho = np.concatenate(rho_list)
    w = np.concatenate(w_list)
    mass = np.array([annulus_mass(profile, r, p) for r in rho])
    inner = rho <= 1.0
    a_part = 4.0 * np.pi * np.sum((w * mass**ratio * rho**2)[inner])
    b_part = 4.0 * np.pi * np.sum((w * (mass / rho**2) ** ratio * rho**2)[~inner])
    if parts:
        return float(a_part), float(b_part)
    return float((a_part + b_part) ** (1.0 / q))


def _check_field(F, dx, dt):
    F = np.asarray(F)
    if F.ndim != 2:
        raise ValueError("fields must be 2-D arrays indexed (t, x)")
    if not (dx > 0 and dt > 0):
        raise ValueError("grid steps must be positive")
    return F


def mixed_amalgam_norm(F, dx: float, dt: float, q_tilde, q, r_tilde, r,
                       window: Window = Window(), x_start: float = 0.0, t_start: float = 0.0) -> float:
    """||F||_{W(q~, q)_t W(r~, r)_x} for a field sampled on a uniform (t, x) grid."""
    F = _check_field(F, dx, dt)
    spatial = np.array([amalgam_norm_1d(SampledSignal(row, x_start, dx), r_tilde, r, window) for row in F])
    return amalgam_norm_1d(SampledSignal(spatial, t_start, dt), q_tilde, q, window)


def holder_pairing_ratio(F, G, dx: float, dt: float, tuple_, window: Window = Window()) -> float:
    """|<F, G>| / (||F||_{W(q~,q)W(r~,r)} ||G||_{W(q~',q')W(r~',r')}).

    The windowed norms are taken with phi^2 summing to one over the lattice
    on average, so the ratio stays near or below one.
    """
    F = _check_field(F, dx, dt)
    G = _check_field(G, dx, dt)
    if F.shape != G.shape:
        raise ValueError("F and G must share one grid")
    t = tuple_
    pairing = abs(np.sum(F * np.conj(G)) * dx * dt)
    if pairing == 0:
        return 0.0
    nf = mixed_amalgam_norm(F, dx, dt, t.q_tilde, t.q, t.r_tilde, t.r, window)
    ng = mixed_amalgam_norm(G, dx, dt, t.q_tilde.conjugate(), t.q.conjugate(),
                            t.r_tilde.conjugate(), t.r.conjugate(), window)
    return float(pairing / (nf * ng))
