"""Radial wave propagation in three dimensions and the Duhamel fixed point.

Radial functions are handled through v(r) = r u(r), which turns the radial
Laplacian into d^2/dr^2 with v(0) = 0. On [0, L] with v(L) = 0 the sine
modes sin(w_j r), w_j = j pi / L, diagonalise it, and the type-I discrete
sine transform on r_i = i h, h = L / (N + 1), gives those modes exactly.

Norm conventions (f radial on R^3, y = DST-I(r f) with orthonormal scaling):

    ||f||_{L^2}^2      = 4 pi h sum_j |y_j|^2
    ||f||_{H^s dot}^2  = 4 pi h sum_j w_j^(2s) |y_j|^2
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.fft import dst
from scipy.special import zeta

from . import _quad
from .amalgam import RadialProfile, SampledSignal, Window, amalgam_norm_1d, radial_amalgam_norms
from .regions import ContractionPlan, ExponentTuple, duhamel_dual_indices, implied_sigma, life_span, nlw_admissible

__all__ = [
    "RadialGrid",
    "RadialState",
    "NonlinearityForm",
    "Nonlinearity",
    "SliceSeries",
    "AliasingError",
    "ContractionError",
    "to_spectral",
    "from_spectral",
    "half_wave",
    "wave_evolve",
    "sobolev_norm",
    "duhamel_apply",
    "mixed_norm",
    "fixed_point_solve",
    "FixedPointResult",
    "persistence_check",
    "leapfrog_solve",
    "dalembert_cos",
    "write_manifest",
    "write_snapshots",
]


class AliasingError(RuntimeError):
    """Evolved field carries too much mass near the outer boundary."""


class ContractionError(RuntimeError):
    """A Picard step expanded the distance between iterates."""


@dataclass(frozen=True)
class RadialGrid:
    length: float = 32.0
    modes: int = 4096

    def __post_init__(self):
        if not self.length > 0 or self.modes < 8:
            raise ValueError("need length > 0 and at least 8 modes")

    @property
    def h(self) -> float:
        return self.length / (self.modes + 1)

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(1, self.modes + 1)

    @property
    def omega(self) -> np.ndarray:
        return np.pi * np.arange(1, self.modes + 1) / self.length

    @classmethod
    def from_radii(cls, radii) -> "RadialGrid":
        radii = np.asarray(radii, dtype=float)
        n = radii.size
        h = radii[0]
        grid = cls(h * (n + 1), n)
        if not np.allclose(radii, grid.r, rtol=1e-12, atol=1e-12 * grid.length):
            raise ValueError("radii are not a sine-transform grid r_i = i h")
        return grid

    def profile(self, values, label: str = "") -> RadialProfile:
        return RadialProfile(self.r, np.asarray(values), label=label)

    def sample(self, func, label: str = "") -> RadialProfile:
        return self.profile(func(self.r), label)


def _grid_of(profile: RadialProfile) -> RadialGrid:
    return RadialGrid.from_radii(profile.radii)


def _dst(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return dst(a.real, type=1, norm="ortho", axis=-1) + 1j * dst(a.imag, type=1, norm="ortho", axis=-1)
    return dst(a, type=1, norm="ortho", axis=-1)


def to_spectral(values, grid: RadialGrid) -> np.ndarray:
    """Sine coefficients y of r u(r); works along the last axis."""
    return _dst(np.asarray(values) * grid.r)


def from_spectral(coeffs, grid: RadialGrid) -> np.ndarray:
    # DST-I with orthonormal scaling is its own inverse
    return _dst(coeffs) / grid.r


def _edge_check(values, grid: RadialGrid, tol: float, margin: float = 0.02):
    v = np.abs(np.asarray(values) * grid.r)
    total = np.sqrt(np.sum(v**2))
    if total == 0:
        return
    edge = grid.r > (1.0 - margin) * grid.length
    frac = np.sqrt(np.sum(v[..., edge] ** 2)) / total
    if frac > tol:
        raise AliasingError(f"relative L2 mass {frac:.2e} within {margin:.0%} of the boundary")


def half_wave(profile: RadialProfile, t: float, edge_tol: float = 1e-4) -> RadialProfile:
    """exp(i t sqrt(-Delta)) f for radial f sampled on a sine-transform grid."""
    grid = _grid_of(profile)
    y = to_spectral(profile.values, grid) * np.exp(1j * t * grid.omega)
    out = from_spectral(y, grid)
    _edge_check(out, grid, edge_tol)
    return grid.profile(out, profile.label)


def wave_evolve(f: RadialProfile, g: RadialProfile | None, times, edge_tol: float = 1e-6):
    """Linear wave solution cos(t w) f + sin(t w)/w g and its time derivative.

    Returns arrays (u, ut) of shape (len(times), N).
    """
    grid = _grid_of(f)
    w = grid.omega
    times = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    fy = to_spectral(f.values, grid)
    gy = np.zeros_like(fy) if g is None else to_spectral(g.values, grid)
    c, s = np.cos(times * w), np.sin(times * w)
    u = from_spectral(c * fy + s / w * gy, grid)
    ut = from_spectral(-w * s * fy + c * gy, grid)
    _edge_check(u, grid, edge_tol)
    return u, ut


def _sobolev_sq(values, grid: RadialGrid, s: float) -> np.ndarray:
    """Squared H^s norms along the last axis.

    The mode sum is a trapezoid rule for an integrand that behaves like
    c w^(2 + 2s) at w = 0; the leading generalized Euler-Maclaurin term
    zeta(-2 - 2s) c dw^(3 + 2s) is removed (it vanishes for integer s).
    """
    values = np.asarray(values)
    y = to_spectral(values, grid)
    total = 4.0 * np.pi * grid.h * np.sum(grid.omega ** (2 * s) * np.abs(y) ** 2, axis=-1)
    # small-w slope of the sine transform: w * sqrt(2/pi) * int r^2 u dr
    slope = np.sqrt(2.0 / np.pi) * grid.h * np.sum(grid.r**2 * values, axis=-1)
    dw = np.pi / grid.length
    return total - 4.0 * np.pi * zeta(-2.0 - 2.0 * s) * np.abs(slope) ** 2 * dw ** (3.0 + 2.0 * s)


def sobolev_norm(profile: RadialProfile, s: float) -> float:
    """Homogeneous H^s norm of a radial function on R^3, |s| < 3/2."""
    if not abs(s) < 1.5:
        raise ValueError("sobolev_norm needs |s| < 3/2")
    return float(np.sqrt(max(_sobolev_sq(profile.values, _grid_of(profile), s), 0.0)))


def _sobolev_rows(values, grid: RadialGrid, s: float) -> np.ndarray:
    return np.sqrt(np.maximum(_sobolev_sq(values, grid, s), 0.0))


class NonlinearityForm(str, Enum):
    POWER = "power"
    SIGNED_POWER = "signed_power"


@dataclass(frozen=True)
class Nonlinearity:
    """F(u) = sign u^k (integer k) or sign |u|^(k-1) u."""

    k: float
    form: NonlinearityForm = NonlinearityForm.SIGNED_POWER
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "form", NonlinearityForm(self.form))
        if not self.k > 1:
            raise ValueError("k must exceed 1")
        if self.sign not in (1, -1, 0):
            raise ValueError("sign must be +1, -1 (or 0 for the linear problem)")
        if self.form is NonlinearityForm.POWER and float(self.k) != int(self.k):
            raise ValueError("u^k needs an integer k; use the signed power otherwise")

    def __call__(self, u):
        u = np.asarray(u)
        if self.sign == 0:
            return np.zeros_like(u)
        if self.form is NonlinearityForm.POWER:
            return self.sign * u ** int(self.k)
        return self.sign * np.abs(u) ** (self.k - 1.0) * u


@dataclass(frozen=True)
class RadialState:
    u: RadialProfile
    ut: RadialProfile
    time: float = 0.0

    def __post_init__(self):
        if not np.array_equal(self.u.radii, self.ut.radii):
            raise ValueError("u and ut must share one radius grid")
        if not np.all(np.isfinite(self.u.values)):
            raise ValueError("u must be finite")


@dataclass
class SliceSeries:
    """Field values on uniform time slices times[m] = m T / M."""

    grid: RadialGrid
    times: np.ndarray
    values: np.ndarray
    velocities: np.ndarray | None = None

    def profile(self, m: int) -> RadialProfile:
        return self.grid.profile(self.values[m])

    def __len__(self):
        return self.times.size


def _lagrange_weights(stencil: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Weights L_k(x) for interpolation on integer stencil points."""
    out = np.ones((x.size, stencil.size))
    for k, sk in enumerate(stencil):
        for j, sj in enumerate(stencil):
            if j != k:
                out[:, k] *= (x - sj) / (sk - sj)
    return out


def _duhamel_integrals(Fy: np.ndarray, times: np.ndarray, omega: np.ndarray, nodes: int = 12):
    """Cumulative C_m = int_0^{t_m} cos(w s) F(s) ds and S_m (sine), all modes.

    F between slices is the cubic through the four nearest slices; the
    oscillatory factor is integrated against it with Gauss-Legendre nodes.
    """
    M = times.size - 1
    dt = times[1] - times[0]
    x, wx = _quad.gauss_legendre(nodes)
    C = np.zeros((M + 1, omega.size), dtype=Fy.dtype)
    S = np.zeros_like(C)
    width = min(4, M + 1)
    for i in range(M):
        start = min(max(i - 1, 0), M + 1 - width)
        stencil = np.arange(start, start + width) - i
        L = _lagrange_weights(stencil.astype(float), x)
        Fn = L @ Fy[start:start + width]
        s = (times[i] + dt * x)[:, None]
        wq = (dt * wx)[:, None]
        C[i + 1] = C[i] + np.sum(wq * np.cos(omega * s) * Fn, axis=0)
        S[i + 1] = S[i] + np.sum(wq * np.sin(omega * s) * Fn, axis=0)
    return C, S


def duhamel_apply(state0: RadialState, u_guess, F: Nonlinearity, T: float, slices: int = 64,
                  edge_tol: float = 1e-6) -> SliceSeries:
    """Phi(u) = cos(t w) f + sin(t w)/w g + int_0^t sin((t-s) w)/w F(u(s)) ds.

    ``u_guess`` is a SliceSeries on the same slices, an array of shape
    (slices + 1, N), or None for u = 0. The time derivative is returned in
    ``velocities``.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    grid = _grid_of(state0.u)
    times = np.linspace(0.0, T, slices + 1)
    lin_u, lin_ut = wave_evolve(state0.u, state0.ut, times, edge_tol)
    if u_guess is None:
        guess = np.zeros((slices + 1, grid.modes))
    else:
        guess = np.asarray(u_guess.values if isinstance(u_guess, SliceSeries) else u_guess)
        if guess.shape != (slices + 1, grid.modes):
            raise ValueError(f"u_guess must have shape {(slices + 1, grid.modes)}")
    forcing = F(guess)
    if not np.any(forcing):
        return SliceSeries(grid, times, lin_u, lin_ut)
    w = grid.omega
    Fy = to_spectral(forcing, grid)
    C, S = _duhamel_integrals(Fy, times, w)
    tw = times[:, None] * w
    sin_t, cos_t = np.sin(tw), np.cos(tw)
    duh = from_spectral((sin_t * C - cos_t * S) / w, grid)
    duh_t = from_spectral(cos_t * C + sin_t * S, grid)
    u = lin_u + duh
    _edge_check(u, grid, edge_tol)
    return SliceSeries(grid, times, u, lin_ut + duh_t)


def mixed_norm(series: SliceSeries, tuple_: ExponentTuple, window: Window = Window(),
               spatial_cutoff: float | None = None) -> float:
    """||u||_{W(q~, q)_t W(r~, r)_x} over the stored slices, zero outside [0, T]."""
    grid = series.grid
    values = series.values
    radii = grid.r
    if spatial_cutoff is not None:
        keep = radii <= spatial_cutoff
        values, radii = values[:, keep], radii[keep]
    spatial = radial_amalgam_norms(values, radii, tuple_.r_tilde, tuple_.r, window)
    dt = series.times[1] - series.times[0]
    return amalgam_norm_1d(SampledSignal(spatial, series.times[0], dt), tuple_.q_tilde, tuple_.q, window)


@dataclass
class FixedPointResult:
    solution: SliceSeries
    iterations: int
    contraction_ratios: list[float]
    differences: list[float]
    plan: ContractionPlan
    sigma: float
    data_norm: float
    converged: bool
    f: RadialProfile = field(repr=False)
    g: RadialProfile = field(repr=False)


def fixed_point_solve(f: RadialProfile, g: RadialProfile, F: Nonlinearity, tuple_: ExponentTuple,
                      C: float = 1.0, slices: int = 64, tol: float = 1e-8, max_iter: int = 50,
                      window: Window = Window(), edge_tol: float = 1e-6) -> FixedPointResult:
    """Picard iteration u <- Phi(u) from u = 0 on [0, T], T from the life-span rule."""
    if not nlw_admissible(tuple_, _as_fraction(F.k)):
        raise ValueError(f"tuple {tuple_.as_strings()} with k={F.k} is outside the well-posedness range")
    sigma = float(implied_sigma(tuple_))
    data_norm = sobolev_norm(f, sigma) + sobolev_norm(g, sigma - 1.0)
    duals = duhamel_dual_indices(tuple_, _as_fraction(F.k))
    plan = life_span(C, data_norm, _as_fraction(F.k), duals.q0_tilde)
    state0 = RadialState(f, g)

    current = duhamel_apply(state0, None, F, plan.T, slices, edge_tol)
    zero = np.zeros_like(current.values)
    prev_values = zero
    ratios: list[float] = []
    diffs: list[float] = []
    iterations = 1
    converged = False
    while True:
        step = SliceSeries(current.grid, current.times, current.values - prev_values)
        d = mixed_norm(step, tuple_, window)
        scale = mixed_norm(current, tuple_, window)
        if diffs and diffs[-1] > 0:
            ratios.append(d / diffs[-1])
            if ratios[-1] > 1:
                raise ContractionError(f"Picard step {iterations} expanded by {ratios[-1]:.3f}")
        diffs.append(d)
        if d <= tol * max(scale, 1e-300) or d == 0:
            converged = True
            break
        if iterations >= max_iter:
            break
        prev_values = current.values
        current = duhamel_apply(state0, current, F, plan.T, slices, edge_tol)
        iterations += 1
    return FixedPointResult(current, iterations, ratios, diffs, plan, sigma, data_norm, converged, f, g)


def _as_fraction(k):
    from fractions import Fraction

    return Fraction(k).limit_denominator(10_000)


def persistence_check(result: FixedPointResult) -> dict:
    """Sup over slices of ||u||_{H^sigma} and ||u_t||_{H^(sigma-1)} over the data norm."""
    sol = result.solution
    s = result.sigma
    sup_u = float(np.max(_sobolev_rows(sol.values, sol.grid, s)))
    sup_ut = float(np.max(_sobolev_rows(sol.velocities, sol.grid, s - 1.0)))
    denom = result.data_norm
    ratio = max(sup_u, sup_ut) / denom if denom > 0 else 0.0
    return {"sup_Hsigma": sup_u, "sup_Hsigma_minus_1": sup_ut, "data_norm_ratio": ratio}


def dalembert_cos(f_func, r, t):
    """cos(t sqrt(-Delta)) f for radial f: v = r u solves the 1-D wave equation with odd data."""
    r = np.asarray(r, dtype=float)

    def v0(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        return np.sign(x) * ax * f_func(ax)

    return 0.5 * (v0(r + t) + v0(r - t)) / r


def leapfrog_solve(f: RadialProfile, g: RadialProfile | None, F: Nonlinearity, T: float,
                   refine: int = 4, courant: float = 0.5) -> np.ndarray:
    """u(T) from second-order finite differences for v_tt = v_rr + r F(v / r).

    The finite-difference grid subdivides the sine-transform grid ``refine``
    times; data are interpolated onto it and the result is sampled back.
    """
    grid = _grid_of(f)
    fine = RadialGrid(grid.length, refine * (grid.modes + 1) - 1)
    r = fine.r
    h = fine.h

    def lift(profile):
        if profile is None:
            return np.zeros_like(r)
        return np.interp(r, np.concatenate([[0.0], grid.r, [grid.length]]),
                         np.concatenate([[0.0], grid.r * profile.values.real, [0.0]]))

    v = lift(f)
    vt = lift(g)
    steps = max(1, int(np.ceil(T / (courant * h))))
    dt = T / steps

    def accel(v):
        lap = np.empty_like(v)
        lap[1:-1] = v[2:] - 2 * v[1:-1] + v[:-2]
        lap[0] = v[1] - 2 * v[0]
        lap[-1] = v[-2] - 2 * v[-1]
        return lap / h**2 + r * F(v / r)

    prev = v
    cur = v + dt * vt + 0.5 * dt**2 * accel(v)
    for _ in range(steps - 1):
        prev, cur = cur, 2 * cur - prev + dt**2 * accel(cur)
    return cur[refine - 1::refine] / grid.r


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def write_manifest(path, result: FixedPointResult, tuple_: ExponentTuple, F: Nonlinearity,
                   data_description: str = "") -> Path:
    """JSON run manifest: data, tuple, k, C, plan, Picard ratios and final norms."""
    path = Path(path)
    plan = result.plan
    doc = {
        "schema_version": 1,
        "data": data_description,
        "tuple": tuple_.as_strings(),
        "k": str(_as_fraction(F.k)),
        "nonlinearity": {"form": F.form.value, "sign": F.sign},
        "C": plan.C,
        "plan": {"M": plan.M, "T": plan.T, "q0_tilde": str(plan.q0_tilde), "k": str(plan.k)},
        "sigma": result.sigma,
        "data_norm": result.data_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "contraction_ratios": result.contraction_ratios,
        "differences": result.differences,
        "persistence": persistence_check(result),
    }
    path.write_text(json.dumps(doc, indent=2, default=_jsonable) + "\n", encoding="utf-8")
    return path


def write_snapshots(directory, series: SliceSeries, every: int = 16) -> list[Path]:
    """CSV files (radius, re_u, im_u), one per stored time slice taken every ``every`` slices."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for m in range(0, len(series), every):
        p = directory / f"snapshot_{m:04d}.csv"
        vals = np.asarray(series.values[m])
        with p.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", repr(float(series.times[m]))])
            w.writerow(["radius", "re_u", "im_u"])
            for r, v in zip(series.grid.r, vals):
                w.writerow([repr(float(r)), repr(float(np.real(v))), repr(float(np.imag(v)))])
        out.append(p)
    return out
