"""Numerical experiments on kernel decay, windowed time norms and scaling.

The kernel norms h(t) = ||K_gamma(., t)||_{W(r~/2, r/2)} are evaluated for
n = 3 with the closed form of the kernel as the profile evaluator; a few
radii per time are cross-checked against the damped-integral evaluator.
Profiles are truncated at radius ``truncation * max(t, 1)``. The tail of
|K| decays like s^(gamma - 4), so with the exponents used here the
truncation moves the norm by far less than the fit tolerances, and the
fitted slopes do not depend on the factor.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _quad
from .amalgam import (RadialProfile, SampledSignal, Window, amalgam_norm_1d, amalgam_norm_radial,
                      amalgam_surrogate_radial, radial_amalgam_norms)
from .kernel import (CONE_BAND, KernelQuery, in_cone_band, kernel_closed_form_n3,
                     kernel_closed_form_offset, kernel_eval)
from .nlw import RadialGrid, from_spectral, sobolev_norm, to_spectral, _edge_check
from .regions import (ExponentTuple, ExtendedRational, corollary_admissible, decay_exponents,
                      propfix_admissible, thm1_admissible, thm2_admissible)

__all__ = [
    "Estimator",
    "Regime",
    "DecayFit",
    "ExperimentConfig",
    "NormTable",
    "SpotCheckError",
    "CoverageError",
    "kernel_profile",
    "kernel_time_profile",
    "fit_decay",
    "DecayReport",
    "decay_experiment",
    "windowed_time_norm_profile",
    "strichartz_quotient",
    "retarded_norm_check",
    "write_norm_csv",
    "write_summary_json",
    "SMALL_T_GRID",
    "LARGE_T_GRID",
]

SMALL_T_GRID = np.geomspace(1.0 / 64.0, 0.5, 12)
LARGE_T_GRID = np.geomspace(4.0, 64.0, 12)
SCHEMA_VERSION = 1


class Estimator(str, Enum):
    DIRECT = "direct"
    SURROGATE = "surrogate"


class Regime(str, Enum):
    SMALL_T = "small_t"
    LARGE_T = "large_t"


class SpotCheckError(RuntimeError):
    """Closed-form profile disagrees with the damped-integral evaluator."""


class CoverageError(ValueError):
    """A table does not cover the requested range."""


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual_rms: float
    fit_range: tuple[float, float]
    points: int

    def __post_init__(self):
        if self.points < 8:
            raise ValueError("a decay fit needs at least 8 points")


@dataclass(frozen=True)
class ExperimentConfig:
    """One kernel-norm sweep.

    ``r`` and ``r_tilde`` are the Strichartz indices; the kernel norm uses
    inner exponent r~/2 and outer exponent r/2. With ``validate`` off the
    admissibility check is skipped, which is meant for diagnostics outside
    the proven range only.
    """

    gamma: ExtendedRational
    r: ExtendedRational
    r_tilde: ExtendedRational
    t_grid: np.ndarray = field(default_factory=lambda: LARGE_T_GRID.copy())
    estimator: Estimator = Estimator.DIRECT
    n: int = 3
    truncation: float = 1000.0
    radius_samples: int = 400
    spot_checks: int = 2
    spot_tol: float = 1e-6
    window: Window = Window()
    validate: bool = True

    def __post_init__(self):
        for name in ("gamma", "r", "r_tilde"):
            object.__setattr__(self, name, ExtendedRational(getattr(self, name)))
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or t.size == 0 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be positive and strictly increasing")
        object.__setattr__(self, "t_grid", t)
        if self.n != 3:
            raise ValueError("kernel profiles are available for n = 3")
        if self.validate and not propfix_admissible(self.n, self.gamma, self.r, self.r_tilde):
            raise ValueError(f"(gamma={self.gamma}, r={self.r}, r~={self.r_tilde}) is outside the decay range")

    @property
    def inner_p(self) -> float:
        return float(self.r_tilde) / 2.0

    @property
    def outer_q(self) -> float:
        return float(self.r) / 2.0


@dataclass
class NormTable:
    t: np.ndarray
    norm: np.ndarray
    estimator: Estimator
    gamma: ExtendedRational
    r: ExtendedRational
    r_tilde: ExtendedRational
    spot_error: float = 0.0

    def rows(self):
        for t, v in zip(self.t, self.norm):
            yield (t, v, self.estimator.value, str(self.gamma), str(self.r), str(self.r_tilde))


def kernel_profile(gamma: float, t: float, truncation: float = 1000.0, samples: int = 400) -> RadialProfile:
    """Closed-form radial profile of K_gamma(., t), n = 3, on [r0, truncation * max(t, 1)]."""
    g = float(gamma)
    t = float(t)
    end = truncation * max(abs(t), 1.0)
    start = 1e-4 * min(abs(t), 1.0) if t != 0 else 1e-6
    radii = np.geomspace(start, end, samples)
    radii = radii[np.abs(radii - abs(t)) > 1e-9 * max(abs(t), 1.0)]
    if t > 0:
        sing = [(t, g - 2.0)]
    elif t < 0:
        sing = [(-t, g - 2.0)]
    else:
        sing = [(0.0, g - 3.0)]
    return RadialProfile.from_function(
        lambda s: kernel_closed_form_n3(g, s, t),
        radii,
        sing,
        lambda a, u: kernel_closed_form_offset(g, t, a, u),
        label=f"K_{g}(., {t})",
    )


def _spot_check(gamma: float, t: float, count: int) -> float:
    """Largest relative gap between closed form and damped evaluator at a few radii."""
    if count <= 0:
        return 0.0
    candidates = [0.5 * t, 2.0 * t + 1.0, t + 3.0, 0.25 * t + 0.5]
    worst = 0.0
    used = 0
    for r in candidates:
        if used >= count:
            break
        if r <= 0 or in_cone_band(r, t, CONE_BAND):
            continue
        ref = kernel_eval(KernelQuery(3, gamma, r, t)).value
        val = complex(kernel_closed_form_n3(gamma, r, t))
        worst = max(worst, abs(val - ref) / abs(ref))
        used += 1
    return worst


def _norm_at(config: ExperimentConfig, t: float) -> tuple[float, float]:
    g = float(config.gamma)
    profile = kernel_profile(g, t, config.truncation, config.radius_samples)
    spot = _spot_check(g, t, config.spot_checks)
    if config.estimator is Estimator.DIRECT:
        val = amalgam_norm_radial(profile, config.inner_p, config.outer_q, config.window)
    else:
        val = amalgam_surrogate_radial(profile, config.inner_p, config.outer_q)
    return val, spot


def kernel_time_profile(config: ExperimentConfig, threads: int = 1) -> NormTable:
    """h(t) on the configured time grid; rows come back in grid order."""
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            out = list(ex.map(lambda t: _norm_at(config, t), config.t_grid))
    else:
        out = [_norm_at(config, t) for t in config.t_grid]
    norms = np.array([v for v, _ in out])
    spot = max((s for _, s in out), default=0.0)
    if spot > config.spot_tol:
        raise SpotCheckError(f"closed-form profile off by {spot:.2e} relative")
    return NormTable(config.t_grid.copy(), norms, config.estimator, config.gamma, config.r, config.r_tilde, spot)


def fit_decay(table, regime) -> DecayFit:
    """Least-squares slope of log(norm) against log(t) inside one regime.

    ``table`` is a NormTable or a pair of arrays (t, norm). The small-t
    regime keeps 0 < t <= 1 and the large-t regime keeps t >= 1.
    """
    regime = Regime(regime)
    if isinstance(table, NormTable):
        t, v = table.t, table.norm
    else:
        t, v = (np.asarray(a, dtype=float) for a in table)
    t = np.abs(t)
    keep = (t > 0) & (t <= 1) if regime is Regime.SMALL_T else (t >= 1)
    keep &= v > 0
    if keep.sum() < 8:
        raise ValueError(f"only {int(keep.sum())} usable points in the {regime.value} regime; need 8")
    x, y = np.log(t[keep]), np.log(v[keep])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return DecayFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))),
                    (float(t[keep].min()), float(t[keep].max())), int(keep.sum()))


@dataclass
class DecayReport:
    gamma: ExtendedRational
    r: ExtendedRational
    r_tilde: ExtendedRational
    targets: dict
    fits: dict
    tables: list
    tolerances: dict

    def passes(self) -> dict:
        out = {}
        for (est, regime), fit in self.fits.items():
            target = self.targets.get(regime)
            if target is not None:
                out[f"{est}_{regime}"] = abs(fit.slope - float(target)) <= self.tolerances[regime]
        for regime in (Regime.SMALL_T.value, Regime.LARGE_T.value):
            d = self.fits.get((Estimator.DIRECT.value, regime))
            s = self.fits.get((Estimator.SURROGATE.value, regime))
            if d is not None and s is not None:
                out[f"estimators_agree_{regime}"] = abs(d.slope - s.slope) <= self.tolerances["agreement"]
        return out

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "gamma": str(self.gamma),
            "r": str(self.r),
            "r_tilde": str(self.r_tilde),
            "targets": {k: (None if v is None else str(v)) for k, v in self.targets.items()},
            "fits": {f"{e}_{reg}": {"slope": f.slope, "intercept": f.intercept, "residual_rms": f.residual_rms,
                                     "fit_range": list(f.fit_range), "points": f.points}
                     for (e, reg), f in self.fits.items()},
            "tolerances": self.tolerances,
            "pass": self.passes(),
        }


def decay_experiment(gamma, r, r_tilde, estimators=(Estimator.DIRECT, Estimator.SURROGATE),
                     regimes=(Regime.SMALL_T, Regime.LARGE_T), validate: bool = True,
                     targets: dict | None = None, threads: int = 1, **config_kw) -> DecayReport:
    """Both regimes and estimators for one (gamma, r, r~), with exact target exponents.

    Targets default to the decay exponents of the admissible range; pass
    ``targets`` (keyed by regime value) together with ``validate=False`` to
    probe a configuration outside it.
    """
    if targets is None:
        small, large = decay_exponents(3, gamma, r, r_tilde)
        targets = {Regime.SMALL_T.value: small, Regime.LARGE_T.value: large}
    fits, tables = {}, []
    for regime in map(Regime, regimes):
        grid = SMALL_T_GRID if regime is Regime.SMALL_T else LARGE_T_GRID
        for est in map(Estimator, estimators):
            cfg = ExperimentConfig(gamma, r, r_tilde, grid, est, validate=validate, **config_kw)
            table = kernel_time_profile(cfg, threads)
            tables.append(table)
            fits[(est.value, regime.value)] = fit_decay(table, regime)
    tol = {Regime.SMALL_T.value: 0.15, Regime.LARGE_T.value: 0.10, "agreement": 0.05}
    return DecayReport(ExtendedRational(gamma), ExtendedRational(r), ExtendedRational(r_tilde),
                       targets, fits, tables, tol)


def windowed_time_norm_profile(h_table, q_tilde, window: Window = Window(), ks=None, nodes: int = 24):
    """Rows (k, ||h phi(. - k)||_{L^(q~/2)}) for integer k.

    h is interpolated monotonically from the table (|t|, h), in log-log
    coordinates when the table is strictly positive, so the table must cover [k - R, k + R] for every requested k,
    R the window radius.
    """
    t, v = (h_table.t, h_table.norm) if isinstance(h_table, NormTable) else h_table
    t = np.abs(np.asarray(t, dtype=float))
    order = np.argsort(t)
    t, v = t[order], np.asarray(v, dtype=float)[order]
    R = window.support_radius
    if ks is None:
        ks = np.arange(int(np.ceil(t[0] + R)), int(np.floor(t[-1] - R)) + 1)
    ks = np.asarray(ks, dtype=int)
    if ks.size == 0:
        raise CoverageError("no integer k has its window inside the table")
    if ks.min() - R < t[0] - 1e-12 or ks.max() + R > t[-1] + 1e-12:
        raise CoverageError(f"table covers [{t[0]}, {t[-1]}], need [{ks.min() - R}, {ks.max() + R}]")
    if np.any(v <= 0) or t[0] <= 0:
        interp = PchipInterpolator(t, v)
        h = lambda s: interp(s)
    else:
        interp = PchipInterpolator(np.log(t), np.log(v))
        h = lambda s: np.exp(interp(np.log(s)))
    p = float(ExtendedRational(q_tilde)) / 2.0
    rows = []
    for k in ks:
        s, w = _quad.panels(np.linspace(k - R, k + R, 5), nodes)
        vals = np.abs(h(s) * window(s - k, 1)) ** p
        rows.append((int(k), float(np.sum(w * vals) ** (1.0 / p))))
    return rows


def _dilate(profile: RadialProfile, lam: float):
    if profile.func is not None:
        return lambda s: profile.func(lam * s)
    return lambda s: profile.evaluate(lam * s)


def strichartz_quotient(sigma, tuple_: ExponentTuple, data_family, dilations, window: Window = Window(),
                        grid: RadialGrid = RadialGrid(96.0, 8192), t_max: float = 16.0, dt: float = 1.0 / 64.0,
                        box_radius: float = 32.0, chunk: int = 64, edge_tol: float = 1e-4):
    """Rows (family index, lambda, ||e^{it|D|} f_lam||_{W(q~,q)_t W(r~,r)_x} / ||f_lam||_{H^sigma}).

    f_lam(x) = f(lam x). The space-time norm is taken over [0, t_max] x
    {|x| <= box_radius} with the solution set to zero outside the box.
    """
    s = ExtendedRational(sigma)
    t = tuple_ if tuple_.sigma is not None else ExponentTuple(
        tuple_.n, tuple_.q, tuple_.q_tilde, tuple_.r, tuple_.r_tilde, sigma=s)
    if not (thm1_admissible(t) or corollary_admissible(t, s)):
        raise ValueError(f"tuple {t.as_strings()} is outside the Strichartz range")
    times = np.arange(int(round(t_max / dt)) + 1) * dt
    keep = grid.r <= box_radius
    rows = []
    for idx, f in enumerate(data_family):
        for lam in dilations:
            values = _dilate(f, float(lam))(grid.r)
            denom = sobolev_norm(grid.profile(values), float(s))
            if not denom > 0:
                raise ValueError("zero datum: the quotient is undefined")
            y = to_spectral(values, grid)
            spatial = np.empty(times.size)
            for i0 in range(0, times.size, chunk):
                tt = times[i0:i0 + chunk, None]
                u = from_spectral(y * np.exp(1j * tt * grid.omega), grid)
                _edge_check(u, grid, edge_tol)
                spatial[i0:i0 + chunk] = radial_amalgam_norms(u[:, keep], grid.r[keep], t.r_tilde, t.r, window)
            # trapezoid end weights: the samples enter the local sums as |v|^q~
            spatial[[0, -1]] *= 0.5 ** (1.0 / float(t.q_tilde))
            num = amalgam_norm_1d(SampledSignal(spatial, 0.0, dt), t.q_tilde, t.q, window)
            rows.append((idx, float(lam), num / denom))
    return rows


def retarded_norm_check(n, gamma, tuple_: ExponentTuple, estimators=(Estimator.DIRECT,),
                        regimes=(Regime.SMALL_T, Regime.LARGE_T), threads: int = 1) -> DecayReport:
    """Kernel-norm sweep with the combined indices of the retarded estimate.

    1/r~0 = 1/r~ + 1/r~1 and 1/r0 = 1/r + 1/r1 are the inner and outer
    exponents; the large-t target is -(n - gamma - n/r0). The sweep reuses
    the homogeneous harness with doubled indices (2 r0, 2 r~0).
    """
    if not thm2_admissible(tuple_, gamma):
        raise ValueError("tuple is outside the retarded range")
    if int(n) != 3:
        raise ValueError("the retarded check is available for n = 3")
    g = ExtendedRational(gamma)
    inv_r0 = tuple_.r.inv + tuple_.r1.inv
    inv_rt0 = tuple_.r_tilde.inv + tuple_.r1_tilde.inv
    r_doubled = ExtendedRational(Fraction(2) / inv_r0)
    rt_doubled = ExtendedRational(Fraction(2) / inv_rt0)
    large = ExtendedRational(-(3 - g.value - 3 * inv_r0))
    targets = {Regime.LARGE_T.value: large, Regime.SMALL_T.value: None}
    return decay_experiment(g, r_doubled, rt_doubled, estimators, regimes, validate=False,
                            targets=targets, threads=threads)


def write_norm_csv(path, tables) -> Path:
    """Columns t, norm, estimator, gamma, r, r_tilde; one row per table entry."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "norm", "estimator", "gamma", "r", "r_tilde"])
        for table in tables:
            for t, v, est, g, r, rt in table.rows():
                w.writerow([repr(float(t)), repr(float(v)), est, g, r, rt])
    return path


def write_summary_json(path, report: DecayReport) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.summary(), indent=2) + "\n", encoding="utf-8")
    return path
