"""Wave kernel of |grad|^-gamma exp(it sqrt(-Delta)) in three dimensions.

In polar coordinates the kernel is the radial oscillatory integral

    K(r, t) = C_3 r^(-1/2) int_0^inf e^{i t w} w^(3/2 - gamma) J_{1/2}(r w) dw,
            = 1/(2 pi^2 r) int_0^inf e^{i t w} w^(1 - gamma) sin(r w) dw,

which converges only in the Abel sense. Two evaluators are provided:

* :func:`kernel_damped` / :func:`kernel_eval` -- Gauss-Legendre panels of one
  oscillation period applied to the e^{-eps w} damped integrand, followed by
  Richardson extrapolation eps -> 0.
* :func:`kernel_closed_form_n3` -- Gamma-function evaluation of the two
  Fourier-Laplace integrals obtained by writing sin as exponentials.

:func:`pointwise_bound` returns the envelope the kernel is bounded by (up to a
constant), and :func:`verify_pointwise` measures that constant on a grid.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gamma as gamma_fn

from .special import bessel_j

__all__ = [
    "KernelQuery",
    "KernelValue",
    "KernelMethod",
    "ConeBandError",
    "ConvergenceError",
    "CONE_BAND",
    "in_cone_band",
    "kernel_damped",
    "kernel_eval",
    "kernel_closed_form_n3",
    "kernel_closed_form_offset",
    "pointwise_bound",
    "verify_pointwise",
    "PointwiseReport",
]

# |r - |t|| < CONE_BAND * max(1, r) is excluded from quadrature evaluation
CONE_BAND = 0.05

# C_3 r^(-1/2) J_{1/2}(r w) w^(3/2-gamma) == w^(1-gamma) sin(r w) / (2 pi^2 r)
_C3 = np.sqrt(np.pi / 2.0) / (2.0 * np.pi**2)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_ENVELOPE_FLOOR = 1e-14


class ConeBandError(ValueError):
    """Query lies inside the excluded band around the light cone |x| = |t|."""


class ConvergenceError(RuntimeError):
    """Quadrature or extrapolation failed to reach its tolerance."""


class KernelMethod(str, Enum):
    DAMPED_EXTRAPOLATED = "damped_extrapolated"
    SPLIT_ASYMPTOTIC = "split_asymptotic"
    CLOSED_FORM_N3 = "closed_form_n3"


@dataclass(frozen=True)
class KernelQuery:
    n: int
    gamma: float
    radius: float
    time: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        if not 0 < self.gamma < self.n:
            raise ValueError(f"need 0 < gamma < n, got gamma={self.gamma}, n={self.n}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not np.isfinite(self.time):
            raise ValueError("time must be finite")


@dataclass(frozen=True)
class KernelValue:
    value: complex
    abs_error_estimate: float
    method: KernelMethod


def in_cone_band(radius, time, band: float = CONE_BAND):
    """Boolean (array) marking points with |r - |t|| < band * max(1, r)."""
    radius = np.asarray(radius, dtype=float)
    return np.abs(radius - np.abs(time)) < band * np.maximum(1.0, radius)


def _require_n3(query: KernelQuery):
    if query.n != 3:
        raise NotImplementedError("numerical kernel evaluation is implemented for n = 3 only")


class _DampedIntegrand:
    """Panel nodes and integrand values, extended lazily as eps shrinks."""

    def __init__(self, gamma: float, radius: float, time: float, max_nodes: int = 40_000_000):
        self.gamma = gamma
        self.radius = radius
        self.time = time
        self.max_nodes = max_nodes
        self.period = 2.0 * np.pi / max(abs(time) + radius, 1.0)
        # first period, graded geometrically toward the w^(2-gamma) endpoint
        edges = self.period * 2.0 ** -np.arange(0, 60, dtype=float)[::-1]
        self.omega, self.weights = self._panels(np.concatenate([[0.0], edges]))
        self.values = self._integrand(self.omega)
        self.top = self.period

    @staticmethod
    def _panels(edges):
        a, b = edges[:-1, None], edges[1:, None]
        half = 0.5 * (b - a)
        nodes = (a + b) * 0.5 + half * _GL_NODES[None, :]
        return nodes.ravel(), (half * _GL_WEIGHTS[None, :]).ravel()

    def _integrand(self, omega):
        r, t = self.radius, self.time
        bessel = bessel_j(0.5, r * omega)
        return np.exp(1j * t * omega) * omega ** (1.5 - self.gamma) * bessel

    def extend_to(self, omega_max: float):
        if omega_max <= self.top:
            return
        n_new = int(np.ceil((omega_max - self.top) / self.period))
        if self.omega.size + n_new * _GL_NODES.size > self.max_nodes:
            raise ConvergenceError(
                f"damped quadrature needs more than {self.max_nodes} nodes; eps too small"
            )
        edges = self.top + self.period * np.arange(n_new + 1, dtype=float)
        nodes, weights = self._panels(edges)
        self.omega = np.concatenate([self.omega, nodes])
        self.weights = np.concatenate([self.weights, weights])
        self.values = np.concatenate([self.values, self._integrand(nodes)])
        self.top = edges[-1]

    def integral(self, epsilon: float) -> complex:
        # truncate once e^{-eps w} falls below the envelope floor
        omega_max = -np.log(_ENVELOPE_FLOOR) / epsilon
        self.extend_to(omega_max)
        stop = np.searchsorted(self.omega, omega_max)
        w = self.omega[:stop]
        total = np.sum(self.weights[:stop] * self.values[:stop] * np.exp(-epsilon * w))
        return complex(_C3 * self.radius**-0.5 * total)


def kernel_damped(query: KernelQuery, epsilon: float) -> complex:
    """Abel-damped kernel C_3 r^(-1/2) int e^{-eps w} e^{itw} w^(3/2-gamma) J_{1/2}(rw) dw."""
    _require_n3(query)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return _DampedIntegrand(query.gamma, query.radius, query.time).integral(epsilon)


def kernel_eval(
    query: KernelQuery,
    tol: float = 1e-8,
    band: float = CONE_BAND,
    max_levels: int = 14,
) -> KernelValue:
    """Kernel value by Richardson extrapolation of damped integrals, eps = 2^-k.

    The damped integral is analytic in eps for |eps| < min|t +- r|, so the
    starting eps is the largest power of two below a quarter of that distance.
    Iteration stops when successive diagonal extrapolants differ by at most
    ``tol`` relative to the current value.
    """
    _require_n3(query)
    r, t = query.radius, query.time
    if query.gamma < (query.n + 1) / 2 and in_cone_band(r, t, band):
        raise ConeBandError(f"(r={r}, t={t}) lies inside the cone band")
    dist = min(abs(t + r), abs(t - r))
    k0 = max(0, int(np.ceil(np.log2(4.0 / dist))))
    integrand = _DampedIntegrand(query.gamma, r, t)

    rows: list[list[complex]] = []
    prev = None
    for level in range(max_levels):
        eps = 2.0 ** -(k0 + level)
        row = [integrand.integral(eps)]
        for j in range(1, level + 1):
            # eps halves between rows, so the order-j error term shrinks by 2^j
            row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (2.0**j - 1.0))
        rows.append(row)
        best = row[-1]
        if prev is not None:
            diff = abs(best - prev)
            if diff <= tol * max(abs(best), 1e-300) and level >= 3:
                return KernelValue(best, float(diff), KernelMethod.DAMPED_EXTRAPOLATED)
        prev = best
    raise ConvergenceError(f"Richardson extrapolation stalled for {query}")


def kernel_closed_form_n3(gamma: float, radius, time):
    """Closed-form n = 3 kernel, vectorised over ``radius`` and ``time``.

    Uses int_0^inf e^{iAw} w^(s-1) dw = Gamma(s) e^{i sgn(A) pi s/2} |A|^-s with
    s = 2 - gamma. The combination of the two cone terms is analytic in s for
    s > -1, so gamma in (0, 3) with gamma != 2 is accepted.
    """
    if not (0 < gamma < 3) or gamma == 2:
        raise ValueError(f"closed form needs gamma in (0, 2) U (2, 3), got {gamma}")
    radius = np.asarray(radius, dtype=float)
    time = np.asarray(time, dtype=float)
    if np.any(radius <= 0):
        raise ValueError("radius must be positive")
    plus = time + radius
    minus = time - radius
    if np.any(minus == 0) or np.any(plus == 0):
        raise ValueError("closed form is singular on the light cone |t| = r")
    s = 2.0 - gamma
    g = gamma_fn(s)
    term_p = np.exp(1j * np.sign(plus) * s * np.pi / 2) * np.abs(plus) ** -s
    term_m = np.exp(1j * np.sign(minus) * s * np.pi / 2) * np.abs(minus) ** -s
    val = g * (term_p - term_m) / (2j) / (2.0 * np.pi**2 * radius)
    return complex(val) if val.ndim == 0 else val


def kernel_closed_form_offset(gamma: float, time: float, anchor: float, offset):
    """Closed-form n = 3 kernel at radius anchor + offset.

    The cone distances are formed as (time -+ anchor) -+ offset, so with
    anchor = |time| they stay exact however small the offset is.
    """
    if not (0 < gamma < 3) or gamma == 2:
        raise ValueError(f"closed form needs gamma in (0, 2) U (2, 3), got {gamma}")
    offset = np.asarray(offset, dtype=float)
    radius = anchor + offset
    if np.any(radius <= 0):
        raise ValueError("radius must be positive")
    plus = (time + anchor) + offset
    minus = (time - anchor) - offset
    if np.any(minus == 0) or np.any(plus == 0):
        raise ValueError("closed form is singular on the light cone |t| = r")
    s = 2.0 - gamma
    term_p = np.exp(1j * np.sign(plus) * s * np.pi / 2) * np.abs(plus) ** -s
    term_m = np.exp(1j * np.sign(minus) * s * np.pi / 2) * np.abs(minus) ** -s
    return gamma_fn(s) * (term_p - term_m) / (2j) / (2.0 * np.pi**2 * radius)


def _bound_domain_ok(n: int, gamma: float) -> bool:
    if n == 2:
        return 0.5 < gamma < 1
    if n == 3:
        return 1 < gamma < 2
    lo, mid, hi = (n - 1) / 2, (n + 1) / 2, n - 1
    return lo < gamma < mid or mid < gamma < hi


def pointwise_bound(query: KernelQuery) -> float:
    """Envelope of |K_gamma(x, t)| with unit constant.

    For |x| <= |t|/2 this is |t|^-1 |x|^-(n-1-gamma). Outside, it is
    |x|^-(n-1)/2 ||x|-|t||^-((n+1)/2-gamma) below gamma = (n+1)/2 and
    |x|^-(n-gamma) above.
    """
    n, g, r, t = query.n, query.gamma, query.radius, abs(query.time)
    if not _bound_domain_ok(n, g):
        raise ValueError(f"gamma={g} outside the range of the pointwise bound for n={n}")
    if r <= t / 2:
        return t**-1 * r ** -(n - 1 - g)
    if g < (n + 1) / 2:
        gap = abs(r - t)
        if gap == 0:
            return float("inf")
        return r ** (-(n - 1) / 2) * gap ** -((n + 1) / 2 - g)
    return r ** -(n - g)


@dataclass(frozen=True)
class PointwiseReport:
    max_ratio: float
    argmax: tuple[float, float]
    grid_size: int


def verify_pointwise(n: int, gamma: float, grid, evaluator=None, threads: int = 1) -> PointwiseReport:
    """Max of |K| / pointwise_bound over ``grid`` of (radius, time) pairs.

    ``evaluator`` maps a :class:`KernelQuery` to a complex value; it defaults
    to :func:`kernel_eval`. Points are processed in grid order, so the report
    is deterministic regardless of ``threads``.
    """
    pts = [(float(r), float(t)) for r, t in grid]
    if not pts:
        raise ValueError("verify_pointwise needs a non-empty grid")
    if evaluator is None:
        evaluator = lambda q: kernel_eval(q).value  # noqa: E731

    def ratio(pt):
        q = KernelQuery(n, gamma, pt[0], pt[1])
        return abs(evaluator(q)) / pointwise_bound(q)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            ratios = list(pool.map(ratio, pts))
    else:
        ratios = [ratio(p) for p in pts]
    i = int(np.argmax(ratios))
    return PointwiseReport(float(ratios[i]), pts[i], len(pts))
