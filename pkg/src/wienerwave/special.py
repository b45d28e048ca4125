"""Bessel functions of the first kind for real order nu >= 0.

Evaluation uses the ascending power series for small arguments and the
Hankel large-argument expansion otherwise. For half-integer orders the Hankel
expansion terminates, which gives the closed trigonometric forms exactly.

The two-term split

    J_nu(m) = sqrt(2 / (pi m)) cos(m - pi nu / 2 - pi / 4) + R_nu(m)

is exposed as :func:`bessel_leading` and :func:`bessel_remainder`; the
remainder decays like m**-1.5.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

import numpy as np

__all__ = [
    "BesselOrder",
    "bessel_j",
    "bessel_leading",
    "bessel_remainder",
    "remainder_envelope",
    "remainder_envelope_slope",
    "SERIES_CROSSOVER",
]

# Largest argument handled by the power series. Above it the Hankel
# expansion is truncated at its smallest term, which is below ~e**(-2m).
SERIES_CROSSOVER = 14.0


@dataclass(frozen=True)
class BesselOrder:
    nu: float

    def __post_init__(self):
        if not np.isfinite(self.nu) or self.nu < 0:
            raise ValueError(f"Bessel order must be a finite nu >= 0, got {self.nu}")

    @property
    def half_integer_flag(self) -> bool:
        """True when 2*nu is an integer (this includes integer orders)."""
        return float(2 * self.nu).is_integer()

    @property
    def is_half_odd(self) -> bool:
        """True for nu = 1/2, 3/2, ... where closed trigonometric forms exist."""
        return self.half_integer_flag and not float(self.nu).is_integer()


def _order(order) -> BesselOrder:
    return order if isinstance(order, BesselOrder) else BesselOrder(float(order))


def _series(nu: float, m: np.ndarray) -> np.ndarray:
    half = 0.5 * m
    # (m/2)**nu / Gamma(nu + 1), computed in logs to stay finite for large nu
    with np.errstate(divide="ignore"):
        term = np.exp(nu * np.log(half) - lgamma(nu + 1.0))
    if nu == 0:
        term = np.ones_like(m)
    total = term.copy()
    q = half * half
    for k in range(1, 200):
        term = -term * q / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)) and k > 2:
            break
    return total


def _hankel_pq(nu: float, m: np.ndarray):
    """Hankel P and Q sums, truncated at the smallest term for each m."""
    mu = 4.0 * nu * nu
    p = np.ones_like(m)
    q = np.zeros_like(m)
    term = np.ones_like(m)
    active = np.ones(m.shape, dtype=bool)
    last = np.full(m.shape, np.inf)
    for k in range(1, 400):
        factor = (mu - (2 * k - 1) ** 2) / (k * 8.0)
        if factor == 0.0:
            break  # terminating series (half-integer order)
        new = term * factor / m
        mag = np.abs(new)
        # stop once terms start growing again (asymptotic series)
        active &= mag < last
        if not active.any():
            break
        new = np.where(active, new, 0.0)
        # terms alternate between P and Q with sign pattern + - - + + - - ...
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * new
        else:
            p += sign * new
        term = new
        last = np.where(active, mag, last)
        if np.all(mag[active] < 1e-17):
            break
    return p, q


def _hankel(nu: float, m: np.ndarray) -> np.ndarray:
    p, q = _hankel_pq(nu, m)
    chi = m - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * m)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order, m):
    """Bessel function J_nu(m) for real nu >= 0 and m > 0.

    Accepts scalar or array ``m``; returns the same shape. ``m = 0`` is
    rejected; use the small-argument limit explicitly if needed.
    """
    order = _order(order)
    nu = order.nu
    arr = np.asarray(m, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("bessel_j requires m > 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)

    if nu == 0.5:
        out = np.sqrt(2.0 / (np.pi * flat)) * np.sin(flat)
    else:
        # terminating Hankel forms cancel badly near 0, so keep the series there
        cut = min(SERIES_CROSSOVER, 0.5 + nu) if order.is_half_odd else SERIES_CROSSOVER
        small = flat <= cut
        if small.any():
            out[small] = _series(nu, flat[small])
        if (~small).any():
            out[~small] = _hankel(nu, flat[~small])
    out = out.reshape(np.shape(arr))
    return float(out) if np.ndim(arr) == 0 else out


def bessel_leading(order, m):
    """Leading oscillatory term sqrt(2/(pi m)) cos(m - pi nu/2 - pi/4), m > 1."""
    order = _order(order)
    arr = np.asarray(m, dtype=float)
    if np.any(arr <= 1):
        raise ValueError("bessel_leading requires m > 1")
    val = np.sqrt(2.0 / (np.pi * arr)) * np.cos(arr - 0.5 * np.pi * order.nu - 0.25 * np.pi)
    return float(val) if np.ndim(arr) == 0 else val


def bessel_remainder(order, m):
    """R_nu(m) = J_nu(m) - bessel_leading(nu, m), for m > 1."""
    order = _order(order)
    arr = np.asarray(m, dtype=float)
    if np.any(arr <= 1):
        raise ValueError("bessel_remainder requires m > 1")
    return bessel_j(order, arr) - bessel_leading(order, arr)


def remainder_envelope(order, m_lo: float = 2.0, m_hi: float = 200.0, step: float = 1e-3):
    """Crests of |R_nu| on [m_lo, m_hi]: (positions, values) of its local maxima.

    R_nu oscillates with period ~2 pi, so its crests trace the decay envelope.
    """
    m = np.arange(m_lo, m_hi + step, step)
    a = np.abs(bessel_remainder(order, m))
    peak = np.flatnonzero((a[1:-1] >= a[:-2]) & (a[1:-1] > a[2:])) + 1
    return m[peak], a[peak]


def remainder_envelope_slope(order, m_lo: float = 2.0, m_hi: float = 200.0) -> float:
    """Least-squares log-log slope through the crests of |R_nu| on [m_lo, m_hi]."""
    m, env = remainder_envelope(order, m_lo, m_hi)
    return float(np.polyfit(np.log(m), np.log(env), 1)[0])
