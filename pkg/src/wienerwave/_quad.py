"""Gauss-Legendre panel rules shared by the norm estimators."""
from __future__ import annotations

from functools import lru_cache
from math import ceil

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0  # on [0, 1]


def panels(edges, n: int = 10):
    """Composite rule on consecutive intervals given by ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    a = edges[:-1, None]
    h = np.diff(edges)[:, None]
    return (a + h * x).ravel(), (h * w).ravel()


def graded(length: float, beta: float, n: int = 8, levels: int = 12):
    """Offsets u in (0, length] and weights for int_0^length F(u) du, F ~ u**beta.

    Geometric panels reach down to length * 2**-levels; the innermost panel is
    mapped by u = delta v**m with m (1 + beta) an integer, which makes the
    pure power part polynomial in v.
    """
    if beta <= -1:
        raise ValueError(f"u**{beta} is not integrable at 0")
    x, w = gauss_legendre(n)
    delta = length * 2.0**-levels
    edges = delta * 2.0 ** np.arange(levels + 1)
    u_geo, w_geo = panels(edges, n)
    m = ceil(1.0 + beta - 1e-12) / (1.0 + beta)
    u_in = delta * x**m
    w_in = delta * m * x ** (m - 1.0) * w
    return np.concatenate([u_in, u_geo]), np.concatenate([w_in, w_geo])


def interval_rule(a: float, b: float, left_beta=None, right_beta=None, panel_width=None, n: int = 10):
    """Nodes on [a, b] with optional endpoint singularities.

    Returns (anchor, offset, weight) triples flattened into three arrays so the
    integrand can be evaluated relative to the nearest singular endpoint
    without cancellation: node = anchor + offset.
    """
    if b <= a:
        return np.empty(0), np.empty(0), np.empty(0)
    if left_beta is not None and right_beta is not None:
        mid = 0.5 * (a + b)
        parts = [interval_rule(a, mid, left_beta, None, panel_width, n),
                 interval_rule(mid, b, None, right_beta, panel_width, n)]
        return tuple(np.concatenate(c) for c in zip(*parts))
    if left_beta is not None:
        u, w = graded(b - a, left_beta)
        return np.full_like(u, a), u, w
    if right_beta is not None:
        u, w = graded(b - a, right_beta)
        return np.full_like(u, b), -u, w
    count = 1 if panel_width is None else max(1, int(ceil((b - a) / panel_width)))
    x, w = panels(np.linspace(a, b, count + 1), n)
    return np.full_like(x, a), x - a, w
