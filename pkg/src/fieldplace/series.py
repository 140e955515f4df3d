"""Closed-form cosine-series solution of the density potential on a rectangle.

The potential with zero normal derivative on the boundary of [0,W] x [0,H]
and zero region integral is a double cosine series. For rectangle-sum
densities the coefficients have closed forms in the block corners, so the
potential and its field can be evaluated exactly at any point by a partial
sum. A quadrature path computes the same coefficients from the defining
integrals and serves as an independent oracle, and tail bounds certify the
truncation error of partial sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import ExactDensity, bin_density_from_rects


@dataclass
class SpectralCoefficients:
    """Cosine-series coefficients a[u, p], u, p in [0, K]."""

    K: int
    a: np.ndarray  # (K+1, K+1)
    W: float
    H: float


@dataclass
class TailBound:
    K: int
    bound: float


def exact_coefficients(d: ExactDensity, K: int) -> SpectralCoefficients:
    """Series coefficients of the potential, in closed form over the blocks.

    O(K^2 n): per-mode sine differences at block edges, combined across
    blocks by matrix products.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    W, H = d.W, d.H
    a = np.zeros((K + 1, K + 1))
    if d.n == 0:
        return SpectralCoefficients(K, a, W, H)

    u = np.arange(1, K + 1, dtype=float)
    # sin at right/left block edges; the uniform mean term integrates to zero
    # against every nonconstant mode.
    sx = np.sin(np.outer(u * np.pi / W, d.x + d.w / 2)) - np.sin(
        np.outer(u * np.pi / W, d.x - d.w / 2)
    )
    sy = np.sin(np.outer(u * np.pi / H, d.y + d.h / 2)) - np.sin(
        np.outer(u * np.pi / H, d.y - d.h / 2)
    )
    a[1:, 0] = (2 * W**2 / (np.pi**3 * H)) * (sx @ d.h) / u**3
    a[0, 1:] = (2 * H**2 / (np.pi**3 * W)) * (sy @ d.w) / u**3
    denom = np.add.outer(u**2 * H**2, u**2 * W**2) * np.outer(u, u)
    a[1:, 1:] = (4 * W**2 * H**2 / np.pi**4) * (sx @ sy.T) / denom
    return SpectralCoefficients(K, a, W, H)


def density_mode_integrals(d: ExactDensity, K: int, resolution: int = 1024) -> np.ndarray:
    """Midpoint-rule integrals of density * cos(u pi x/W) * cos(p pi y/H).

    The density is rasterized by exact per-cell rectangle overlap, so the
    quadrature error comes only from the smooth cosine factors.
    """
    grid = bin_density_from_rects(d.x, d.y, d.w, d.h, resolution, (d.W, d.H), smooth=False)
    rho = grid.values
    xc = (np.arange(resolution) + 0.5) * d.W / resolution
    yc = (np.arange(resolution) + 0.5) * d.H / resolution
    modes = np.arange(K + 1, dtype=float)
    cx = np.cos(np.outer(modes * np.pi / d.W, xc))  # (K+1, res)
    cy = np.cos(np.outer(modes * np.pi / d.H, yc))
    cell = (d.W / resolution) * (d.H / resolution)
    return (cx @ rho @ cy.T) * cell


def coefficients_by_quadrature(
    d: ExactDensity, K: int, resolution: int = 1024
) -> SpectralCoefficients:
    """Series coefficients from numerical integration of the defining forms.

    Independent oracle for exact_coefficients; resolution must be at least
    4K cells per axis.
    """
    if resolution < 4 * K:
        raise ValueError("resolution must be >= 4K per axis")
    W, H = d.W, d.H
    integ = density_mode_integrals(d, K, resolution)
    a = np.zeros((K + 1, K + 1))
    modes = np.arange(1, K + 1, dtype=float)
    a[0, 1:] = 2 * H / (modes**2 * np.pi**2 * W) * integ[0, 1:]
    a[1:, 0] = 2 * W / (modes**2 * np.pi**2 * H) * integ[1:, 0]
    denom = np.add.outer(modes**2 * H**2, modes**2 * W**2)
    a[1:, 1:] = 4 * W * H / (denom * np.pi**2) * integ[1:, 1:]
    a[0, 0] = 0.0
    return SpectralCoefficients(K, a, W, H)


def _mode_matrices(c: SpectralCoefficients, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x > c.W) or np.any(y < 0) or np.any(y > c.H):
        raise ValueError("point outside region")
    modes = np.arange(c.K + 1, dtype=float)
    ax = np.multiply.outer(x, modes * np.pi / c.W)  # (..., K+1)
    ay = np.multiply.outer(y, modes * np.pi / c.H)
    return ax, ay


def eval_potential(c: SpectralCoefficients, x, y):
    """Partial-sum potential at (x, y); accepts scalars or arrays."""
    ax, ay = _mode_matrices(c, x, y)
    out = np.einsum("...u,up,...p->...", np.cos(ax), c.a, np.cos(ay))
    return float(out) if out.ndim == 0 else out


def eval_field(c: SpectralCoefficients, x, y):
    """Partial-sum field (negative potential gradient) at (x, y)."""
    ax, ay = _mode_matrices(c, x, y)
    modes = np.arange(c.K + 1, dtype=float)
    sx = np.sin(ax) * (modes * np.pi / c.W)
    sy = np.sin(ay) * (modes * np.pi / c.H)
    xi_x = np.einsum("...u,up,...p->...", sx, c.a, np.cos(ay))
    xi_y = np.einsum("...u,up,...p->...", np.cos(ax), c.a, sy)
    if xi_x.ndim == 0:
        return float(xi_x), float(xi_y)
    return xi_x, xi_y


def _cubic_tail(k: int, terms: int = 100_000) -> float:
    """Upper bound on sum_{p>k} 1/p^3: explicit sum plus integral remainder."""
    stop = k + terms
    p = np.arange(k + 1, stop + 1, dtype=float)
    return float(np.sum(p**-3.0)) + 0.5 / stop**2


def _cross_tail(K: int, W: float, H: float) -> float:
    """Upper bound on the double series 1/(u^3 p H^2 + u p^3 W^2) over the
    modes with u > K or p > K."""
    M = max(4 * K, 1024)
    u = np.arange(1, M + 1, dtype=float)
    terms = 1.0 / (
        np.outer(u**3, u) * H**2 + np.outer(u, u**3) * W**2
    )
    terms[:K, :K] = 0.0  # keep only u > K or p > K
    # AM-GM: u^2 H^2 + p^2 W^2 >= 2 u p W H, so the two strips beyond M are
    # each below (1/(2WH)) * (1/M) * zeta(2).
    remainder = (math.pi**2 / 6.0) / (W * H * M)
    return float(terms.sum()) + remainder


def _bound_from(d: ExactDensity, k: int) -> float:
    if d.n == 0:
        return 0.0
    W, H = d.W, d.H
    t3 = _cubic_tail(k)
    row = 4 * H**2 * float(np.sum(d.w)) / (W * math.pi**3) * t3
    col = 4 * W**2 * float(np.sum(d.h)) / (H * math.pi**3) * t3
    cross = 16 * W**2 * H**2 * d.n / math.pi**4 * _cross_tail(k, W, H)
    return row + col + cross


def tail_bound(d: ExactDensity, K: int) -> TailBound:
    """Bound on the potential contribution of all modes beyond order K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return TailBound(K, _bound_from(d, K))


def series_abs_bound(d: ExactDensity) -> float:
    """Closed bound on the sum of |a[u, p]| over all modes (hence on |psi|)."""
    return _bound_from(d, 0)


def eval_point_ops(K: int) -> int:
    """Multiply-add count of one partial-sum potential evaluation."""
    return (K + 1) ** 2 + 2 * (K + 1)


def coefficient_ops(K: int, n: int) -> int:
    """Multiply-add count of the closed-form coefficient computation."""
    return n * K**2 + 4 * n * K
