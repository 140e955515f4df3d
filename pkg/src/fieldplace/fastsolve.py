"""Grid-based fast computation of the potential and field.

The bin-density cosine sums are a DCT-II per axis, the per-mode scale
factors turn them into series coefficients, and inverse cosine/sine
transforms evaluate the potential and field on all bin centers. Naive
direct-sum twins of each transform ship as test oracles. A spectral-method
solver (full-period cosine modes over bin indices) is kept as the
comparison baseline.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import _kernels
from .density import DensityGrid
from .series import SpectralCoefficients


def _workers() -> int:
    return max(1, int(os.environ.get("FIELDPLACE_THREADS", "1")))


@dataclass
class ReducedCoefficients:
    """Plain cosine sums of the bin densities, before per-mode scaling."""

    m: int
    a_prime: np.ndarray  # (m, m)


@dataclass
class FieldMap:
    """Potential and field sampled at the m x m bin centers."""

    m: int
    psi: np.ndarray
    xi_x: np.ndarray
    xi_y: np.ndarray
    W: float
    H: float

    @property
    def w_b(self) -> float:
        return self.W / self.m

    @property
    def h_b(self) -> float:
        return self.H / self.m


def _require_pow2(m: int) -> None:
    if m < 2 or m & (m - 1):
        raise ValueError(f"transform kernel supports power-of-two grids only, got {m}")


def reduced_transform(grid: DensityGrid) -> ReducedCoefficients:
    """Half-sample cosine sums of the grid, via a fast transform per axis."""
    _require_pow2(grid.m)
    w = _workers()
    ap = scipy.fft.dct(
        scipy.fft.dct(grid.values, type=2, axis=0, workers=w), type=2, axis=1, workers=w
    ) / 4.0
    ap[0, 0] = 0.0
    return ReducedCoefficients(grid.m, ap)


def naive_reduced_transform(grid: DensityGrid) -> ReducedCoefficients:
    """Direct evaluation of the cosine sums, mode by mode. O(m^4) oracle."""
    m = grid.m
    half = (np.arange(m) + 0.5) * np.pi / m
    cos = np.cos(np.outer(np.arange(m), half))  # cos[u, l]
    ap = np.empty((m, m))
    for u in range(m):
        for p in range(m):
            ap[u, p] = np.sum(grid.values * np.outer(cos[u], cos[p]))
    ap[0, 0] = 0.0
    return ReducedCoefficients(m, ap)


def scale_coefficients(ap: ReducedCoefficients, region: tuple[float, float]) -> SpectralCoefficients:
    """Apply the per-mode factors that turn plain cosine sums into series
    coefficients of the potential. O(m^2)."""
    m = ap.m
    W, H = region
    u = np.arange(1, m, dtype=float)
    s = np.sin(u * np.pi / (2 * m))
    a = np.zeros((m, m))
    a[0, 1:] = 4 * H**2 / (u**3 * np.pi**3 * m) * s * ap.a_prime[0, 1:]
    a[1:, 0] = 4 * W**2 / (u**3 * np.pi**3 * m) * s * ap.a_prime[1:, 0]
    denom = np.outer(u, u) * np.add.outer(u**2 * H**2, u**2 * W**2)
    a[1:, 1:] = (
        16 * W**2 * H**2 / (denom * np.pi**4) * np.outer(s, s) * ap.a_prime[1:, 1:]
    )
    return SpectralCoefficients(m - 1, a, W, H)


def _cos3(x: np.ndarray, axis: int) -> np.ndarray:
    """Sum_u g[u] cos(u pi (l+1/2)/m) along an axis."""
    y = x.copy()
    sl = [slice(None)] * x.ndim
    sl[axis] = slice(1, None)
    y[tuple(sl)] *= 0.5
    return scipy.fft.dct(y, type=3, axis=axis, workers=_workers())


def _sin3(x: np.ndarray, axis: int) -> np.ndarray:
    """Sum_{u>=1} g[u] sin(u pi (l+1/2)/m) along an axis."""
    y = np.zeros_like(x)
    src = [slice(None)] * x.ndim
    dst = [slice(None)] * x.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, x.shape[axis] - 1)
    y[tuple(dst)] = x[tuple(src)] * 0.5
    return scipy.fft.dst(y, type=3, axis=axis, workers=_workers())


def fast_field_map(c: SpectralCoefficients, m: int) -> FieldMap:
    """Potential and field on all bin centers by inverse fast transforms.

    Requires the coefficient matrix to cover exactly the grid's modes
    (truncation order m - 1).
    """
    _require_pow2(m)
    if c.a.shape != (m, m):
        raise ValueError(f"need ({m},{m}) coefficients for an m={m} grid")
    u = np.arange(m, dtype=float)
    psi = _cos3(_cos3(c.a, 0), 1)
    xi_x = _cos3(_sin3(c.a * (u * np.pi / c.W)[:, None], 0), 1)
    xi_y = _sin3(_cos3(c.a * (u * np.pi / c.H)[None, :], 0), 1)
    return FieldMap(m, psi, xi_x, xi_y, c.W, c.H)


def naive_field_map(c: SpectralCoefficients, m: int) -> FieldMap:
    """Direct double-sum evaluation of the potential and field maps."""
    if c.a.shape != (m, m):
        raise ValueError(f"need ({m},{m}) coefficients for an m={m} grid")
    u = np.arange(m, dtype=float)
    half = (np.arange(m) + 0.5) * np.pi / m
    cos = np.cos(np.outer(u, half))  # cos[u, l]
    sin = np.sin(np.outer(u, half))
    psi = cos.T @ c.a @ cos
    xi_x = sin.T @ (c.a * (u * np.pi / c.W)[:, None]) @ cos
    xi_y = cos.T @ (c.a * (u * np.pi / c.H)[None, :]) @ sin
    return FieldMap(m, psi, xi_x, xi_y, c.W, c.H)


def solve_fast(grid: DensityGrid) -> FieldMap:
    """Density grid -> coefficients -> field map, all fast transforms."""
    return fast_field_map(
        scale_coefficients(reduced_transform(grid), (grid.W, grid.H)), grid.m
    )


def spectral_baseline(grid: DensityGrid) -> FieldMap:
    """Comparison solver: full-period cosine modes over bin indices.

    Wave numbers fold above m/2 so each mode divides by its true squared
    frequency; the constant mode is skipped (the grid is mean-subtracted).
    """
    m = grid.m
    w = _workers()
    rho = grid.values
    coscos = np.real(
        scipy.fft.fft(np.real(scipy.fft.fft(rho, axis=0, workers=w)), axis=1, workers=w)
    )
    a = coscos / (m * m)
    omega = 2 * np.pi * scipy.fft.fftfreq(m)  # folded: 2*pi*u/m for u <= m/2
    denom = np.add.outer(omega**2, omega**2)
    denom[0, 0] = 1.0
    g = a / denom
    g[0, 0] = 0.0

    def coscos_sum(x):
        return np.real(
            scipy.fft.fft(np.real(scipy.fft.fft(x, axis=0, workers=w)), axis=1, workers=w)
        )

    psi = np.ascontiguousarray(coscos_sum(g))
    xi_x = np.ascontiguousarray(
        np.real(
            scipy.fft.fft(-np.imag(scipy.fft.fft(g * omega[:, None], axis=0, workers=w)), axis=1, workers=w)
        )
    )
    xi_y = np.ascontiguousarray(
        np.real(
            scipy.fft.fft(-np.imag(scipy.fft.fft(g * omega[None, :], axis=1, workers=w)), axis=0, workers=w)
        )
    )
    return FieldMap(m, psi, xi_x, xi_y, grid.W, grid.H)


def interpolate_field(fmap: FieldMap, x, y):
    """Potential and field at arbitrary points by bilinear interpolation of
    the four nearest bin centers, clamped at the boundary ring."""
    scalar = np.isscalar(x) and np.isscalar(y)
    xs = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    ys = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=float)))
    if np.any(xs < 0) or np.any(xs > fmap.W) or np.any(ys < 0) or np.any(ys > fmap.H):
        raise ValueError("point outside region")
    psi, xi_x, xi_y = _kernels.gather_bilinear3(
        np.ascontiguousarray(fmap.psi),
        np.ascontiguousarray(fmap.xi_x),
        np.ascontiguousarray(fmap.xi_y),
        xs,
        ys,
        fmap.w_b,
        fmap.h_b,
    )
    if scalar:
        return float(psi[0]), float(xi_x[0]), float(xi_y[0])
    return psi, xi_x, xi_y
