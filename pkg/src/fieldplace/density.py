"""Charge-density models: the exact per-rectangle density and the binned grid.

Every block is a positive charge whose quantity is its area. The continuous
density is a sum of rectangle indicators minus its region mean, so it
integrates to zero; the binned density spreads block areas over an m x m
grid with local smoothing and subtracts the grid mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .netlist import Circuit, Placement


@dataclass
class ExactDensity:
    """Rectangle-sum density, clipped to the region and mean-subtracted."""

    x: np.ndarray  # centers
    y: np.ndarray
    w: np.ndarray
    h: np.ndarray
    W: float
    H: float

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def q(self) -> np.ndarray:
        return self.w * self.h

    @property
    def mean(self) -> float:
        return float(np.sum(self.q)) / (self.W * self.H)


def exact_density_from_rects(x, y, w, h, region) -> ExactDensity:
    """Clip rectangles to the region and drop the ones left with no area."""
    W, H = region
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    x0 = np.clip(x - w / 2, 0.0, W)
    x1 = np.clip(x + w / 2, 0.0, W)
    y0 = np.clip(y - h / 2, 0.0, H)
    y1 = np.clip(y + h / 2, 0.0, H)
    keep = (x1 > x0) & (y1 > y0)
    return ExactDensity(
        x=(x0 + x1)[keep] / 2,
        y=(y0 + y1)[keep] / 2,
        w=(x1 - x0)[keep],
        h=(y1 - y0)[keep],
        W=W,
        H=H,
    )


def exact_density_for(circuit: Circuit, placement: Placement | None = None) -> ExactDensity:
    pos = placement or {b.id: (b.x, b.y) for b in circuit.blocks}
    xs = [pos[b.id][0] for b in circuit.blocks]
    ys = [pos[b.id][1] for b in circuit.blocks]
    ws = [b.w for b in circuit.blocks]
    hs = [b.h for b in circuit.blocks]
    return exact_density_from_rects(xs, ys, ws, hs, (circuit.W, circuit.H))


def exact_density_at(d: ExactDensity, point: tuple[float, float]) -> float:
    """Evaluate the mean-subtracted density at a point of the region.

    A point on a rectangle edge counts as covered.
    """
    px, py = point
    if not (0 <= px <= d.W and 0 <= py <= d.H):
        raise ValueError(f"point {point} outside region")
    covered = (np.abs(px - d.x) <= d.w / 2) & (np.abs(py - d.y) <= d.h / 2)
    return float(np.count_nonzero(covered)) - d.mean


@dataclass
class DensityGrid:
    """Mean-subtracted m x m bin densities, indexed [l, j] with l along x."""

    m: int
    w_b: float
    h_b: float
    values: np.ndarray  # mean-subtracted area ratios
    raw_mean: float
    W: float
    H: float

    @property
    def raw(self) -> np.ndarray:
        return self.values + self.raw_mean


def bin_density_from_rects(x, y, w, h, m, region, smooth=True) -> DensityGrid:
    """Scatter rectangle areas onto an m x m grid and subtract the mean.

    With smoothing, a rectangle smaller than a bin is inflated to bin size
    and its contribution scaled by original/inflated area; its footprint is
    shifted to stay inside the region so total mass is preserved.
    """
    if m < 2:
        raise ValueError("bin count must be >= 2")
    W, H = region
    w_b, h_b = W / m, H / m
    d = exact_density_from_rects(x, y, w, h, region)
    grid = np.zeros((m, m))
    if d.n:
        if smooth:
            we = np.minimum(np.maximum(d.w, w_b), W)
            he = np.minimum(np.maximum(d.h, h_b), H)
            scale = d.q / (we * he)
            cx = np.clip(d.x, we / 2, W - we / 2)
            cy = np.clip(d.y, he / 2, H - he / 2)
        else:
            we, he, scale = d.w, d.h, np.ones(d.n)
            cx, cy = d.x, d.y
        _kernels.scatter_rects(
            np.ascontiguousarray(cx - we / 2),
            np.ascontiguousarray(cx + we / 2),
            np.ascontiguousarray(cy - he / 2),
            np.ascontiguousarray(cy + he / 2),
            np.ascontiguousarray(scale / (w_b * h_b)),
            grid,
            w_b,
            h_b,
        )
    raw_mean = float(grid.sum()) / (m * m)
    return DensityGrid(m, w_b, h_b, grid - raw_mean, raw_mean, W, H)


def build_bin_density(
    placement: Placement,
    circuit: Circuit,
    m: int,
    include_fixed: bool = True,
    include_fillers: bool = True,
    smooth: bool = True,
) -> DensityGrid:
    """Binned density of the circuit at the given placement."""
    xs, ys, ws, hs = [], [], [], []
    for b in circuit.blocks:
        if not b.movable and not include_fixed:
            continue
        if b.is_filler and not include_fillers:
            continue
        px, py = placement.get(b.id, (b.x, b.y))
        xs.append(px)
        ys.append(py)
        ws.append(b.w)
        hs.append(b.h)
    return bin_density_from_rects(xs, ys, ws, hs, m, (circuit.W, circuit.H), smooth=smooth)


def overflow_ratio(grid: DensityGrid, circuit: Circuit) -> float:
    """Fraction of movable area above the per-bin target density.

    The grid must hold movable, non-filler blocks only.
    """
    movable = circuit.movable_area()
    if movable <= 0:
        return 0.0
    over = np.maximum(grid.raw - circuit.target_density, 0.0)
    return float(over.sum() * grid.w_b * grid.h_b / movable)
