"""Pure-numpy implementations of the per-iteration hot kernels.

Drop-in equivalents of the compiled routines in ``_kernels_cy``; selected
automatically when the extension is missing (see ``fieldplace._kernels``).
"""

from __future__ import annotations

import numpy as np

IMPL = "python"


def scatter_rects(x0, x1, y0, y1, weight, grid, wb, hb):
    """Accumulate weight * overlap_area(rect, bin) into an (m, m) grid.

    Rectangles must already be clipped to the grid extent [0, m*wb] x [0, m*hb].
    grid is indexed [l, j] with l the x bin index.
    """
    m = grid.shape[0]
    w = np.asarray(x1) - np.asarray(x0)
    h = np.asarray(y1) - np.asarray(y0)
    alive = (w > 0) & (h > 0) & (np.asarray(weight) != 0)
    if not np.any(alive):
        return grid
    x0 = np.asarray(x0)[alive]
    x1 = np.asarray(x1)[alive]
    y0 = np.asarray(y0)[alive]
    y1 = np.asarray(y1)[alive]
    wt = np.asarray(weight)[alive]

    l0 = np.clip(np.floor(x0 / wb).astype(np.int64), 0, m - 1)
    l1 = np.clip(np.ceil(x1 / wb).astype(np.int64) - 1, 0, m - 1)
    l1 = np.maximum(l1, l0)
    j0 = np.clip(np.floor(y0 / hb).astype(np.int64), 0, m - 1)
    j1 = np.clip(np.ceil(y1 / hb).astype(np.int64) - 1, 0, m - 1)
    j1 = np.maximum(j1, j0)

    small = (l1 - l0 <= 1) & (j1 - j0 <= 1)

    if np.any(small):
        sl0, sl1 = l0[small], l1[small]
        sj0, sj1 = j0[small], j1[small]
        sx0, sx1 = x0[small], x1[small]
        sy0, sy1 = y0[small], y1[small]
        swt = wt[small]
        # Overlap with the left/bottom bin and (when the rect spans two bins)
        # the right/top one; the second overlap is zero for single-bin spans.
        oxl = np.minimum(sx1, (sl0 + 1) * wb) - sx0
        oxr = np.where(sl1 > sl0, sx1 - sl1 * wb, 0.0)
        oyb = np.minimum(sy1, (sj0 + 1) * hb) - sy0
        oyt = np.where(sj1 > sj0, sy1 - sj1 * hb, 0.0)
        np.add.at(grid, (sl0, sj0), swt * oxl * oyb)
        np.add.at(grid, (sl1, sj0), swt * oxr * oyb)
        np.add.at(grid, (sl0, sj1), swt * oxl * oyt)
        np.add.at(grid, (sl1, sj1), swt * oxr * oyt)

    # Rectangles spanning 3+ bins (macros): rare, handled one at a time.
    for i in np.flatnonzero(~small):
        ls = np.arange(l0[i], l1[i] + 1)
        js = np.arange(j0[i], j1[i] + 1)
        ox = np.minimum(x1[i], (ls + 1) * wb) - np.maximum(x0[i], ls * wb)
        oy = np.minimum(y1[i], (js + 1) * hb) - np.maximum(y0[i], js * hb)
        grid[l0[i] : l1[i] + 1, j0[i] : j1[i] + 1] += wt[i] * np.outer(ox, oy)
    return grid


def gather_bilinear3(g1, g2, g3, xs, ys, wb, hb):
    """Bilinearly interpolate three (m, m) bin-center grids at the given points.

    Points in the outer half-bin ring clamp to the boundary bin values.
    """
    m = g1.shape[0]
    fx = np.asarray(xs) / wb - 0.5
    fy = np.asarray(ys) / hb - 0.5
    i0 = np.clip(np.floor(fx).astype(np.int64), 0, max(m - 2, 0))
    j0 = np.clip(np.floor(fy).astype(np.int64), 0, max(m - 2, 0))
    tx = np.clip(fx - i0, 0.0, 1.0)
    ty = np.clip(fy - j0, 0.0, 1.0)
    i1 = np.minimum(i0 + 1, m - 1)
    j1 = np.minimum(j0 + 1, m - 1)

    w00 = (1.0 - tx) * (1.0 - ty)
    w10 = tx * (1.0 - ty)
    w01 = (1.0 - tx) * ty
    w11 = tx * ty

    def interp(g):
        return (
            w00 * g[i0, j0] + w10 * g[i1, j0] + w01 * g[i0, j1] + w11 * g[i1, j1]
        )

    return interp(g1), interp(g2), interp(g3)


def lse_wirelength_grad(posx, posy, pin_block, pin_dx, pin_dy, net_start, gamma):
    """Log-sum-exp wirelength and its gradient w.r.t. block positions.

    Per net and axis: gamma*ln(sum exp(x/gamma)) + gamma*ln(sum exp(-x/gamma)),
    stabilized by max/min subtraction. Returns (value, gradx, grady) with the
    gradients accumulated per block.
    """
    n_blocks = posx.shape[0]
    gradx = np.zeros(n_blocks)
    grady = np.zeros(n_blocks)
    n_nets = net_start.shape[0] - 1
    if n_nets == 0:
        return 0.0, gradx, grady

    starts = net_start[:-1]
    degrees = np.diff(net_start)
    pin_net = np.repeat(np.arange(n_nets), degrees)

    value = 0.0
    for coords, offs, grad in ((posx, pin_dx, gradx), (posy, pin_dy, grady)):
        p = coords[pin_block] + offs
        hi = np.maximum.reduceat(p, starts)
        lo = np.minimum.reduceat(p, starts)
        e_hi = np.exp((p - hi[pin_net]) / gamma)
        e_lo = np.exp((lo[pin_net] - p) / gamma)
        s_hi = np.add.reduceat(e_hi, starts)
        s_lo = np.add.reduceat(e_lo, starts)
        value += np.sum(hi - lo + gamma * (np.log(s_hi) + np.log(s_lo)))
        np.add.at(grad, pin_block, e_hi / s_hi[pin_net] - e_lo / s_lo[pin_net])
    return float(value), gradx, grady


def hpwl_total(posx, posy, pin_block, pin_dx, pin_dy, net_start):
    """Sum of per-net bounding-box half-perimeters."""
    if net_start.shape[0] <= 1:
        return 0.0
    starts = net_start[:-1]
    px = posx[pin_block] + pin_dx
    py = posy[pin_block] + pin_dy
    spans = (
        np.maximum.reduceat(px, starts)
        - np.minimum.reduceat(px, starts)
        + np.maximum.reduceat(py, starts)
        - np.minimum.reduceat(py, starts)
    )
    return float(np.sum(spans))
