# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: density scatter, field gather, wirelength.

Same contracts as the pure-numpy fallbacks in ``_kernels_py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, exp, floor, log

IMPL = "cython"


def scatter_rects(double[::1] x0, double[::1] x1, double[::1] y0, double[::1] y1,
                  double[::1] weight, double[:, ::1] grid, double wb, double hb):
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t m = grid.shape[0]
    cdef Py_ssize_t i, l, j, l0, l1, j0, j1
    cdef double wt, ox, oy, lo, hi
    for i in range(n):
        wt = weight[i]
        if wt == 0.0 or x1[i] <= x0[i] or y1[i] <= y0[i]:
            continue
        l0 = <Py_ssize_t>floor(x0[i] / wb)
        l1 = <Py_ssize_t>ceil(x1[i] / wb) - 1
        j0 = <Py_ssize_t>floor(y0[i] / hb)
        j1 = <Py_ssize_t>ceil(y1[i] / hb) - 1
        if l0 < 0: l0 = 0
        if j0 < 0: j0 = 0
        if l1 > m - 1: l1 = m - 1
        if j1 > m - 1: j1 = m - 1
        if l1 < l0: l1 = l0
        if j1 < j0: j1 = j0
        for l in range(l0, l1 + 1):
            lo = l * wb
            hi = lo + wb
            ox = (x1[i] if x1[i] < hi else hi) - (x0[i] if x0[i] > lo else lo)
            if ox <= 0.0:
                continue
            for j in range(j0, j1 + 1):
                lo = j * hb
                hi = lo + hb
                oy = (y1[i] if y1[i] < hi else hi) - (y0[i] if y0[i] > lo else lo)
                if oy > 0.0:
                    grid[l, j] += wt * ox * oy
    return np.asarray(grid)


def gather_bilinear3(double[:, ::1] g1, double[:, ::1] g2, double[:, ::1] g3,
                     double[::1] xs, double[::1] ys, double wb, double hb):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t m = g1.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o1 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o2 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] o3 = np.empty(n)
    cdef double[::1] v1 = o1, v2 = o2, v3 = o3
    cdef Py_ssize_t i, i0, j0, i1, j1
    cdef double fx, fy, tx, ty, w00, w10, w01, w11
    for i in range(n):
        fx = xs[i] / wb - 0.5
        fy = ys[i] / hb - 0.5
        i0 = <Py_ssize_t>floor(fx)
        j0 = <Py_ssize_t>floor(fy)
        if i0 < 0: i0 = 0
        if j0 < 0: j0 = 0
        if i0 > m - 2: i0 = m - 2
        if j0 > m - 2: j0 = m - 2
        tx = fx - i0
        ty = fy - j0
        if tx < 0.0: tx = 0.0
        if tx > 1.0: tx = 1.0
        if ty < 0.0: ty = 0.0
        if ty > 1.0: ty = 1.0
        i1 = i0 + 1
        j1 = j0 + 1
        w00 = (1.0 - tx) * (1.0 - ty)
        w10 = tx * (1.0 - ty)
        w01 = (1.0 - tx) * ty
        w11 = tx * ty
        v1[i] = w00 * g1[i0, j0] + w10 * g1[i1, j0] + w01 * g1[i0, j1] + w11 * g1[i1, j1]
        v2[i] = w00 * g2[i0, j0] + w10 * g2[i1, j0] + w01 * g2[i0, j1] + w11 * g2[i1, j1]
        v3[i] = w00 * g3[i0, j0] + w10 * g3[i1, j0] + w01 * g3[i0, j1] + w11 * g3[i1, j1]
    return o1, o2, o3


def lse_wirelength_grad(double[::1] posx, double[::1] posy,
                        cnp.int64_t[::1] pin_block, double[::1] pin_dx, double[::1] pin_dy,
                        cnp.int64_t[::1] net_start, double gamma):
    cdef Py_ssize_t n_blocks = posx.shape[0]
    cdef Py_ssize_t n_nets = net_start.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gx_arr = np.zeros(n_blocks)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gy_arr = np.zeros(n_blocks)
    cdef double[::1] gradx = gx_arr
    cdef double[::1] grady = gy_arr
    cdef double value = 0.0
    cdef Py_ssize_t e, k, a, b
    cdef double hi, lo, s_hi, s_lo, p
    cdef int axis
    cdef double[::1] coords
    cdef double[::1] offs
    cdef double[::1] grad
    for axis in range(2):
        coords = posx if axis == 0 else posy
        offs = pin_dx if axis == 0 else pin_dy
        grad = gradx if axis == 0 else grady
        for e in range(n_nets):
            a = net_start[e]
            b = net_start[e + 1]
            hi = coords[pin_block[a]] + offs[a]
            lo = hi
            for k in range(a + 1, b):
                p = coords[pin_block[k]] + offs[k]
                if p > hi: hi = p
                if p < lo: lo = p
            s_hi = 0.0
            s_lo = 0.0
            for k in range(a, b):
                p = coords[pin_block[k]] + offs[k]
                s_hi += exp((p - hi) / gamma)
                s_lo += exp((lo - p) / gamma)
            value += hi - lo + gamma * (log(s_hi) + log(s_lo))
            for k in range(a, b):
                p = coords[pin_block[k]] + offs[k]
                grad[pin_block[k]] += exp((p - hi) / gamma) / s_hi - exp((lo - p) / gamma) / s_lo
    return value, gx_arr, gy_arr


def hpwl_total(double[::1] posx, double[::1] posy,
               cnp.int64_t[::1] pin_block, double[::1] pin_dx, double[::1] pin_dy,
               cnp.int64_t[::1] net_start):
    cdef Py_ssize_t n_nets = net_start.shape[0] - 1
    cdef double total = 0.0
    cdef Py_ssize_t e, k, a, b
    cdef double xhi, xlo, yhi, ylo, px, py
    for e in range(n_nets):
        a = net_start[e]
        b = net_start[e + 1]
        xhi = posx[pin_block[a]] + pin_dx[a]
        xlo = xhi
        yhi = posy[pin_block[a]] + pin_dy[a]
        ylo = yhi
        for k in range(a + 1, b):
            px = posx[pin_block[k]] + pin_dx[k]
            py = posy[pin_block[k]] + pin_dy[k]
            if px > xhi: xhi = px
            if px < xlo: xlo = px
            if py > yhi: yhi = py
            if py < ylo: ylo = py
        total += (xhi - xlo) + (yhi - ylo)
    return total
