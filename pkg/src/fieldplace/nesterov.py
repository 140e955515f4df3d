"""Accelerated gradient steps with a backtracked local Lipschitz step length.

One call advances one iteration: the trial step length is the inverse
Lipschitz estimate |dv| / |dg| from the previous pair of gradient points and
shrinks until self-consistent, the accepted solution moves along the
gradient at the reference point, and the next reference point extrapolates
with the standard acceleration coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

GradFn = Callable[[np.ndarray], np.ndarray]
ClampFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class NesterovState:
    major: np.ndarray  # accepted solution
    reference: np.ndarray  # gradient evaluation point
    grad: np.ndarray  # gradient at reference
    step: float
    accel: float  # acceleration parameter a_k
    iteration: int = 0


def _check_finite(g: np.ndarray) -> None:
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("non-finite gradient; aborting optimization")


def nesterov_init(
    x0: np.ndarray, grad_fn: GradFn, step0: float | None = None, clamp: ClampFn | None = None
) -> NesterovState:
    """Start at x0; if no step length is given, probe one from a small move."""
    x0 = np.array(x0, dtype=float)
    if clamp is not None:
        x0 = clamp(x0)
    g0 = np.asarray(grad_fn(x0), dtype=float)
    _check_finite(g0)
    if step0 is None:
        gmax = float(np.max(np.abs(g0)))
        if gmax == 0.0:
            step0 = 1.0
        else:
            probe = 1e-2 * (1.0 + float(np.max(np.abs(x0)))) / gmax
            x1 = x0 - probe * g0
            if clamp is not None:
                x1 = clamp(x1)
            g1 = np.asarray(grad_fn(x1), dtype=float)
            _check_finite(g1)
            dg = float(np.linalg.norm(g1 - g0))
            step0 = float(np.linalg.norm(x1 - x0)) / dg if dg > 0 else probe
    return NesterovState(x0, x0.copy(), g0, float(step0), accel=1.0)


def nesterov_step(
    state: NesterovState,
    grad_fn: GradFn,
    clamp: ClampFn | None = None,
    max_backtracks: int = 10,
    accept: float = 0.95,
) -> NesterovState:
    """One accelerated iteration; re-estimates the step length by backtracking."""
    g = state.grad
    if not np.any(g):
        return state
    a_next = (1.0 + math.sqrt(4.0 * state.accel**2 + 1.0)) / 2.0
    coef = (state.accel - 1.0) / a_next

    alpha = state.step
    v, u = state.reference, state.major
    for _ in range(max_backtracks):
        u_next = v - alpha * g
        if clamp is not None:
            u_next = clamp(u_next)
        v_next = u_next + coef * (u_next - u)
        if clamp is not None:
            v_next = clamp(v_next)
        g_next = np.asarray(grad_fn(v_next), dtype=float)
        _check_finite(g_next)
        dg = float(np.linalg.norm(g_next - g))
        dv = float(np.linalg.norm(v_next - v))
        alpha_hat = dv / dg if dg > 0 else alpha
        if alpha_hat >= accept * alpha:
            break
        alpha = alpha_hat
    return NesterovState(
        major=u_next,
        reference=v_next,
        grad=g_next,
        step=alpha_hat,
        accel=a_next,
        iteration=state.iteration + 1,
    )
