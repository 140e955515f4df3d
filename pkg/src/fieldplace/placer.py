"""Global placement: smooth wirelength plus penalized field energy, driven by
accelerated gradient steps until the density overflow target is met.

Blocks and whitespace fillers carry charge equal to their area; each
iteration rebuilds the bin density, solves for the potential and field,
takes the energy gradient as charge times field, and advances one Nesterov
step. The density penalty grows geometrically from a gradient-balanced
start.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, fastsolve, series
from .density import DensityGrid, bin_density_from_rects, exact_density_from_rects
from .fastsolve import FieldMap, interpolate_field
from .nesterov import NesterovState, nesterov_init, nesterov_step
from .netlist import Block, Circuit, Placement

log = logging.getLogger(__name__)

SOLVERS = ("analytic-fast", "spectral-baseline", "exact-series")


@dataclass
class PlacerConfig:
    target_overflow: float = 0.10
    lambda0: float = 1e-4
    lambda_growth: float = 1.05
    gamma: float | None = None  # default: 2% of the average bin dimension
    max_iters: int = 2000
    filler_ratio: float = 1.0
    seed: int = 0
    bins: int | None = None
    solver: str = "analytic-fast"
    series_order: int = 64  # truncation for the exact-series solver

    def __post_init__(self):
        if not 0 < self.target_overflow < 1:
            raise ValueError("target_overflow must be in (0, 1)")
        if self.lambda_growth <= 1:
            raise ValueError("lambda_growth must be > 1")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; pick one of {SOLVERS}")

    @classmethod
    def from_file(cls, path: str, **overrides) -> "PlacerConfig":
        """Read key=value lines; CLI flags override file values."""
        values: dict = {}
        casts = {f.name: f.type for f in cls.__dataclass_fields__.values()}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                if key == "tau":
                    key = "target_overflow"
                if key not in casts:
                    raise ValueError(f"unknown config key {key!r} in {path}")
                val = val.strip()
                if key == "solver":
                    values[key] = val
                elif key in ("max_iters", "seed", "bins", "series_order"):
                    values[key] = int(val)
                else:
                    values[key] = float(val)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class TraceRow:
    iteration: int
    hpwl: float
    lse: float
    energy: float
    lam: float
    overflow: float
    wall_ms: float


@dataclass
class GradientInfo:
    wirelength: np.ndarray  # (n, 2) over the optimized blocks
    energy: np.ndarray
    total: np.ndarray


@dataclass
class PlacerState:
    positions: np.ndarray  # (n_opt, 2): movable blocks then fillers
    lam: float
    iteration: int
    nesterov: NesterovState | None
    trace: list[TraceRow] = field(default_factory=list)


def _net_arrays(circuit: Circuit, index: dict[str, int]):
    pin_block, pin_dx, pin_dy, net_start = [], [], [], [0]
    for net in circuit.nets:
        for name, dx, dy in net.pins:
            pin_block.append(index[name])
            pin_dx.append(dx)
            pin_dy.append(dy)
        net_start.append(len(pin_block))
    return (
        np.asarray(pin_block, dtype=np.int64),
        np.asarray(pin_dx, dtype=float),
        np.asarray(pin_dy, dtype=float),
        np.asarray(net_start, dtype=np.int64),
    )


def hpwl(circuit: Circuit, positions: np.ndarray) -> float:
    """Half-perimeter wirelength; positions follow circuit.blocks order."""
    pb, dx, dy, ns = _net_arrays(circuit, circuit.block_index())
    pos = np.asarray(positions, dtype=float)
    return _kernels.hpwl_total(
        np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]), pb, dx, dy, ns
    )


def lse_wirelength(circuit: Circuit, positions: np.ndarray, gamma: float):
    """Smooth wirelength and its gradient; upper-bounds hpwl, tightens as
    gamma -> 0."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    pb, dx, dy, ns = _net_arrays(circuit, circuit.block_index())
    pos = np.asarray(positions, dtype=float)
    value, gx, gy = _kernels.lse_wirelength_grad(
        np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]), pb, dx, dy, ns, gamma
    )
    return value, np.column_stack([gx, gy])


def potential_energy(positions: np.ndarray, fmap: FieldMap, charges: np.ndarray) -> float:
    """System energy: half the sum of charge times interpolated potential."""
    pos = np.asarray(positions, dtype=float)
    psi, _, _ = interpolate_field(fmap, pos[:, 0], pos[:, 1])
    return 0.5 * float(np.sum(np.asarray(charges) * psi))


def insert_fillers(circuit: Circuit, config: PlacerConfig) -> list[Block]:
    """Square whitespace fillers sized by the geometric mean of movable cell
    dimensions, uniformly scattered (seeded)."""
    W, H = circuit.W, circuit.H
    occupied = 0.0
    for b in circuit.blocks:
        if b.is_filler:
            continue
        ow = min(b.x + b.w / 2, W) - max(b.x - b.w / 2, 0.0)
        oh = min(b.y + b.h / 2, H) - max(b.y - b.h / 2, 0.0)
        occupied += max(ow, 0.0) * max(oh, 0.0)
    whitespace = W * H * circuit.target_density - occupied
    if whitespace <= 0:
        log.warning("no whitespace for fillers (deficit %.3g)", -whitespace)
        return []
    dims = [b for b in circuit.blocks if b.movable and not b.is_filler]
    if not dims:
        return []
    side = math.exp(
        (sum(math.log(b.w) for b in dims) + sum(math.log(b.h) for b in dims)) / (2 * len(dims))
    )
    count = int(config.filler_ratio * whitespace / (side * side))
    rng = np.random.default_rng(config.seed)
    xs = rng.uniform(side / 2, W - side / 2, count)
    ys = rng.uniform(side / 2, H - side / 2, count)
    return [
        Block(f"_filler{i}", side, side, movable=True, is_filler=True, x=float(xs[i]), y=float(ys[i]))
        for i in range(count)
    ]


def initial_lambda(lambda0: float, wl_grad: np.ndarray, energy_grad: np.ndarray) -> float:
    """Balance the penalty so lambda * |energy grad|_1 = lambda0 * |wl grad|_1."""
    denom = float(np.sum(np.abs(energy_grad)))
    if denom == 0.0:
        return lambda0
    return lambda0 * float(np.sum(np.abs(wl_grad))) / denom


def update_lambda(lam: float, growth: float) -> float:
    return lam * growth


def default_bins(n_blocks: int) -> int:
    """Power-of-two grid side near sqrt(n)."""
    if n_blocks < 4:
        return 2
    return int(min(2 ** math.ceil(math.log2(math.sqrt(n_blocks))), 1024))


class PlacementEngine:
    """Array-level placement state shared by the optimizer loop and the
    gradient checks."""

    def __init__(self, circuit: Circuit, config: PlacerConfig):
        self.circuit = circuit
        self.config = config
        self.fillers = insert_fillers(circuit, config)
        blocks = circuit.blocks + self.fillers
        self.blocks = blocks
        index = {b.id: i for i, b in enumerate(blocks)}

        self.x = np.array([b.x for b in blocks])
        self.y = np.array([b.y for b in blocks])
        self.w = np.array([b.w for b in blocks])
        self.h = np.array([b.h for b in blocks])
        self.q = self.w * self.h
        self.movable = np.array([b.movable for b in blocks])
        self.filler = np.array([b.is_filler for b in blocks])
        self.opt = np.flatnonzero(self.movable)  # variables: movable + fillers
        self.mov_cells = np.flatnonzero(self.movable & ~self.filler)

        self.pins = _net_arrays(circuit, index)
        self.W, self.H = circuit.W, circuit.H
        n_contrib = len(blocks)
        self.m = config.bins or default_bins(n_contrib)
        self.gamma = config.gamma or 0.02 * (self.W / self.m + self.H / self.m) / 2
        self.lo = np.column_stack([self.w[self.opt] / 2, self.h[self.opt] / 2])
        self.hi = np.column_stack(
            [self.W - self.w[self.opt] / 2, self.H - self.h[self.opt] / 2]
        )

        fixed = ~self.movable
        self.fixed_raw = self._raw_grid(self.x[fixed], self.y[fixed], self.w[fixed], self.h[fixed])
        self.last = {}

    def _raw_grid(self, xs, ys, ws, hs) -> np.ndarray:
        if xs.size == 0:
            return np.zeros((self.m, self.m))
        g = bin_density_from_rects(xs, ys, ws, hs, self.m, (self.W, self.H))
        return g.raw

    def clamp(self, pos: np.ndarray) -> np.ndarray:
        return np.clip(pos, self.lo, self.hi)

    def full_positions(self, pos: np.ndarray):
        x = self.x.copy()
        y = self.y.copy()
        x[self.opt] = pos[:, 0]
        y[self.opt] = pos[:, 1]
        return x, y

    def density_grid(self, pos: np.ndarray) -> DensityGrid:
        raw = self.fixed_raw + self._raw_grid(
            pos[:, 0], pos[:, 1], self.w[self.opt], self.h[self.opt]
        )
        mean = float(raw.sum()) / (self.m * self.m)
        return DensityGrid(self.m, self.W / self.m, self.H / self.m, raw - mean, mean, self.W, self.H)

    def field_at_opt(self, pos: np.ndarray):
        """Potential and field at the optimized block centers."""
        kind = self.config.solver
        if kind == "exact-series":
            x, y = self.full_positions(pos)
            d = exact_density_from_rects(x, y, self.w, self.h, (self.W, self.H))
            coeffs = series.exact_coefficients(d, self.config.series_order)
            psi = series.eval_potential(coeffs, pos[:, 0], pos[:, 1])
            xi_x, xi_y = series.eval_field(coeffs, pos[:, 0], pos[:, 1])
            return psi, xi_x, xi_y
        grid = self.density_grid(pos)
        if kind == "analytic-fast":
            fmap = fastsolve.solve_fast(grid)
        else:
            fmap = fastsolve.spectral_baseline(grid)
        return interpolate_field(fmap, pos[:, 0], pos[:, 1])

    def gradient_info(self, pos: np.ndarray, lam: float) -> GradientInfo:
        x, y = self.full_positions(pos)
        lse, gx, gy = _kernels.lse_wirelength_grad(x, y, *self.pins, self.gamma)
        wl_grad = np.column_stack([gx[self.opt], gy[self.opt]])
        psi, xi_x, xi_y = self.field_at_opt(pos)
        energy_grad = -np.column_stack([self.q[self.opt] * xi_x, self.q[self.opt] * xi_y])
        self.last = {
            "lse": float(lse),
            "energy": 0.5 * float(np.sum(self.q[self.opt] * psi)),
        }
        return GradientInfo(wl_grad, energy_grad, wl_grad + lam * energy_grad)

    def objective(self, pos: np.ndarray, lam: float) -> float:
        """f = smooth wirelength + lambda * energy, fully recomputed at pos."""
        x, y = self.full_positions(pos)
        lse, _, _ = _kernels.lse_wirelength_grad(x, y, *self.pins, self.gamma)
        psi, _, _ = self.field_at_opt(pos)
        return float(lse) + lam * 0.5 * float(np.sum(self.q[self.opt] * psi))

    def movable_overflow(self, pos: np.ndarray) -> float:
        cells = self.mov_cells
        sel = np.isin(self.opt, cells)
        xs, ys = pos[sel, 0], pos[sel, 1]
        movable_area = float(np.sum(self.q[cells]))
        if movable_area == 0:
            return 0.0
        grid = bin_density_from_rects(
            xs, ys, self.w[cells], self.h[cells], self.m, (self.W, self.H)
        )
        over = np.maximum(grid.raw - self.circuit.target_density, 0.0)
        return float(over.sum() * grid.w_b * grid.h_b / movable_area)

    def hpwl_at(self, pos: np.ndarray) -> float:
        x, y = self.full_positions(pos)
        return _kernels.hpwl_total(x, y, *self.pins)


def run_global_placement(circuit: Circuit, config: PlacerConfig):
    """Spread the circuit until the overflow target is met.

    Returns (placement for all non-filler blocks, trace rows). On hitting
    max_iters the best-overflow iterate is returned with a warning.
    """
    circuit.validate()
    engine = PlacementEngine(circuit, config)
    pos0 = engine.clamp(np.column_stack([engine.x[engine.opt], engine.y[engine.opt]]))
    t0 = time.perf_counter()

    state = PlacerState(positions=pos0, lam=0.0, iteration=0, nesterov=None)
    info = engine.gradient_info(pos0, 0.0)
    state.lam = initial_lambda(config.lambda0, info.wirelength, info.energy)

    def grad_fn(p):
        return engine.gradient_info(p, state.lam).total

    nes = nesterov_init(pos0, grad_fn, clamp=engine.clamp)
    best_pos, best_overflow = pos0, math.inf
    converged = False
    for k in range(config.max_iters + 1):
        overflow = engine.movable_overflow(nes.major)
        if overflow <= best_overflow:
            best_pos, best_overflow = nes.major, overflow
        state.trace.append(
            TraceRow(
                iteration=k,
                hpwl=engine.hpwl_at(nes.major),
                lse=engine.last.get("lse", 0.0),
                energy=engine.last.get("energy", 0.0),
                lam=state.lam,
                overflow=overflow,
                wall_ms=(time.perf_counter() - t0) * 1e3,
            )
        )
        if overflow <= config.target_overflow:
            converged = True
            break
        if k == config.max_iters:
            break
        nes = nesterov_step(nes, grad_fn, clamp=engine.clamp)
        state.lam = update_lambda(state.lam, config.lambda_growth)
        state.iteration = k + 1
    state.nesterov = nes

    if not converged:
        log.warning(
            "max_iters reached; returning best-overflow iterate (overflow %.4f)",
            best_overflow,
        )
    final = best_pos
    state.positions = final
    x, y = engine.full_positions(final)
    placement: Placement = {
        b.id: (float(x[i]), float(y[i]))
        for i, b in enumerate(engine.blocks)
        if not b.is_filler
    }
    return placement, state.trace
