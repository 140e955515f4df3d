"""Row legalization and light detailed placement.

Greedy Tetris-style packing: cells are processed left to right and snapped
to the cheapest feasible slot in nearby rows; macros and fixed blocks are
blockages. A swap pass then exchanges adjacent cells in a row whenever that
strictly shortens the wirelength.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .netlist import Circuit
from .placer import hpwl


class LegalizeError(RuntimeError):
    pass


@dataclass
class Segment:
    x0: float
    x1: float
    tail: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.tail is None:
            self.tail = self.x0


@dataclass
class Row:
    y: float
    height: float
    segments: list[Segment]


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def build_rows(circuit: Circuit, blockages: list[tuple[float, float, float, float]]) -> list[Row]:
    """Rows from the circuit (or synthesized uniform ones), with free
    segments carved around blockage rectangles (x0, x1, y0, y1)."""
    geom = circuit.rows
    if not geom:
        heights = sorted(b.h for b in circuit.blocks if b.movable and not b.is_filler)
        if not heights:
            return []
        h = heights[len(heights) // 2]
        count = max(int(circuit.H / h), 1)
        geom = [(i * h, h, 0.0, circuit.W) for i in range(count)]
    rows = []
    for ry, rh, rx0, rx1 in geom:
        blocked = [
            (max(bx0, rx0), min(bx1, rx1))
            for bx0, bx1, by0, by1 in blockages
            if by0 < ry + rh and by1 > ry and bx1 > rx0 and bx0 < rx1
        ]
        segments = []
        cursor = rx0
        for a, b in _merge(blocked):
            if a > cursor:
                segments.append(Segment(cursor, a))
            cursor = max(cursor, b)
        if cursor < rx1:
            segments.append(Segment(cursor, rx1))
        rows.append(Row(ry, rh, segments))
    return rows


def _free(rect: tuple, placed: list[tuple]) -> bool:
    return not any(
        rect[0] < r[1] and rect[1] > r[0] and rect[2] < r[3] and rect[3] > r[2]
        for r in placed
    )


def _place_macros(circuit: Circuit, pos: np.ndarray, macro_idx: list[int]) -> list[tuple]:
    """Snap oversized movable blocks to overlap-free spots near their
    positions; fixed blocks are immovable obstacles."""
    placed = [
        (b.x - b.w / 2, b.x + b.w / 2, b.y - b.h / 2, b.y + b.h / 2)
        for b in circuit.blocks
        if not b.movable
    ]
    for i in sorted(macro_idx, key=lambda i: -circuit.blocks[i].area):
        b = circuit.blocks[i]
        x = min(max(pos[i, 0], b.w / 2), circuit.W - b.w / 2)
        y = min(max(pos[i, 1], b.h / 2), circuit.H - b.h / 2)
        # Candidate lattice around the wanted spot, nearest first.
        nx = max(int(2 * circuit.W / b.w), 1)
        ny = max(int(2 * circuit.H / b.h), 1)
        cand_x = np.linspace(b.w / 2, circuit.W - b.w / 2, nx + 1)
        cand_y = np.linspace(b.h / 2, circuit.H - b.h / 2, ny + 1)
        gx, gy = np.meshgrid(cand_x, cand_y, indexing="ij")
        flat = np.column_stack([np.concatenate(([x], gx.ravel())), np.concatenate(([y], gy.ravel()))])
        order = np.argsort(np.hypot(flat[:, 0] - x, flat[:, 1] - y), kind="stable")
        for cx, cy in flat[order]:
            rect = (cx - b.w / 2, cx + b.w / 2, cy - b.h / 2, cy + b.h / 2)
            if _free(rect, placed):
                pos[i] = (cx, cy)
                placed.append(rect)
                break
        else:
            raise LegalizeError(f"insufficient space for macro {b.id}")
    return placed


def legalize_rows(circuit: Circuit, positions: np.ndarray) -> np.ndarray:
    """Snap movable cells into non-overlapping row slots near their global
    positions. Raises LegalizeError naming the first cell that does not fit."""
    pos = np.array(positions, dtype=float)
    row_probe = [b.h for b in circuit.blocks if b.movable and not b.is_filler]
    if not row_probe:
        return pos
    if circuit.rows:
        row_height = circuit.rows[0][1]
    else:
        row_height = sorted(row_probe)[len(row_probe) // 2]

    cells, macros = [], []
    for i, b in enumerate(circuit.blocks):
        if not b.movable or b.is_filler:
            continue
        (macros if b.h > row_height * (1 + 1e-9) else cells).append(i)

    blockages = _place_macros(circuit, pos, macros)
    rows = build_rows(circuit, blockages)
    if not rows and cells:
        raise LegalizeError("no rows available")
    order = sorted(cells, key=lambda i: pos[i, 0] - circuit.blocks[i].w / 2)
    by_dy = sorted(range(len(rows)), key=lambda r: rows[r].y)

    for i in order:
        b = circuit.blocks[i]
        want_x = pos[i, 0] - b.w / 2
        want_y = pos[i, 1]
        ranked = sorted(by_dy, key=lambda r: abs(rows[r].y + b.h / 2 - want_y))
        best = None  # (cost, row, segment, x)
        for r in ranked:
            row = rows[r]
            dy = abs(row.y + b.h / 2 - want_y)
            if best is not None and dy >= best[0]:
                break
            for seg in row.segments:
                if seg.x1 - seg.tail < b.w:
                    continue
                x = min(max(want_x, seg.tail), seg.x1 - b.w)
                cost = abs(x - want_x) + dy
                if best is None or cost < best[0]:
                    best = (cost, row, seg, x)
        if best is None:
            raise LegalizeError(f"insufficient row capacity for cell {b.id}")
        _, row, seg, x = best
        seg.tail = x + b.w
        pos[i] = (x + b.w / 2, row.y + b.h / 2)
    return pos


def detailed_swap(circuit: Circuit, positions: np.ndarray) -> np.ndarray:
    """Swap adjacent same-row cells while that strictly reduces wirelength.

    Input must be legal; legality is preserved and the result never has a
    larger wirelength than the input.
    """
    pos = np.array(positions, dtype=float)
    index = circuit.block_index()
    nets_of: dict[int, list[int]] = {}
    net_pins = []
    for n, net in enumerate(circuit.nets):
        pins = [(index[name], dx, dy) for name, dx, dy in net.pins]
        net_pins.append(pins)
        for i, _, _ in pins:
            nets_of.setdefault(i, []).append(n)

    def net_len(n: int) -> float:
        xs = [pos[i, 0] + dx for i, dx, _ in net_pins[n]]
        ys = [pos[i, 1] + dy for i, _, dy in net_pins[n]]
        return max(xs) - min(xs) + max(ys) - min(ys)

    rows: dict[float, list[int]] = {}
    for i, b in enumerate(circuit.blocks):
        if b.movable and not b.is_filler:
            rows.setdefault(round(pos[i, 1], 9), []).append(i)

    for _ in range(64):
        changed = False
        for members in rows.values():
            members.sort(key=lambda i: pos[i, 0])
            for k in range(len(members) - 1):
                li, ri = members[k], members[k + 1]
                lb, rb = circuit.blocks[li], circuit.blocks[ri]
                affected = sorted(set(nets_of.get(li, []) + nets_of.get(ri, [])))
                if not affected:
                    continue
                before = sum(net_len(n) for n in affected)
                a_l = pos[li, 0] - lb.w / 2
                right_edge = pos[ri, 0] + rb.w / 2
                old = (pos[li, 0], pos[ri, 0])
                pos[li, 0] = right_edge - lb.w / 2
                pos[ri, 0] = a_l + rb.w / 2
                after = sum(net_len(n) for n in affected)
                if after < before - 1e-12:
                    members[k], members[k + 1] = ri, li
                    changed = True
                else:
                    pos[li, 0], pos[ri, 0] = old
        if not changed:
            break
    return pos


def count_overlaps(circuit: Circuit, positions: np.ndarray, tol: float = 1e-9) -> int:
    """Number of placed-block pairs whose rectangles intersect with positive
    area. Pairs of fixed blocks are the input's business and are skipped."""
    rects = []
    for i, b in enumerate(circuit.blocks):
        if b.is_filler:
            continue
        x, y = positions[i]
        rects.append((x - b.w / 2, x + b.w / 2, y - b.h / 2, y + b.h / 2, b.movable))
    rects.sort()
    count = 0
    active: list[tuple] = []
    for r in rects:
        active = [a for a in active if a[1] > r[0] + tol]
        for a in active:
            if (r[4] or a[4]) and r[2] < a[3] - tol and r[3] > a[2] + tol:
                count += 1
        active.append(r)
    return count


def legal_hpwl(circuit: Circuit, positions: np.ndarray) -> float:
    return hpwl(circuit, positions)
