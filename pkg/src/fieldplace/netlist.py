"""Circuit model and Bookshelf-format IO.

Supports the ISPD 2005/2006 dialect: .aux manifests pointing at .nodes,
.nets, .pl and .scl files. Routing-only fields (.wts, site orientation) are
ignored. All coordinates are normalized so the placement region is
[0, W] x [0, H]; the original origin is kept on the circuit and restored
when writing placements.
"""

from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass, field

import numpy as np

Placement = dict[str, tuple[float, float]]


class NetlistError(ValueError):
    pass


@dataclass(slots=True)
class Block:
    id: str
    w: float
    h: float
    movable: bool = True
    is_filler: bool = False
    x: float = 0.0
    y: float = 0.0

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(slots=True)
class Net:
    id: str
    pins: list[tuple[str, float, float]]  # (block id, dx, dy) offsets from center


@dataclass
class Circuit:
    blocks: list[Block]
    nets: list[Net]
    W: float
    H: float
    target_density: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)
    rows: list[tuple[float, float, float, float]] = field(default_factory=list)
    # rows: (y baseline, height, x_min, x_max), already origin-normalized

    def block_index(self) -> dict[str, int]:
        return {b.id: i for i, b in enumerate(self.blocks)}

    def positions(self) -> np.ndarray:
        return np.array([[b.x, b.y] for b in self.blocks], dtype=float)

    def movable_area(self) -> float:
        return sum(b.area for b in self.blocks if b.movable and not b.is_filler)

    def clone(self) -> "Circuit":
        return copy.deepcopy(self)

    def validate(self) -> None:
        if self.W <= 0 or self.H <= 0:
            raise NetlistError("placement region must have positive dimensions")
        ids = set()
        for b in self.blocks:
            if b.w <= 0 or b.h <= 0:
                raise NetlistError(f"block {b.id} has non-positive size")
            if b.id in ids:
                raise NetlistError(f"duplicate block id {b.id}")
            ids.add(b.id)
        fillers = {b.id for b in self.blocks if b.is_filler}
        for net in self.nets:
            if not net.pins:
                raise NetlistError(f"net {net.id} has no pins")
            for name, _, _ in net.pins:
                if name not in ids:
                    raise NetlistError(f"net {net.id} pin references unknown node {name}")
                if name in fillers:
                    raise NetlistError(f"net {net.id} pin references filler {name}")
        if self.movable_area() > self.W * self.H * self.target_density * (1 + 1e-9):
            raise NetlistError("total movable area exceeds region capacity")


def _tokens(path: str):
    """Yield (lineno, token list) for non-empty, non-comment lines."""
    try:
        fh = open(path)
    except OSError as exc:
        raise NetlistError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line or line.startswith("UCLA"):
                continue
            yield lineno, line.replace(":", " : ").split()


def _fail(path: str, lineno: int, msg: str) -> NetlistError:
    return NetlistError(f"{os.path.basename(path)}:{lineno}: {msg}")


def _parse_nodes(path: str) -> dict[str, Block]:
    blocks: dict[str, Block] = {}
    for lineno, tok in _tokens(path):
        if tok[0] in ("NumNodes", "NumTerminals"):
            continue
        try:
            name, w, h = tok[0], float(tok[1]), float(tok[2])
        except (IndexError, ValueError):
            raise _fail(path, lineno, f"malformed node line: {' '.join(tok)}")
        movable = not any(t.startswith("terminal") for t in tok[3:])
        if name in blocks:
            raise _fail(path, lineno, f"duplicate node {name}")
        blocks[name] = Block(name, w, h, movable=movable)
    return blocks


def _parse_pl(path: str, blocks: dict[str, Block]) -> None:
    for lineno, tok in _tokens(path):
        try:
            name, x, y = tok[0], float(tok[1]), float(tok[2])
        except (IndexError, ValueError):
            raise _fail(path, lineno, f"malformed placement line: {' '.join(tok)}")
        if name not in blocks:
            raise _fail(path, lineno, f"placement for unknown node {name}")
        b = blocks[name]
        b.x = x + b.w / 2
        b.y = y + b.h / 2
        if any(t.startswith("/FIXED") for t in tok):
            b.movable = False


def _parse_nets(path: str, blocks: dict[str, Block]) -> list[Net]:
    nets: list[Net] = []
    current: Net | None = None
    remaining = 0
    for lineno, tok in _tokens(path):
        if tok[0] in ("NumNets", "NumPins"):
            continue
        if tok[0] == "NetDegree":
            if remaining:
                raise _fail(path, lineno, f"net {current.id} is missing pins")
            try:
                remaining = int(tok[2])
            except (IndexError, ValueError):
                raise _fail(path, lineno, "malformed NetDegree line")
            name = tok[3] if len(tok) > 3 else f"net{len(nets)}"
            current = Net(name, [])
            nets.append(current)
            continue
        if current is None or remaining == 0:
            raise _fail(path, lineno, f"pin outside a net: {' '.join(tok)}")
        name = tok[0]
        if name not in blocks:
            raise _fail(path, lineno, f"pin references unknown node {name}")
        dx = dy = 0.0
        if ":" in tok:
            k = tok.index(":")
            try:
                dx, dy = float(tok[k + 1]), float(tok[k + 2])
            except (IndexError, ValueError):
                raise _fail(path, lineno, f"malformed pin offset: {' '.join(tok)}")
        current.pins.append((name, dx, dy))
        remaining -= 1
    if remaining:
        raise _fail(path, 0, f"net {current.id} is missing pins")
    return nets


def _parse_scl(path: str) -> list[tuple[float, float, float, float]]:
    rows: list[tuple[float, float, float, float]] = []
    y = height = origin = None
    sites = spacing = None
    for lineno, tok in _tokens(path):
        key = tok[0]
        if key == "CoreRow":
            y = height = origin = sites = spacing = None
        elif key == "Coordinate":
            y = float(tok[2])
        elif key == "Height":
            height = float(tok[2])
        elif key in ("Sitespacing", "Sitewidth"):
            if spacing is None or key == "Sitespacing":
                spacing = float(tok[2])
        elif key == "SubrowOrigin":
            origin = float(tok[2])
            if "NumSites" in tok:
                sites = float(tok[tok.index("NumSites") + 2])
        elif key == "End":
            if None in (y, height, origin, sites):
                raise _fail(path, lineno, "incomplete CoreRow block")
            rows.append((y, height, origin, origin + sites * (spacing or 1.0)))
    return rows


def parse_bookshelf(aux_path: str, target_density: float = 1.0) -> Circuit:
    """Parse a Bookshelf .aux manifest into a Circuit.

    Terminals are marked fixed, the region is the bounding box of the .scl
    rows translated to the origin, and pin offsets are read from .nets.
    """
    base = os.path.dirname(os.path.abspath(aux_path))
    files: dict[str, str] = {}
    for lineno, tok in _tokens(aux_path):
        for t in tok:
            ext = t.rsplit(".", 1)[-1].lower()
            if ext in ("nodes", "nets", "pl", "scl", "wts"):
                files[ext] = os.path.join(base, t)
    for ext in ("nodes", "nets", "pl", "scl"):
        if ext not in files:
            raise NetlistError(f"{os.path.basename(aux_path)}: no .{ext} file listed")

    blocks = _parse_nodes(files["nodes"])
    _parse_pl(files["pl"], blocks)
    nets = _parse_nets(files["nets"], blocks)
    rows = _parse_scl(files["scl"])

    x0 = min(r[2] for r in rows)
    x1 = max(r[3] for r in rows)
    y0 = min(r[0] for r in rows)
    y1 = max(r[0] + r[1] for r in rows)
    for b in blocks.values():
        b.x -= x0
        b.y -= y0
    rows = [(ry - y0, rh, ra - x0, rb - x0) for ry, rh, ra, rb in rows]

    circuit = Circuit(
        blocks=list(blocks.values()),
        nets=nets,
        W=x1 - x0,
        H=y1 - y0,
        target_density=target_density,
        origin=(x0, y0),
        rows=rows,
    )
    circuit.validate()
    return circuit


def generate_synthetic(
    n_cells: int,
    n_nets: int,
    region: tuple[float, float],
    seed: int,
    fill: float = 0.6,
) -> Circuit:
    """Generate a random circuit: uniform square cells, 2-5 pin nets.

    Deterministic for a fixed seed. Total cell area is fill * W * H
    (<= 0.7 of the region).
    """
    W, H = region
    if n_cells < 1:
        raise NetlistError("n_cells must be >= 1")
    if W <= 0 or H <= 0:
        raise NetlistError("region must be positive")
    if fill > 0.7:
        raise NetlistError(f"requested fill {fill} exceeds the 0.7 area budget")

    rng = np.random.default_rng(seed)
    side = math.sqrt(fill * W * H / n_cells)
    if side > min(W, H):
        raise NetlistError("cells do not fit in the region")
    xs = rng.uniform(side / 2, W - side / 2, n_cells)
    ys = rng.uniform(side / 2, H - side / 2, n_cells)
    blocks = [
        Block(f"c{i}", side, side, x=float(xs[i]), y=float(ys[i]))
        for i in range(n_cells)
    ]

    nets = []
    for j in range(n_nets):
        degree = min(int(rng.integers(2, 6)), n_cells)
        members = rng.choice(n_cells, size=degree, replace=False)
        nets.append(Net(f"n{j}", [(f"c{int(i)}", 0.0, 0.0) for i in members]))

    circuit = Circuit(blocks=blocks, nets=nets, W=W, H=H, target_density=1.0)
    circuit.validate()
    return circuit


def read_placement(path: str, circuit: Circuit) -> Placement:
    """Read a .pl file into a center-coordinate placement for the circuit."""
    sizes = {b.id: (b.w, b.h) for b in circuit.blocks}
    x_off, y_off = circuit.origin
    out: Placement = {}
    for lineno, tok in _tokens(path):
        try:
            name, x, y = tok[0], float(tok[1]), float(tok[2])
        except (IndexError, ValueError):
            raise _fail(path, lineno, f"malformed placement line: {' '.join(tok)}")
        if name not in sizes:
            raise _fail(path, lineno, f"placement for unknown node {name}")
        w, h = sizes[name]
        out[name] = (x - x_off + w / 2, y - y_off + h / 2)
    return out


def write_placement(circuit: Circuit, placement: Placement, path: str) -> None:
    """Write a Bookshelf .pl file for all non-filler blocks.

    Coordinates are emitted as lower-left corners in the circuit's original
    frame; fixed blocks carry the /FIXED suffix.
    """
    x_off, y_off = circuit.origin
    try:
        fh = open(path, "w")
    except OSError as exc:
        raise NetlistError(f"cannot write {path}: {exc}") from exc
    with fh:
        fh.write("UCLA pl 1.0\n\n")
        for b in circuit.blocks:
            if b.is_filler:
                continue
            if b.id not in placement:
                raise NetlistError(f"placement missing block {b.id}")
            x, y = placement[b.id]
            corner_x = x - b.w / 2 + x_off
            corner_y = y - b.h / 2 + y_off
            suffix = "" if b.movable else " /FIXED"
            fh.write(f"{b.id}\t{corner_x:.6f}\t{corner_y:.6f}\t: N{suffix}\n")
