import numpy as np
import pytest

from fieldplace.density import exact_density_from_rects
from fieldplace.netlist import generate_synthetic

NODES = """\
UCLA nodes 1.0
# hand-written 4-node fixture
NumNodes : 4
NumTerminals : 2
    a 2 2
    b 2 2
    t1 2 2 terminal
    t2 2 2 terminal
"""

NETS = """\
UCLA nets 1.0
NumNets : 2
NumPins : 4
NetDegree : 2 n0
    a I : 0.5 0.0
    t1 O : 0.0 0.0
NetDegree : 2 n1
    b I
    t2 O
"""

PL = """\
UCLA pl 1.0
a 1 1 : N
b 5 5 : N
t1 0 0 : N /FIXED
t2 8 8 : N /FIXED
"""

WTS = "UCLA wts 1.0\n"


def scl_text(n_rows=5, height=2, sites=10, x0=0, y0=0):
    parts = ["UCLA scl 1.0", f"NumRows : {n_rows}", ""]
    for i in range(n_rows):
        parts += [
            "CoreRow Horizontal",
            f"  Coordinate    : {y0 + i * height}",
            f"  Height        : {height}",
            "  Sitewidth     : 1",
            "  Sitespacing   : 1",
            "  Siteorient    : 1",
            "  Sitesymmetry  : 1",
            f"  SubrowOrigin  : {x0}  NumSites : {sites}",
            "End",
        ]
    return "\n".join(parts) + "\n"


def write_fixture(dirpath, pl_text=PL):
    (dirpath / "fix.aux").write_text("RowBasedPlacement : fix.nodes fix.nets fix.wts fix.pl fix.scl\n")
    (dirpath / "fix.nodes").write_text(NODES)
    (dirpath / "fix.nets").write_text(NETS)
    (dirpath / "fix.wts").write_text(WTS)
    (dirpath / "fix.pl").write_text(pl_text)
    (dirpath / "fix.scl").write_text(scl_text())
    return dirpath / "fix.aux"


@pytest.fixture
def bookshelf_dir(tmp_path):
    return write_fixture(tmp_path)


def random_density(seed, n=10, region=(1.0, 1.0)):
    """Random blocks well inside the region."""
    rng = np.random.default_rng(seed)
    W, H = region
    w = rng.uniform(0.05, 0.2, n) * W
    h = rng.uniform(0.05, 0.2, n) * H
    x = rng.uniform(0.12 * W, 0.88 * W, n)
    y = rng.uniform(0.12 * H, 0.88 * H, n)
    return exact_density_from_rects(x, y, w, h, region)


def clustered_circuit(n_cells, n_nets, seed, spread=5.0):
    """Synthetic circuit with all cells bunched near the region center."""
    circuit = generate_synthetic(n_cells, n_nets, (100.0, 100.0), seed=seed)
    rng = np.random.default_rng(10_000 + seed)
    for b in circuit.blocks:
        b.x = 50.0 + rng.uniform(-spread, spread)
        b.y = 50.0 + rng.uniform(-spread, spread)
    return circuit
