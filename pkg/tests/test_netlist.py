import numpy as np
import pytest

from fieldplace.netlist import (
    NetlistError,
    generate_synthetic,
    parse_bookshelf,
    read_placement,
    write_placement,
)

from conftest import NETS, NODES, PL, WTS, scl_text, write_fixture


def test_parse_fixture_counts(bookshelf_dir):
    c = parse_bookshelf(bookshelf_dir)
    assert len(c.blocks) == 4
    assert len(c.nets) == 2
    assert sum(b.movable for b in c.blocks) == 2
    assert (c.W, c.H) == (10.0, 10.0)


def test_parse_positions_are_centers(bookshelf_dir):
    c = parse_bookshelf(bookshelf_dir)
    by_id = {b.id: b for b in c.blocks}
    assert (by_id["a"].x, by_id["a"].y) == (2.0, 2.0)  # corner (1,1) + half size
    assert not by_id["t1"].movable
    assert by_id["t1"].x == 1.0


def test_parse_pin_offsets(bookshelf_dir):
    c = parse_bookshelf(bookshelf_dir)
    n0 = next(n for n in c.nets if n.id == "n0")
    assert ("a", 0.5, 0.0) in n0.pins
    n1 = next(n for n in c.nets if n.id == "n1")
    assert ("b", 0.0, 0.0) in n1.pins  # missing offsets default to zero


def test_parse_unknown_pin_node(tmp_path):
    bad = NETS.replace("    b I\n", "    ghost I\n")
    aux = write_fixture(tmp_path)
    (tmp_path / "fix.nets").write_text(bad)
    with pytest.raises(NetlistError, match="ghost"):
        parse_bookshelf(aux)


def test_parse_malformed_line_reports_location(tmp_path):
    aux = write_fixture(tmp_path)
    (tmp_path / "fix.nodes").write_text(NODES.replace("    a 2 2\n", "    a two 2\n"))
    with pytest.raises(NetlistError, match="fix.nodes:5"):
        parse_bookshelf(aux)


def test_parse_missing_file(tmp_path):
    aux = write_fixture(tmp_path)
    (tmp_path / "fix.scl").unlink()
    with pytest.raises(NetlistError):
        parse_bookshelf(aux)


def test_region_origin_normalized(tmp_path):
    aux = write_fixture(tmp_path)
    (tmp_path / "fix.scl").write_text(scl_text(x0=100, y0=50))
    c = parse_bookshelf(aux)
    assert c.origin == (100.0, 50.0)
    assert (c.W, c.H) == (10.0, 10.0)
    by_id = {b.id: b for b in c.blocks}
    assert by_id["a"].x == 2.0 - 100.0  # translated into the normalized frame
    assert by_id["a"].y == 2.0 - 50.0


def test_roundtrip_write_parse(bookshelf_dir, tmp_path):
    c = parse_bookshelf(bookshelf_dir)
    placement = {b.id: (b.x + 0.123456, b.y - 0.25) if b.movable else (b.x, b.y) for b in c.blocks}
    out = tmp_path / "out.pl"
    write_placement(c, placement, out)
    back = read_placement(out, c)
    for name, (x, y) in placement.items():
        assert back[name] == pytest.approx((x, y), abs=1e-6)
    text = out.read_text()
    assert "/FIXED" in text
    assert text.count("/FIXED") == 2


def test_roundtrip_reparse_idempotent(tmp_path):
    aux = write_fixture(tmp_path)
    c1 = parse_bookshelf(aux)
    placement = {b.id: (b.x, b.y) for b in c1.blocks}
    write_placement(c1, placement, tmp_path / "fix.pl")  # overwrite in place
    c2 = parse_bookshelf(aux)
    for b1, b2 in zip(c1.blocks, c2.blocks):
        assert (b1.x, b1.y) == pytest.approx((b2.x, b2.y), abs=1e-6)
        assert b1.movable == b2.movable


def test_fillers_excluded_from_output(bookshelf_dir, tmp_path):
    from fieldplace.netlist import Block

    c = parse_bookshelf(bookshelf_dir)
    c.blocks.append(Block("_filler0", 1, 1, is_filler=True, x=5, y=5))
    placement = {b.id: (b.x, b.y) for b in c.blocks}
    out = tmp_path / "out.pl"
    write_placement(c, placement, out)
    assert "_filler0" not in out.read_text()


def test_synthetic_deterministic():
    a = generate_synthetic(500, 600, (100, 100), seed=1)
    b = generate_synthetic(500, 600, (100, 100), seed=1)
    assert [(x.id, x.x, x.y, x.w, x.h) for x in a.blocks] == [
        (x.id, x.x, x.y, x.w, x.h) for x in b.blocks
    ]
    assert [n.pins for n in a.nets] == [n.pins for n in b.nets]


def test_synthetic_area_budget():
    c = generate_synthetic(500, 600, (100, 100), seed=1)
    assert sum(b.w * b.h for b in c.blocks) <= 7000.0 + 1e-9


def test_synthetic_degenerate_single_cell():
    c = generate_synthetic(1, 1, (10, 10), seed=0)
    assert len(c.blocks) == 1
    assert len(c.nets) == 1
    assert len(c.nets[0].pins) >= 1


def test_synthetic_net_degrees():
    c = generate_synthetic(200, 300, (100, 100), seed=3)
    assert all(2 <= len(n.pins) <= 5 for n in c.nets)


def test_synthetic_infeasible():
    with pytest.raises(NetlistError):
        generate_synthetic(10, 5, (1.0, 1.0), seed=0, fill=0.8)


def test_validate_rejects_pin_to_filler(bookshelf_dir):
    from fieldplace.netlist import Block, Net

    c = parse_bookshelf(bookshelf_dir)
    c.blocks.append(Block("_f", 1, 1, is_filler=True))
    c.nets.append(Net("bad", [("_f", 0.0, 0.0)]))
    with pytest.raises(NetlistError, match="filler"):
        c.validate()
