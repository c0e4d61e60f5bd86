import csv
import io
from pathlib import Path

import pytest

from plpdm.cycle_search import find_attractor
from plpdm.map_core import Params
from plpdm.scan import (
    CSV_FIELDS,
    EMPTY,
    PALETTE,
    CellResult,
    Grid,
    GridSpec,
    Kind,
    Status,
    component_at,
    export,
    from_json,
    label_components,
    load_json,
    mirror_column,
    scan_grid,
    to_csv,
    to_json,
    to_ppm,
)
from plpdm.tongue_geometry import ceiling_gap

DATA = Path(__file__).parent / "data"


def cell(period, word, cls="SingleMinus", k=1):
    return CellResult(Status.ATTRACTOR, period, word, cls, k, period)


def grid_of(spec, rows):
    return Grid(spec, [list(r) for r in rows])


def test_gridspec_validation_and_centres():
    g = GridSpec(0.0, 1.0, 0.5, 1.0, 4, 2)
    assert g.a_values() == pytest.approx([0.125, 0.375, 0.625, 0.875])
    assert g.b_values() == pytest.approx([0.875, 0.625])
    assert g.full_circle
    wrap = GridSpec(0.9, 0.1, 0.5, 0.6, 4, 1)
    assert wrap.a_width == pytest.approx(0.2)
    assert wrap.a_values() == pytest.approx([0.925, 0.975, 0.025, 0.075])
    assert GridSpec(0, 1, 0.97, 0.97, 8, 1).b_values() == pytest.approx([0.97])
    for bad in ((0, 1, 0.6, 0.5, 4, 4), (0, 1, 0, 1, 0, 4), (0.3, 0.3, 0, 1, 4, 4)):
        with pytest.raises(ValueError):
            GridSpec(*bad)


def test_nothing_below_half():
    g = scan_grid(GridSpec(0, 1, 0.0, 0.5, 32, 8))
    assert all(c.status is Status.NO_ATTRACTOR for row in g.rows for c in row)
    assert label_components(g) == []


def test_cells_are_find_attractor_at_centres():
    spec = GridSpec(0.95, 0.98, 0.98, 0.99, 6, 3)
    g = scan_grid(spec)
    for r, b in enumerate(spec.b_values()):
        for c, a in enumerate(spec.a_values()):
            rep = find_attractor(Params(float(a), float(b)))
            got = g.rows[r][c]
            assert (got.status is Status.NO_ATTRACTOR) == (rep.cycle is None)
            if rep.cycle is not None:
                assert got.itinerary == str(rep.cycle.itinerary)


def test_fig3_cell_of_the_512_grid():
    spec = GridSpec(0.0, 1.0, 0.5, 0.9999, 512, 512)
    r, c = Grid(spec, []).locate(0.964, 0.988)
    a, b = spec.a_values()[c], spec.b_values()[r]
    assert abs(a - 0.964) <= 1 / 512 and abs(b - 0.988) <= spec.cell_height
    rep = find_attractor(Params(float(a), float(b)))
    assert rep.cycle.period == 3


def test_period3_tongue_reaches_the_top():
    g = scan_grid(GridSpec(0.95, 0.98, 0.98, 0.9999, 30, 10))
    comps = label_components(g)
    comp = component_at(g, comps, 0.964, 0.988)
    assert comp.kind is Kind.TONGUE and comp.touches_top and comp.period == 3
    assert ceiling_gap(comp) <= g.spec.cell_height


def test_single_minus_component_has_one_type():
    g = scan_grid(GridSpec(0.95, 0.98, 0.98, 0.9999, 30, 10))
    comps = label_components(g)
    comp = component_at(g, comps, 0.964, 0.988)
    types = {
        (cl.type_k, cl.type_p) for row in g.rows for cl in row
        if cl.key == (comp.period, comp.itinerary)
    }
    assert types == {(6, 3)}


def test_truncated_grids_only_have_eyes():
    g = scan_grid(GridSpec(0.95, 0.98, 0.9, 0.99, 30, 10))
    comps = label_components(g)
    assert comps and all(c.kind is Kind.EYE and c.grid_truncated for c in comps)


def test_flood_fill_four_connectivity_and_keys():
    spec = GridSpec(0.0, 0.5, 0.9, 0.9999, 4, 3)
    A, B = cell(3, "-++"), cell(3, "-++", k=2)
    C = cell(4, "-+++")
    rows = [
        [A, EMPTY, A, C],
        [EMPTY, A, EMPTY, C],
        [A, A, EMPTY, EMPTY],
    ]
    comps = label_components(grid_of(spec, rows))
    # diagonal neighbours do not join, distinct itineraries never merge
    assert sorted(c.cell_count for c in comps) == [1, 1, 2, 3]
    top = [c for c in comps if c.touches_top]
    assert {c.period for c in top} == {3, 4}
    # a single top cell is not a nontrivial interval
    assert all(c.kind is Kind.EYE for c in comps if c.period == 3)
    assert [c.kind for c in comps if c.period == 4] == [Kind.EYE]
    rows[0][2] = A
    rows[0][1] = A
    comps = label_components(grid_of(spec, rows))
    big = max(comps, key=lambda c: c.cell_count)
    assert big.kind is Kind.TONGUE and big.cell_count == 6
    assert B.key == A.key


def test_components_merge_across_the_seam():
    A = cell(3, "-++")
    spec = GridSpec(0.0, 1.0, 0.9, 0.9999, 6, 1)
    comps = label_components(grid_of(spec, [[A, EMPTY, EMPTY, EMPTY, EMPTY, A]]))
    assert len(comps) == 1 and comps[0].cell_count == 2
    assert comps[0].a_min == pytest.approx(spec.a_values()[5])
    assert comps[0].a_max == pytest.approx(spec.a_values()[0])
    # a partial a-range has no seam
    part = GridSpec(0.0, 0.5, 0.9, 0.9999, 6, 1)
    assert len(label_components(grid_of(part, [[A, EMPTY, EMPTY, EMPTY, EMPTY, A]]))) == 2


def test_golden_empty_ppm(tmp_path):
    spec = GridSpec(0, 1, 0.0, 0.4, 4, 4)
    g = scan_grid(spec)
    path = export(g, label_components(g), "ppm", tmp_path / "e.ppm")
    assert Path(path).read_bytes() == (DATA / "empty_4x4.ppm").read_bytes()


def test_ppm_palette_rules():
    spec = GridSpec(0, 1, 0.9, 0.99, 3, 1)
    bpa = CellResult(Status.BREAK_POINT_ADJACENT, 3, "-++", "SingleMinus", 1, 3)
    img = to_ppm(grid_of(spec, [[cell(3, "-++"), cell(5, "--+-+", "MultiMinus"), bpa]]))
    body = img[len(b"P6\n3 1\n255\n"):]
    single, multi, white = body[0:3], body[3:6], body[6:9]
    assert white == bytes([255, 255, 255])
    assert single == bytes(PALETTE[3])
    assert multi == bytes(v // 2 for v in PALETTE[5])
    assert len(body) == 9


def test_csv_shape():
    g = scan_grid(GridSpec(0.95, 0.98, 0.98, 0.9999, 12, 4))
    comps = label_components(g)
    text = to_csv(comps)
    assert "\r" not in text
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(rows) == len(comps) + 1
    # twelve significant digits
    assert all(len(v.replace(".", "").replace("-", "").lstrip("0")) <= 12 for v in rows[1][7:12])


def test_json_round_trip(tmp_path):
    g = scan_grid(GridSpec(0.95, 0.98, 0.98, 0.9999, 12, 4))
    comps = label_components(g)
    assert from_json(to_json(g, comps)) == (g, comps)
    path = export(g, comps, "json", tmp_path / "x.json")
    assert load_json(path) == (g, comps)


def test_export_errors_name_the_path(tmp_path):
    g = scan_grid(GridSpec(0, 1, 0.0, 0.4, 2, 2))
    with pytest.raises(OSError) as e:
        export(g, [], "csv", tmp_path / "missing" / "x.csv")
    assert "missing" in str(e.value)
    with pytest.raises(ValueError):
        export(g, [], "png", tmp_path / "x.png")


def test_determinism_across_workers(tmp_path):
    spec = GridSpec(0.0, 1.0, 0.9, 0.9999, 32, 6)
    outs = []
    for w in (1, 3):
        g = scan_grid(spec, workers=w)
        comps = label_components(g)
        outs.append((to_ppm(g), to_csv(comps), to_json(g, comps)))
    assert outs[0] == outs[1]


def test_mirror_symmetry_of_the_raster():
    spec = GridSpec(0.0, 1.0, 0.9, 0.9999, 64, 6)
    g = scan_grid(spec)

    def status(r, c):
        x = g.rows[r][c]
        return None if x.status is Status.NO_ATTRACTOR else x.period

    for r in range(spec.nb):
        for c in range(spec.na):
            m = mirror_column(spec, c)
            near = {status(r, (m + d) % spec.na) for d in (-1, 0, 1)}
            assert status(r, c) in near


def test_eye_has_a_ceiling_gap():
    spec = GridSpec(0.574, 0.584, 0.78, 0.9999, 100, 220)
    g = scan_grid(spec)
    comps = label_components(g)
    eye = component_at(g, comps, 0.576, 0.7913)
    assert eye is not None and eye.kind is Kind.EYE and not eye.grid_truncated
    assert eye.period == 5 and eye.itinerary.count("-") == 3
    assert eye.max_b < 1 - 0.01
    assert eye.max_b <= spec.b_max - spec.cell_height
    assert ceiling_gap(eye) > 0.01
    # finer rows do not lift the eye to the top
    fine = GridSpec(eye.a_min, eye.a_max, eye.b_min, spec.b_max, 20, 4 * 220)
    g2 = scan_grid(fine)
    top = [c for c in g2.rows[0] if c.key == (eye.period, eye.itinerary)]
    assert top == []
