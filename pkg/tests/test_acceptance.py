import json
import time
from fractions import Fraction

import numpy as np

from plpdm.cli import main
from plpdm.cycle_search import audit_many, find_attractor
from plpdm.map_core import Params, circle, lift, lift_iterate, slopes
from plpdm.scan import (
    GridSpec,
    Kind,
    Status,
    component_at,
    label_components,
    mirror_column,
    scan_grid,
    to_csv,
    to_json,
    to_ppm,
)
from plpdm.semiconj import TypeFraction, phi, phi_grid, type_of
from plpdm.symbolic import Classification, Itinerary, classify
from plpdm.tongue_geometry import BoundaryQuery, Side, boundary_a, ceiling_gap, seed_tongue, slice_at, xi_table


def test_c1_period5_tongue_span():
    t = time.perf_counter()
    left = boundary_a(BoundaryQuery(0.999, "-++++", Side.LEFT, near=0.71))
    right = boundary_a(BoundaryQuery(0.999, "-++++", Side.RIGHT, near=0.71))
    assert time.perf_counter() - t < 1.0
    assert abs(left.a - 0.712957676959782) < 1e-6
    assert abs(right.a - 0.71367603) < 1e-6


def test_c2_period5_eye_span():
    t = time.perf_counter()
    g = scan_grid(GridSpec(0.0, 1.0, 0.96998, 0.96998, 8192, 1))
    comps = label_components(g)
    assert time.perf_counter() - t < 10.0
    eyes = [c for c in comps if c.period == 5 and classify(Itinerary.parse(c.itinerary)) is Classification.MULTI_MINUS]
    eye = min(eyes, key=lambda c: abs(0.5 * (c.a_min + c.a_max) - 0.795))
    assert abs(eye.a_min - 0.79329) < 5e-4
    assert abs(eye.a_max - 0.79631081199) < 5e-4


def test_c3_fig3_cycle_cli(capsys):
    assert main(["cycle", "--a", "0.964", "--b", "0.988"]) == 0
    d = json.loads(capsys.readouterr().out)["cycle"]
    assert d["period"] == 3 and d["itinerary"] == "-++"
    bp, bm = slopes(0.988)
    assert abs(d["multiplier"] - bm * bp * bp) < 1e-9


def test_c4_multi_minus_landmark_is_an_eye():
    c = find_attractor(Params(0.576, 0.7913)).cycle
    assert c.period == 5 and sum(0.5 <= x < 1 for x in c.points) == 3
    g = scan_grid(GridSpec(0.574, 0.584, 0.78, 0.9999, 100, 220))
    comp = component_at(g, label_components(g), 0.576, 0.7913)
    assert comp is not None and comp.kind is Kind.EYE and ceiling_gap(comp) > 0


def test_c5_uniqueness_audit():
    rng = np.random.default_rng(2024)
    a = rng.random(10_000)
    b = 0.5 + 0.5 * rng.random(10_000)
    b[b <= 0.5] = np.nextafter(0.5, 1.0)
    t = time.perf_counter()
    reports = audit_many(a, b, max_period=8)
    assert time.perf_counter() - t < 60.0
    assert not any(r.uniqueness_violation for r in reports)
    assert all(r.consistent for r in reports), [r.problems for r in reports if not r.consistent][:3]


def test_c6_semiconjugacy_suite():
    rng = np.random.default_rng(6)
    tol = 1e-8
    for a, b, x in zip(rng.random(1000), rng.random(1000), rng.uniform(-2, 2, 1000)):
        p = Params(float(a), float(b))
        base = phi(p, x, tol).value
        assert abs(phi(p, lift(a, b, x), tol).value - 2 * base) < 4 * tol
        assert abs(phi(p, x + 1.0, tol).value - base - 1.0) < 1e-8
        for n in range(1, 7):
            N0, u0 = lift_iterate(a, b, x, n)
            N1, u1 = lift_iterate(a + 1.0, b, x, n)
            assert abs((N1 - N0) + (u1 - u0) - (2 ** n - 1)) < 1e-6
    for a, b in zip(rng.random(20), rng.random(20)):
        vals = phi_grid(Params(float(a), float(b)), np.arange(4096) / 4096, tol=1e-9)
        assert np.all(np.diff(vals) >= -1e-12)


def test_c7_type_constancy():
    pinned = TypeFraction(6, 3)
    ref = Params(0.964, 0.988)
    lo, hi = slice_at(ref.a, ref.b, find_attractor(ref).cycle)
    for a in np.linspace(lo, hi, 52)[1:-1]:
        p = Params(circle(float(a)), ref.b)
        assert type_of(p, find_attractor(p).cycle) == pinned


def test_c8_tongue_seeding():
    assert xi_table(4, 1).values == (Fraction(1, 85), Fraction(1, 17), Fraction(21, 85))
    for n in (3, 4, 5, 6):
        lo, hi = seed_tongue(n, 0.999).a_interval
        c = find_attractor(Params(circle(0.5 * (lo + hi)), 0.999)).cycle
        assert c is not None and c.period == n
        assert c.itinerary.classification is Classification.SINGLE_MINUS


def test_c9_empty_below_half():
    t = time.perf_counter()
    g = scan_grid(GridSpec(0.0, 1.0, 0.0, 0.5, 256, 64))
    assert time.perf_counter() - t < 5.0
    assert all(c.status is Status.NO_ATTRACTOR for row in g.rows for c in row)


def test_c10_determinism_and_symmetry():
    spec = GridSpec(0.0, 1.0, 0.9, 0.9999, 64, 8)
    outs, grids = [], []
    for w in (1, 2, 4):
        g = scan_grid(spec, workers=w)
        comps = label_components(g)
        outs.append((to_ppm(g), to_csv(comps), to_json(g, comps)))
        grids.append(g)
    assert outs[0] == outs[1] == outs[2]
    g = grids[0]

    def period(r, c):
        x = g.rows[r][c]
        return None if x.status is Status.NO_ATTRACTOR else x.period

    for r in range(spec.nb):
        for c in range(spec.na):
            m = mirror_column(spec, c)
            assert period(r, c) in {period(r, (m + d) % spec.na) for d in (-1, 0, 1)}
