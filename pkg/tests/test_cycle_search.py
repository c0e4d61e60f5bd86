import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plpdm.cycle_search import (
    Outcome,
    SearchOptions,
    audit_many,
    audit_uniqueness,
    find_attractor,
    find_attractors,
)
from plpdm.map_core import Params


def test_fig3_landmark():
    rep = find_attractor(Params(0.964, 0.988))
    assert rep.outcome is Outcome.FOUND
    c = rep.cycle
    assert c.period == 3 and str(c.itinerary) == "-++"
    b = 0.988
    assert abs(c.multiplier - 2 * (1 - b) * (2 * (1 + b)) ** 2) < 1e-9


def test_three_points_in_the_minus_half():
    rep = find_attractor(Params(0.576, 0.7913))
    assert rep.found and rep.cycle.period == 5
    assert sum(x >= 0.5 for x in rep.cycle.points) == 3
    assert rep.cycle.itinerary.classification.value == "MultiMinus"


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 0.5))
def test_nothing_attracts_below_half(a, b):
    assert find_attractor(Params(a, b)).outcome is Outcome.NOT_FOUND


def test_report_is_canonical_and_exact():
    c = find_attractor(Params(0.964, 0.988)).cycle
    assert str(c.itinerary) == "-++"
    assert c.points[0] == pytest.approx(0.7047196266308424, abs=1e-12)


def test_break_point_adjacent_just_inside_a_boundary():
    # a few ulps inside the left end of a period-5 tongue the cycle touches 1/2
    left = 0.7129576769593203
    rep = find_attractor(Params(left + 1e-15, 0.999))
    assert rep.outcome is Outcome.BREAK_POINT_ADJACENT
    assert rep.cycle.period == 5
    assert min(abs(x - 0.5) for x in rep.cycle.points) < 1e-12


def test_batch_matches_scalar():
    rng = np.random.default_rng(7)
    a = rng.random(300)
    b = 0.5 + 0.5 * rng.random(300)
    batch = find_attractors(a, b, chunk=97)
    for ai, bi, rep in zip(a, b, batch):
        assert rep.to_dict() == find_attractor(Params(float(ai), float(bi))).to_dict()


def test_both_break_points_find_the_same_attractor():
    rng = np.random.default_rng(11)
    for a, b in zip(rng.random(100), 0.5 + 0.5 * rng.random(100)):
        p = Params(float(a), float(b))
        r1, r0 = find_attractor(p, seed=0.5), find_attractor(p, seed=0.0)
        assert (r1.cycle is None) == (r0.cycle is None)
        if r1.cycle is not None:
            assert r1.cycle.same_orbit(r0.cycle)


def test_options_validation():
    with pytest.raises(ValueError):
        SearchOptions(max_period=300, detect_window=256)
    with pytest.raises(ValueError):
        SearchOptions(tol_close=0.0)


def test_audit_single_and_batch():
    rep = audit_uniqueness(Params(0.964, 0.988))
    assert rep.consistent and rep.count == 1 and not rep.uniqueness_violation
    reports = audit_many([0.964, 0.3, 0.576], [0.988, 0.3, 0.7913])
    assert [r.count for r in reports] == [1, 0, 1]
    assert all(r.consistent for r in reports)


def test_report_serialisation():
    d = find_attractor(Params(0.3, 0.3)).to_dict()
    assert d == {"a": 0.3, "b": 0.3, "outcome": "NotFound", "cycle": None}
