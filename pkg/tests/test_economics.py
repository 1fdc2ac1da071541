import dataclasses
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from suspmag.economics import (
    FLAGGED_COLUMNS,
    PlatformSpec,
    compare_platforms,
    comparison_csv,
    comparison_text,
    derived_metrics,
    reference_platforms,
    platforms_from_json,
)
from suspmag.errors import EconomicsError


def generic_uav(**kw):
    base = dict(name="Generic UAV", aircraft_cost_usd=20000, flight_duration_h=0.5,
                cruise_speed_kmh=45.0, coverage_speed_kmh=40.0, swath_width_km=0.025,
                line_spacing_m=50, daily_ops_cost_usd=500, safety_score=10)
    return PlatformSpec(**(base | kw))


def test_generic_uav_worked_example():
    m = derived_metrics(generic_uav())
    assert m.flights_per_day == 16
    assert m.ops_cost_per_flight_usd == 31.25
    assert m.distance_per_flight_km == 22.5
    assert m.flight_time_per_km_s == 90
    assert m.coverage_area_km2 == pytest.approx(0.5, rel=1e-15)
    assert m.cost_per_line_km_usd == pytest.approx(1.38, abs=0.02)
    assert m.cost_per_line_km_usd == pytest.approx(31.25 / 22.5, rel=1e-15)


def test_vtol_with_back_solved_speed():
    vtol = generic_uav(name="VTOL", flight_duration_h=3.0, cruise_speed_kmh=80.0,
                       coverage_speed_kmh=80.0)
    m = derived_metrics(vtol)
    assert m.cost_per_line_km_usd == pytest.approx(0.78, abs=0.01)
    assert m.flight_time_per_km_s == 45


def test_full_day_flight_identity():
    m = derived_metrics(generic_uav(flight_duration_h=8.0))
    assert m.flights_per_day == 1
    assert m.ops_cost_per_flight_usd == 500


@pytest.mark.parametrize("field", ["flight_duration_h", "cruise_speed_kmh", "coverage_speed_kmh",
                                   "daily_ops_cost_usd", "workday_h"])
def test_non_positive_inputs_rejected(field):
    with pytest.raises(EconomicsError, match=field):
        generic_uav(**{field: 0.0})


@pytest.mark.parametrize("score", [0, 11, 5.5])
def test_safety_score_range(score):
    with pytest.raises(EconomicsError):
        generic_uav(safety_score=score)


def test_reference_platforms_flag_vtol_cost_per_km():
    rows = compare_platforms(reference_platforms())
    assert [r.spec.name for r in rows] == ["Generic UAV", "VTOL FW UAV", "Fixed Wing (Crewed)",
                                           "Helicopter (Crewed)"]
    flagged = [r.spec.name for r in rows if "cost_per_line_km_usd" in r.best]
    assert flagged == ["VTOL FW UAV"]
    vtol = rows[1].metrics
    assert vtol.cost_per_line_km_usd == pytest.approx(0.78, abs=0.01)
    assert vtol.flight_time_per_km_s == pytest.approx(45, rel=1e-12)


def test_single_platform_gets_every_flag():
    (row,) = compare_platforms([generic_uav()])
    assert row.best == frozenset(FLAGGED_COLUMNS)


def test_identical_platforms_tie_everywhere():
    rows = compare_platforms([generic_uav(), generic_uav(name="copy")])
    assert all(r.best == frozenset(FLAGGED_COLUMNS) for r in rows)


def test_empty_comparison():
    with pytest.raises(EconomicsError):
        compare_platforms([])


def test_json_loading_ignores_reference_keys_and_rejects_missing():
    rec = dataclasses.asdict(generic_uav()) | {"reported": {"x": 1}}
    (p,) = platforms_from_json(json.dumps([rec]))
    assert p == generic_uav()
    del rec["safety_score"]
    with pytest.raises(EconomicsError, match="Generic UAV"):
        platforms_from_json(json.dumps([rec]))
    with pytest.raises(EconomicsError):
        platforms_from_json("{}")
    with pytest.raises(EconomicsError):
        platforms_from_json("not json")


def test_renderings():
    rows = compare_platforms(reference_platforms())
    text = comparison_text(rows)
    assert "0.78*" in text and "1.39" in text
    lines = comparison_csv(rows).splitlines()
    assert lines[0].startswith("name,aircraft_cost_usd")
    assert len(lines) == 5


platforms = st.builds(
    PlatformSpec, name=st.just("p"), aircraft_cost_usd=st.floats(0, 1e7),
    flight_duration_h=st.floats(0.05, 12), cruise_speed_kmh=st.floats(1, 400),
    coverage_speed_kmh=st.floats(1, 400), swath_width_km=st.floats(1e-3, 1),
    line_spacing_m=st.floats(1, 1000), daily_ops_cost_usd=st.floats(1, 1e6),
    safety_score=st.integers(1, 10), workday_h=st.floats(1, 24))


@given(platforms)
def test_cost_per_km_two_paths_agree(p):
    m = derived_metrics(p)
    direct = p.daily_ops_cost_usd / (m.flights_per_day * p.flight_duration_h * p.cruise_speed_kmh)
    assert m.cost_per_line_km_usd == pytest.approx(direct, rel=1e-12)


@given(platforms)
def test_doubling_ops_cost(p):
    a = derived_metrics(p)
    b = derived_metrics(dataclasses.replace(p, daily_ops_cost_usd=2 * p.daily_ops_cost_usd))
    assert b.cost_per_line_km_usd == 2 * a.cost_per_line_km_usd
    assert b.ops_cost_per_flight_usd == 2 * a.ops_cost_per_flight_usd
    assert (b.distance_per_flight_km, b.coverage_area_km2, b.flight_time_per_km_s) == \
        (a.distance_per_flight_km, a.coverage_area_km2, a.flight_time_per_km_s)


@given(platforms)
def test_time_per_km_times_speed(p):
    m = derived_metrics(p)
    assert m.flight_time_per_km_s * p.coverage_speed_kmh == pytest.approx(3600.0, rel=1e-15)
    assert m.distance_per_flight_km == p.flight_duration_h * p.cruise_speed_kmh
