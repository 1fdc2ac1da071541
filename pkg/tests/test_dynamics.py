import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suspmag.calibration import reference_calibration
from suspmag.dynamics import (
    FlightCondition,
    PayloadSpec,
    TetherSpec,
    length_sweep,
    monotone_regime,
    oscillator_params,
    predict_swing,
    settling_time,
    swing_amplitude,
    swing_forces,
)
from suspmag.errors import DynamicsError, ResonanceError
from suspmag.simulate import SimConfig, measure

G = 9.81


def test_zero_velocity_forces():
    fc, theta, fd, fn = swing_forces(PayloadSpec(5.0, 1.0, 0.1), FlightCondition(0.0, 50.0))
    assert fc == 0 and theta == 0 and fd == 0
    assert fn == pytest.approx(49.05, abs=1e-12)


def test_turn_forces_hand_evaluation():
    fc, theta, fd, fn = swing_forces(PayloadSpec(5.0, 0.0, 0.0), FlightCondition(20.0, 50.0))
    assert fc == pytest.approx(40.0, rel=1e-14)
    assert theta == pytest.approx(0.684, abs=5e-4)
    assert theta == pytest.approx(math.atan(40.0 / 49.05), rel=1e-14)
    assert fd == 0.0


def test_centrifugal_equal_to_weight_gives_45_degrees():
    r = 30.0
    v = math.sqrt(G * r)
    _, theta, _, _ = swing_forces(PayloadSpec(2.0), FlightCondition(v, r))
    assert theta == pytest.approx(math.pi / 4, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(mass_kg=0.0), dict(mass_kg=-1.0)])
def test_payload_rejects_bad_mass(kwargs):
    with pytest.raises(DynamicsError):
        PayloadSpec(**kwargs)


@pytest.mark.parametrize("args", [(10.0, 0.0), (10.0, -5.0), (10.0, 5.0, 1.225, 0.0)])
def test_flight_rejects_bad_radius_or_gravity(args):
    with pytest.raises(DynamicsError):
        FlightCondition(*args)


def test_tether_requires_underdamped():
    with pytest.raises(DynamicsError):
        TetherSpec(10.0, 1.0)
    with pytest.raises(DynamicsError):
        TetherSpec(0.0, 0.1)


def test_oscillator_params():
    w, _ = oscillator_params(PayloadSpec(1.0), TetherSpec(9.81, 0.2), 9.81)
    assert w == pytest.approx(1.0, rel=1e-15)
    _, c = oscillator_params(PayloadSpec(3.0), TetherSpec(4.0, 0.0))
    assert c == 0.0
    w, c = oscillator_params(PayloadSpec(5.0), TetherSpec(10.0, 0.05), 9.81)
    assert w == pytest.approx(0.9905, abs=5e-5)
    assert c == pytest.approx(0.4952, abs=5e-5)


def test_static_limit_amplitude_equals_length():
    pred = predict_swing(PayloadSpec(2.0, 0.5, 0.02), TetherSpec(7.5, 0.1), FlightCondition(0.0, 40.0))
    assert pred.amplitude_m == pytest.approx(7.5, rel=1e-12)
    assert pred.out_of_regime


def test_undamped_resonance_is_an_error():
    length = 10.0
    r = 20.0
    v = r * math.sqrt(G / length)
    with pytest.raises(ResonanceError):
        swing_amplitude(PayloadSpec(1.0), TetherSpec(length, 0.0), FlightCondition(v, r))


def test_damping_removes_resonance_singularity():
    length, r = 10.0, 20.0
    v = r * math.sqrt(G / length)
    amp = swing_amplitude(PayloadSpec(1.0), TetherSpec(length, 0.05), FlightCondition(v, r))
    assert math.isfinite(amp) and amp > 0


def test_settling_zero_when_final_equals_initial():
    p, t, f = PayloadSpec(1.0, 1.0, 0.01), TetherSpec(8.0, 0.2), FlightCondition(15.0, 150.0)
    amp = swing_amplitude(p, t, f)
    _, ts = settling_time(p, t, f, amp)
    assert ts == 0.0


def test_settling_time_linear_in_mass_at_fixed_effective_damping():
    f = FlightCondition(15.0, 150.0)
    p1, t1 = PayloadSpec(1.0), TetherSpec(8.0, 0.4)
    p2, t2 = PayloadSpec(2.0), TetherSpec(8.0, 0.2)
    c1, ts1 = settling_time(p1, t1, f, 0.1, amplitude_m=2.0)
    c2, ts2 = settling_time(p2, t2, f, 0.1, amplitude_m=2.0)
    assert c1 == pytest.approx(c2, rel=1e-14)
    assert ts2 == pytest.approx(2.0 * ts1, rel=1e-14)


def test_settling_domain_errors():
    p, t, f = PayloadSpec(1.0), TetherSpec(8.0, 0.2), FlightCondition(15.0, 150.0)
    with pytest.raises(DynamicsError):
        settling_time(p, t, f, 3.0, amplitude_m=2.0)
    with pytest.raises(DynamicsError):
        settling_time(p, TetherSpec(8.0, 0.0), FlightCondition(0.0, 10.0), 0.5, amplitude_m=2.0)


def test_reference_calibration_point_at_ten_metres():
    cal = reference_calibration()
    pred = predict_swing(cal.payload, cal.tether(10.0), cal.flight, cal.final_fraction)
    assert pred.amplitude_m == pytest.approx(6.0, rel=0.15)
    assert pred.settling_s == pytest.approx(4.5, rel=0.15)


def test_reference_calibration_sweep_ordering():
    rows = reference_calibration().sweep([14, 5, 10, 8, 12])
    assert [r.length_m for r in rows] == [5, 8, 10, 12, 14]
    amps = [r.amplitude_m for r in rows]
    assert amps == sorted(amps) and len(set(amps)) == 5
    for got, want in zip(amps, [4, 5, 6, 7, 8]):
        assert got == pytest.approx(want, rel=0.15)


def test_single_length_sweep_matches_direct_call():
    p, f = PayloadSpec(1.5, 0.8, 0.02), FlightCondition(12.0, 60.0)
    (row,) = length_sweep(p, f, 0.1, [9.0])
    pred = predict_swing(p, TetherSpec(9.0, 0.1), f)
    assert row.amplitude_m == pred.amplitude_m
    assert row.settling_s == pred.settling_s


def test_sweep_error_names_the_length():
    r, length = 20.0, 10.0
    v = r * math.sqrt(G / length)
    with pytest.raises(ResonanceError, match="L=10 m"):
        length_sweep(PayloadSpec(1.0, 1.0, 0.01), FlightCondition(v, r), 0.0, [5.0, 10.0])
    with pytest.raises(DynamicsError):
        length_sweep(PayloadSpec(1.0), FlightCondition(5.0, 20.0), 0.1, [])


def test_sweep_amplitude_ordering_agrees_with_oracle():
    cal = reference_calibration()
    measured = []
    for length in (5.0, 8.0, 10.0, 12.0, 14.0):
        cfg = SimConfig.auto(cal.payload, cal.tether(length), cal.flight, cal.final_fraction)
        measured.append(measure(cfg)[0])
    assert np.all(np.diff(measured) > 0)
    assert np.all(np.diff([r.amplitude_m for r in cal.sweep([5, 8, 10, 12, 14])]) > 0)


def test_amplitude_falls_with_length_above_resonance_when_lightly_damped():
    # turn rate well above every natural frequency in the sweep, light damping
    f = FlightCondition(10.0, 5.0)
    rows = length_sweep(PayloadSpec(1.0), f, 0.05, [5, 8, 10, 12, 14])
    assert all(f.turn_rate_radps ** 2 > G / r.length_m for r in rows)
    amps = [r.amplitude_m for r in rows]
    assert all(b < a for a, b in zip(amps, amps[1:]))


payloads = st.builds(PayloadSpec, st.floats(0.1, 20), st.floats(0, 2), st.floats(0, 0.5))
flights = st.builds(FlightCondition, st.floats(0, 40), st.floats(1, 500))
tethers = st.builds(TetherSpec, st.floats(0.5, 30), st.floats(0.01, 0.95))


@given(payloads, flights)
def test_net_force_identity(p, f):
    fc, theta, fd, fn = swing_forces(p, f)
    weight = p.mass_kg * f.gravity_mps2
    assert fn ** 2 == pytest.approx(fc ** 2 + weight ** 2 + fd ** 2, rel=1e-12)
    assert fn >= max(fc, fd)
    assert 0 <= theta < math.pi / 2


@given(payloads, tethers, flights)
def test_halving_final_amplitude_adds_ln2_over_decay_rate(p, t, f):
    amp = swing_amplitude(p, t, f)
    c_eff, ts1 = settling_time(p, t, f, 0.2 * amp, amplitude_m=amp)
    _, ts2 = settling_time(p, t, f, 0.1 * amp, amplitude_m=amp)
    w, _ = oscillator_params(p, t, f.gravity_mps2)
    assert ts2 - ts1 == pytest.approx(math.log(2) / ((c_eff / (2 * p.mass_kg)) * w), rel=1e-9)


@given(payloads, st.floats(0.01, 0.95), flights,
       st.lists(st.floats(0.5, 30), min_size=2, max_size=6, unique=True))
def test_amplitude_non_decreasing_inside_monotone_regime(p, zeta, f, lengths):
    lengths = sorted(lengths)
    if not all(monotone_regime(f, zeta, L) for L in lengths):
        return
    amps = [r.amplitude_m for r in length_sweep(p, f, zeta, lengths)]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(amps, amps[1:]))


@settings(max_examples=50)
@given(payloads, tethers, flights)
def test_outputs_continuous_under_small_perturbation(p, t, f):
    w2 = f.turn_rate_radps ** 2
    if abs(G / t.length_m - w2) < 1e-3 and t.damping_ratio < 1e-3:
        return
    base = predict_swing(p, t, f)
    bumped = predict_swing(p, TetherSpec(t.length_m * (1 + 1e-9), t.damping_ratio), f)
    assert bumped.amplitude_m == pytest.approx(base.amplitude_m, rel=1e-6)
    assert bumped.settling_s == pytest.approx(base.settling_s, rel=1e-6)
