"""Closed-form swing model for a cable-suspended payload under a turning aircraft.

The payload is treated as a forced, damped harmonic oscillator: the turn
provides the forcing at angular rate ``V / r``, the rope supplies linear
damping and the bob's aerodynamic drag adds to it during the decay.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._validation import check_interval, check_non_negative, check_positive
from .errors import DynamicsError, ResonanceError

DEFAULT_FINAL_FRACTION = 0.05


@dataclass(frozen=True)
class PayloadSpec:
    mass_kg: float
    drag_coeff: float = 0.0
    cross_section_m2: float = 0.0

    def __post_init__(self):
        check_positive("mass_kg", self.mass_kg, DynamicsError)
        check_non_negative("drag_coeff", self.drag_coeff, DynamicsError)
        check_non_negative("cross_section_m2", self.cross_section_m2, DynamicsError)

    @property
    def drag_area_m2(self):
        return self.drag_coeff * self.cross_section_m2


@dataclass(frozen=True)
class TetherSpec:
    length_m: float
    damping_ratio: float = 0.0

    def __post_init__(self):
        check_positive("length_m", self.length_m, DynamicsError)
        check_interval("damping_ratio", self.damping_ratio, 0.0, 1.0, error=DynamicsError)


@dataclass(frozen=True)
class FlightCondition:
    # speed may be zero: hovering is the degenerate static case
    speed_mps: float
    turn_radius_m: float
    air_density_kgm3: float = 1.225
    gravity_mps2: float = 9.81

    def __post_init__(self):
        check_non_negative("speed_mps", self.speed_mps, DynamicsError)
        check_positive("turn_radius_m", self.turn_radius_m, DynamicsError)
        check_positive("air_density_kgm3", self.air_density_kgm3, DynamicsError)
        check_positive("gravity_mps2", self.gravity_mps2, DynamicsError)

    @property
    def turn_rate_radps(self):
        return self.speed_mps / self.turn_radius_m


@dataclass(frozen=True)
class SwingPrediction:
    centrifugal_N: float
    rope_angle_rad: float
    drag_N: float
    net_force_N: float
    natural_freq_radps: float
    rope_damping_Nspm: float
    amplitude_m: float
    eff_damping: float
    settling_s: float
    final_amplitude_m: float
    out_of_regime: bool = False

    def to_dict(self):
        return asdict(self)


def swing_forces(payload: PayloadSpec, flight: FlightCondition):
    """Forces on the bob during the turn.

    Returns
    -------
    tuple of float
        ``(centrifugal_N, rope_angle_rad, drag_N, net_force_N)``.
    """
    m = payload.mass_kg
    v = flight.speed_mps
    weight = m * flight.gravity_mps2
    f_c = m * v * v / flight.turn_radius_m
    theta = math.atan2(f_c, weight)
    f_d = 0.5 * payload.drag_area_m2 * flight.air_density_kgm3 * v * v
    f_n = math.sqrt(f_c * f_c + weight * weight + f_d * f_d)
    return f_c, theta, f_d, f_n


def oscillator_params(payload: PayloadSpec, tether: TetherSpec, gravity_mps2=9.81):
    """Natural swing frequency (rad/s) and rope damping coefficient (N s/m)."""
    g = check_positive("gravity_mps2", gravity_mps2, DynamicsError)
    omega_n = math.sqrt(g / tether.length_m)
    c = 2.0 * payload.mass_kg * tether.damping_ratio * omega_n
    return omega_n, c


def swing_amplitude(payload: PayloadSpec, tether: TetherSpec, flight: FlightCondition):
    """Steady forced-oscillator swing amplitude in metres.

    Raises :class:`ResonanceError` when the undamped system is driven exactly at
    its natural frequency; the amplitude is never clamped.
    """
    m = payload.mass_kg
    _, _, _, f_n = swing_forces(payload, flight)
    omega_n, c = oscillator_params(payload, tether, flight.gravity_mps2)
    w = flight.turn_rate_radps
    detuning = omega_n * omega_n - w * w
    damping = c * w / m
    denom = math.hypot(detuning, damping)
    if denom <= 1e-12 * omega_n * omega_n:
        raise ResonanceError(
            f"resonance: turn rate {w:.6g} rad/s equals natural frequency "
            f"{omega_n:.6g} rad/s with zero damping (L={tether.length_m:g} m)"
        )
    return (f_n / m) / denom


def effective_damping(payload: PayloadSpec, tether: TetherSpec, flight: FlightCondition):
    _, c = oscillator_params(payload, tether, flight.gravity_mps2)
    return c + 0.5 * payload.drag_area_m2 * flight.air_density_kgm3 * flight.speed_mps


def settling_time(payload: PayloadSpec, tether: TetherSpec, flight: FlightCondition,
                  final_amplitude_m, amplitude_m=None):
    """Effective damping and time for the swing to decay to ``final_amplitude_m``.

    ``amplitude_m`` defaults to :func:`swing_amplitude`. A final amplitude equal
    to the initial one gives zero settling time.
    """
    if amplitude_m is None:
        amplitude_m = swing_amplitude(payload, tether, flight)
    a_final = float(final_amplitude_m)
    if not (0 < a_final <= amplitude_m):
        raise DynamicsError(
            f"final amplitude must lie in (0, A={amplitude_m:.6g}] m, got {a_final!r}"
        )
    c_eff = effective_damping(payload, tether, flight)
    if c_eff <= 0:
        raise DynamicsError("effective damping is zero: the swing never settles")
    omega_n, _ = oscillator_params(payload, tether, flight.gravity_mps2)
    decay = (c_eff / (2.0 * payload.mass_kg)) * omega_n
    return c_eff, math.log(amplitude_m / a_final) / decay


def predict_swing(payload: PayloadSpec, tether: TetherSpec, flight: FlightCondition,
                  final_fraction=DEFAULT_FINAL_FRACTION) -> SwingPrediction:
    """Evaluate the full closed-form chain for one configuration."""
    check_interval("final_fraction", final_fraction, 0.0, 1.0,
                   closed_low=False, closed_high=True, error=DynamicsError)
    f_c, theta, f_d, f_n = swing_forces(payload, flight)
    omega_n, c = oscillator_params(payload, tether, flight.gravity_mps2)
    amp = swing_amplitude(payload, tether, flight)
    a_final = final_fraction * amp
    c_eff, t_s = settling_time(payload, tether, flight, a_final, amplitude_m=amp)
    return SwingPrediction(
        centrifugal_N=f_c,
        rope_angle_rad=theta,
        drag_N=f_d,
        net_force_N=f_n,
        natural_freq_radps=omega_n,
        rope_damping_Nspm=c,
        amplitude_m=amp,
        eff_damping=c_eff,
        settling_s=t_s,
        final_amplitude_m=a_final,
        # without a turn there is no forcing; the formula collapses to A = L
        out_of_regime=flight.speed_mps == 0,
    )


@dataclass(frozen=True)
class SweepRow:
    length_m: float
    amplitude_m: float
    settling_s: float


def length_sweep(payload: PayloadSpec, flight: FlightCondition, damping_ratio, lengths,
                 final_fraction=DEFAULT_FINAL_FRACTION):
    """Amplitude and settling time for each cable length, sorted by length."""
    lengths = sorted(float(x) for x in lengths)
    if not lengths:
        raise DynamicsError("length sweep needs at least one length")
    rows = []
    for length in lengths:
        try:
            tether = TetherSpec(length, damping_ratio)
            pred = predict_swing(payload, tether, flight, final_fraction)
        except DynamicsError as exc:
            raise type(exc)(f"at L={length:g} m: {exc}") from exc
        rows.append(SweepRow(length, pred.amplitude_m, pred.settling_s))
    return rows


def monotone_regime(flight: FlightCondition, damping_ratio, length_m):
    """True when amplitude is non-decreasing in cable length at ``length_m``.

    With ``x = g/L`` the squared denominator is ``x^2 - 2 w^2 (1 - 2 zeta^2) x + w^4``;
    it shrinks as ``L`` grows exactly when ``x >= w^2 (1 - 2 zeta^2)``.
    """
    x = flight.gravity_mps2 / length_m
    w2 = flight.turn_rate_radps ** 2
    return x >= w2 * (1.0 - 2.0 * damping_ratio ** 2)
