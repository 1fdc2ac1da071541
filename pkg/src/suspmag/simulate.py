"""Time-domain pendulum with a laterally accelerating pivot.

This is the numerical cross-check for the closed-form swing model. The pivot
enters a flight line through a quarter turn of radius ``r`` at speed ``V``;
during that window it accelerates sideways at ``V**2 / r``, afterwards it
flies straight and the swing decays under linear rope damping and quadratic
bob drag. Amplitude and settling time are then read off the trajectory the
same way they would be read off onboard video.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_interval, check_positive
from .dynamics import FlightCondition, PayloadSpec, TetherSpec
from .errors import InstabilityError, NoSettleError, SimulationError

# relative per-step energy rise tolerated before the run is declared unstable
_ENERGY_RISE_TOL = 1e-9


def natural_period(tether: TetherSpec, gravity_mps2):
    return 2.0 * math.pi * math.sqrt(tether.length_m / gravity_mps2)


def forcing_duration(flight: FlightCondition):
    """Time to fly a quarter of the turn circle; zero when hovering."""
    if flight.speed_mps == 0:
        return 0.0
    return 0.5 * math.pi * flight.turn_radius_m / flight.speed_mps


@dataclass(frozen=True)
class SimConfig:
    payload: PayloadSpec
    tether: TetherSpec
    flight: FlightCondition
    time_step_s: float
    duration_s: float
    settle_band_fraction: float = 0.05
    initial_angle_rad: float = 0.0
    forcing: bool = True

    def __post_init__(self):
        dt = check_positive("time_step_s", self.time_step_s, SimulationError)
        dur = check_positive("duration_s", self.duration_s, SimulationError)
        check_interval("settle_band_fraction", self.settle_band_fraction, 0.0, 1.0,
                       closed_low=False, error=SimulationError)
        period = natural_period(self.tether, self.flight.gravity_mps2)
        if dt > 0.01 * period * (1 + 1e-12):
            raise SimulationError(
                f"time_step_s={dt:g} does not resolve the swing period {period:.6g} s "
                "(need at most 1% of a period)")
        if dur < 10.0 * period * (1 - 1e-12):
            raise SimulationError(
                f"duration_s={dur:g} is shorter than ten swing periods ({10 * period:.6g} s)")
        if abs(self.initial_angle_rad) >= 0.5 * math.pi:
            raise SimulationError("initial angle must be below pi/2 in magnitude")

    @classmethod
    def auto(cls, payload, tether, flight, settle_band_fraction=0.05, steps_per_period=200,
             min_periods=40.0, **kwargs):
        """Pick a step and a duration long enough for the swing to settle.

        The duration covers the forcing window plus 1.5x the linear-decay
        settling estimate, and never less than ``min_periods`` periods.
        """
        g = flight.gravity_mps2
        period = natural_period(tether, g)
        omega_n = 2.0 * math.pi / period
        t_force = forcing_duration(flight) if kwargs.get("forcing", True) else 0.0
        decay = tether.damping_ratio * omega_n
        settle = 1.5 * math.log(1.0 / settle_band_fraction) / decay if decay > 0 else 0.0
        duration = max(min_periods * period, t_force + settle + 4.0 * period)
        return cls(payload, tether, flight, period / steps_per_period, duration,
                   settle_band_fraction, **kwargs)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    swing_angle_rad: np.ndarray
    bob_offset_m: np.ndarray
    forcing_end_s: float = 0.0
    swing_rate_radps: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.times)
        if len(self.swing_angle_rad) != n or len(self.bob_offset_m) != n:
            raise SimulationError("trajectory columns must have equal lengths")
        if self.swing_rate_radps is not None and len(self.swing_rate_radps) != n:
            raise SimulationError("trajectory columns must have equal lengths")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise SimulationError("trajectory times must be strictly increasing")

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t_s", "theta_rad", "offset_m"])
        for t, th, x in zip(self.times, self.swing_angle_rad, self.bob_offset_m):
            writer.writerow([repr(float(t)), repr(float(th)), repr(float(x))])
        return buf.getvalue()


def _rhs_factory(cfg: SimConfig):
    g = cfg.flight.gravity_mps2
    length = cfg.tether.length_m
    m = cfg.payload.mass_kg
    omega_n = math.sqrt(g / length)
    c = 2.0 * m * cfg.tether.damping_ratio * omega_n
    lin = c / m
    quad = 0.5 * cfg.payload.drag_area_m2 * cfg.flight.air_density_kgm3 * length / m
    g_over_l = g / length

    def rhs(theta, omega, accel):
        return omega, (-g_over_l * math.sin(theta) - (accel / length) * math.cos(theta)
                       - lin * omega - quad * abs(omega) * omega)

    return rhs


def _rk4(rhs, theta, omega, accel, h):
    k1t, k1w = rhs(theta, omega, accel)
    k2t, k2w = rhs(theta + 0.5 * h * k1t, omega + 0.5 * h * k1w, accel)
    k3t, k3w = rhs(theta + 0.5 * h * k2t, omega + 0.5 * h * k2w, accel)
    k4t, k4w = rhs(theta + h * k3t, omega + h * k3w, accel)
    return (theta + h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t),
            omega + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w))


def pendulum_energy(theta, omega, length_m, gravity_mps2):
    """Mechanical energy per unit mass in the pivot frame (J/kg)."""
    return 0.5 * (length_m * omega) ** 2 + 2.0 * gravity_mps2 * length_m * math.sin(0.5 * theta) ** 2


def simulate_pendulum(cfg: SimConfig) -> Trajectory:
    """Integrate the swing with classical fourth-order Runge-Kutta at a fixed step.

    The step that straddles the end of the turn is split at that instant so the
    forcing discontinuity never sits inside an RK stage.
    """
    dt = cfg.time_step_s
    n = int(math.ceil(cfg.duration_s / dt - 1e-9))
    rhs = _rhs_factory(cfg)
    length = cfg.tether.length_m
    g = cfg.flight.gravity_mps2
    t_force = forcing_duration(cfg.flight) if cfg.forcing else 0.0
    accel = cfg.flight.speed_mps ** 2 / cfg.flight.turn_radius_m if t_force > 0 else 0.0

    thetas = np.empty(n + 1)
    omegas = np.empty(n + 1)
    theta, omega = float(cfg.initial_angle_rad), 0.0
    thetas[0], omegas[0] = theta, omega
    energy = pendulum_energy(theta, omega, length, g)
    for i in range(n):
        t0 = i * dt
        t1 = t0 + dt
        if t1 <= t_force:
            theta, omega = _rk4(rhs, theta, omega, accel, dt)
        elif t0 < t_force:
            theta, omega = _rk4(rhs, theta, omega, accel, t_force - t0)
            theta, omega = _rk4(rhs, theta, omega, 0.0, t1 - t_force)
            energy = pendulum_energy(theta, omega, length, g)
        else:
            theta, omega = _rk4(rhs, theta, omega, 0.0, dt)
            e_new = pendulum_energy(theta, omega, length, g)
            if e_new > energy * (1.0 + _ENERGY_RISE_TOL) + 1e-300:
                raise InstabilityError(
                    f"energy grew from {energy:.12g} to {e_new:.12g} J/kg at t={t1:.6g} s "
                    "in the unforced phase")
            energy = e_new
        if not abs(theta) < 0.5 * math.pi:
            raise InstabilityError(
                f"swing angle {theta:.4g} rad left the model regime at t={t1:.6g} s")
        thetas[i + 1], omegas[i + 1] = theta, omega

    times = np.arange(n + 1) * dt
    return Trajectory(times, thetas, length * np.sin(thetas), forcing_end_s=t_force,
                      swing_rate_radps=omegas, meta={"time_step_s": dt})


def measure_amplitude_settling(traj: Trajectory, band_fraction=0.05):
    """Peak offset and time from the end of forcing until the swing stays in band.

    Returns
    -------
    (amplitude_m, settling_s)
        A trajectory that never moves gives ``(0.0, 0.0)``.
    """
    check_interval("band_fraction", band_fraction, 0.0, 1.0, closed_low=False,
                   error=SimulationError)
    offset = np.abs(np.asarray(traj.bob_offset_m, dtype=float))
    times = np.asarray(traj.times, dtype=float)
    if offset.size == 0:
        raise SimulationError("empty trajectory")
    amplitude = float(offset.max())
    if amplitude == 0.0:
        return 0.0, 0.0
    outside = np.flatnonzero(offset > band_fraction * amplitude)
    last = int(outside[-1])
    if last == offset.size - 1:
        raise NoSettleError(
            f"swing never stayed within {band_fraction:g} x {amplitude:.6g} m "
            f"before t={times[-1]:.6g} s")
    return amplitude, max(0.0, float(times[last + 1]) - traj.forcing_end_s)


def measure(cfg: SimConfig):
    """Simulate and measure in one call: ``(amplitude_m, settling_s, trajectory)``."""
    traj = simulate_pendulum(cfg)
    amp, ts = measure_amplitude_settling(traj, cfg.settle_band_fraction)
    return amp, ts, traj
