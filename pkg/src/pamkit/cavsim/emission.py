"""Single-bubble acoustic emission models.

Stable cavitation uses the Marmottant shelled-bubble equation, inertial
cavitation a decaying-exponential pulse train (one pulse per excitation
cycle). Both return the pressure radiated at ``REFERENCE_DISTANCE``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..arrays import Medium
from ..errors import ConfigError, SimulationDivergedError
from .types import Emission

REFERENCE_DISTANCE = 1e-3

# Vokurka pulse-train statistics: (mean, std)
VOKURKA_PRESSURE = (14e6, 10e3)
VOKURKA_PHASE_OFFSET = (14e-6, 10e-9)
VOKURKA_TIME_CONSTANT = (2e-6, 0.5e-9)

MARMOTTANT_PRESSURE_STD = 10e3
MARMOTTANT_RADIUS_STD = 0.1e-6


@dataclass(frozen=True)
class ShellParams:
    """Lipid shell and liquid constants of the Marmottant model (SI units)."""

    sigma0: float = 0.02
    elasticity: float = 1.0
    shell_viscosity: float = 5e-9
    liquid_viscosity: float = 1e-3
    polytropic: float = 1.07
    ambient_pressure: float = 101.325e3
    sigma_water: float = 0.072


@dataclass(frozen=True)
class Drive:
    frequency: float
    pressure: float
    n_cycles: int


def _surface_tension(radius, r_buckle, r_rupture, params):
    if radius <= r_buckle:
        return 0.0
    if radius >= r_rupture:
        return params.sigma_water
    return params.elasticity * (radius * radius / (r_buckle * r_buckle) - 1.0)


def _marmottant_rhs(r0, drive, medium, params):
    """Right-hand side of the radial equation plus the shell radii it uses."""
    chi = params.elasticity
    r_buckle = r0 / math.sqrt(1.0 + params.sigma0 / chi)
    r_rupture = r_buckle * math.sqrt(1.0 + params.sigma_water / chi)
    sigma_r0 = _surface_tension(r0, r_buckle, r_rupture, params)
    p0 = params.ambient_pressure
    gas0 = p0 + 2.0 * sigma_r0 / r0
    three_k = 3.0 * params.polytropic
    rho, c = medium.density, medium.sos
    mu4 = 4.0 * params.liquid_viscosity
    ks4 = 4.0 * params.shell_viscosity
    omega = 2.0 * math.pi * drive.frequency
    t_end = drive.n_cycles / drive.frequency
    amp = drive.pressure

    def rhs(t, y):
        radius, velocity = y[0], y[1]
        if radius <= 0.0:
            return [velocity, math.nan]
        p_ac = amp * math.sin(omega * t) if t <= t_end else 0.0
        p_gas = gas0 * (r0 / radius) ** three_k * (1.0 - three_k * velocity / c)
        sigma = _surface_tension(radius, r_buckle, r_rupture, params)
        p_wall = (
            p_gas
            - p0
            - 2.0 * sigma / radius
            - mu4 * velocity / radius
            - ks4 * velocity / (radius * radius)
            - p_ac
        )
        accel = p_wall / (rho * radius) - 1.5 * velocity * velocity / radius
        return [velocity, accel]

    return rhs


def marmottant_emission(
    radius: float,
    drive: Drive,
    sample_rate: float,
    n_samples: int,
    medium: Medium = Medium(),
    params: ShellParams = ShellParams(),
    rng: np.random.Generator | None = None,
) -> Emission:
    """Radiated pressure of a lipid-shelled bubble under sinusoidal driving.

    When ``rng`` is given the drive amplitude is jittered by a normal draw
    with 10 kPa standard deviation, as done for every bubble in a cloud.
    """
    if not 0.5e-6 <= radius <= 5e-6:
        raise ConfigError(f"bubble radius {radius} m outside [0.5, 5] um")
    pressure = drive.pressure
    if rng is not None:
        pressure = float(rng.normal(pressure, MARMOTTANT_PRESSURE_STD))
    if not 0.0 <= pressure <= 2e6:
        raise ConfigError(f"drive pressure {pressure} Pa outside [0, 2] MPa")
    drive = Drive(drive.frequency, pressure, drive.n_cycles)

    rhs = _marmottant_rhs(radius, drive, medium, params)
    t_eval = np.arange(n_samples) / sample_rate
    omega = 2.0 * math.pi * drive.frequency
    # Explicit RK is only stable for h * omega_res below ~2.8; without this
    # cap a quiescent bubble drifts by up to atol and rings spuriously.
    h = 1e-6 * radius
    stiffness = -(rhs(0.0, [radius + h, 0.0])[1] - rhs(0.0, [radius - h, 0.0])[1]) / (2 * h)
    omega_res = math.sqrt(max(stiffness, 0.0))
    max_step = 1.0 / (4.0 * drive.frequency)
    if omega_res > 0:
        max_step = min(max_step, 1.0 / omega_res)
    sol = solve_ivp(
        rhs,
        (0.0, t_eval[-1]),
        [radius, 0.0],
        method="RK45",
        t_eval=t_eval,
        rtol=1e-6,
        atol=[1e-12, 1e-12 * omega],
        max_step=max_step,
    )
    if sol.status != 0 or not np.all(np.isfinite(sol.y)) or np.any(sol.y[0] <= 0):
        raise SimulationDivergedError(
            f"Marmottant integration failed for R0={radius * 1e6:.3f} um, "
            f"P={pressure * 1e-3:.1f} kPa, f={drive.frequency * 1e-6:.2f} MHz: {sol.message}"
        )
    r, v = sol.y
    accel = np.array([rhs(t, (ri, vi))[1] for t, ri, vi in zip(sol.t, r, v)])
    pressure_out = medium.density * (r * r * accel + 2.0 * r * v * v) / REFERENCE_DISTANCE
    return Emission(pressure_out, sample_rate, 0.0)


def pulse_train(t, times, amplitudes, time_constants) -> np.ndarray:
    """Sum of one-sided decaying exponentials ``a * exp(-(t - t_k) / theta_k)``."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    for tk, ak, thk in zip(times, amplitudes, time_constants):
        lag = t - tk
        on = lag >= 0
        out[on] += ak * np.exp(-lag[on] / thk)
    return out


def vokurka_emission(
    n_cycles: int,
    excitation_freq: float,
    sample_rate: float,
    n_samples: int,
    rng: np.random.Generator,
) -> Emission:
    """Inertial-cavitation pulse train with per-cycle random parameters."""
    if n_cycles < 1:
        raise ConfigError("n_cycles must be at least 1")
    amplitudes = rng.normal(*VOKURKA_PRESSURE, size=n_cycles)
    offsets = rng.normal(*VOKURKA_PHASE_OFFSET, size=n_cycles)
    time_constants = rng.normal(*VOKURKA_TIME_CONSTANT, size=n_cycles)
    times = np.arange(n_cycles) / excitation_freq + offsets
    t = np.arange(n_samples) / sample_rate
    return Emission(pulse_train(t, times, amplitudes, time_constants), sample_rate, 0.0)
