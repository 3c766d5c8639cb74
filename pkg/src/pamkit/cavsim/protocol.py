"""Dataset protocol: bubble-cloud sampling and full acquisition synthesis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arrays import ArrayGeometry, Medium, build_grid
from .emission import MARMOTTANT_RADIUS_STD, Drive, marmottant_emission, vokurka_emission
from .propagation import N_SAMPLES, add_noise, band_filter, propagate
from .rng import stream
from .types import BubbleCloud, EmissionModel, RFFrame, SimSpec

AXIAL_RANGE = (12.8e-3, 57.6e-3)
MAJOR_AXIS_RANGE = (0.6e-3, 12e-3)
MINOR_AXIS_RANGE = (0.1e-3, 0.8e-3)
BUBBLE_COUNT_RANGE = (20, 100)
SEPARATION_RANGE = (4e-3, 8e-3)
ANGLE_RANGE_DEG = (-60.0, 60.0)
PRESSURE_MEAN_RANGE = (0.1e6, 1e6)
RADIUS_MEAN_RANGE = (1e-6, 3e-6)
SINGLE_CLOUD_FREQS = (0.5e6, 1e6, 1.5e6)
TWO_CLOUD_FREQ = 0.5e6
CYCLE_RANGE = (20, 100)
SOS_RANGE = (1480.0, 1600.0)


def axial_range(geom: ArrayGeometry, margin: float = 6e-3) -> tuple[float, float]:
    """Allowed cloud-centre depths, clipped to the array's imaging window."""
    grid = build_grid(geom.model_id, 1)
    top = grid.z0 - grid.dz / 2.0
    bottom = top + grid.extent[1]
    lo = max(AXIAL_RANGE[0], top + margin)
    hi = min(AXIAL_RANGE[1], bottom - margin)
    return lo, hi


def cloud_axes(depth: float, depth_range=AXIAL_RANGE) -> tuple[float, float]:
    """Ellipse (major, minor) axes for a cloud at ``depth``.

    The passive point-spread function grows with depth: its lateral width
    roughly linearly and its axial length roughly quadratically.
    """
    f = float(np.clip((depth - depth_range[0]) / (depth_range[1] - depth_range[0]), 0.0, 1.0))
    major = MAJOR_AXIS_RANGE[0] + (MAJOR_AXIS_RANGE[1] - MAJOR_AXIS_RANGE[0]) * f * f
    minor = MINOR_AXIS_RANGE[0] + (MINOR_AXIS_RANGE[1] - MINOR_AXIS_RANGE[0]) * f
    return major, minor


def _fill_cloud(center, rng) -> BubbleCloud:
    major, minor = cloud_axes(center[1])
    count = int(rng.integers(BUBBLE_COUNT_RANGE[0], BUBBLE_COUNT_RANGE[1] + 1))
    rho = np.sqrt(rng.uniform(0.0, 1.0, count))
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    positions = np.column_stack(
        [
            center[0] + 0.5 * minor * rho * np.cos(phi),
            center[1] + 0.5 * major * rho * np.sin(phi),
        ]
    )
    radius_mean = rng.uniform(*RADIUS_MEAN_RANGE)
    radii = np.clip(rng.normal(radius_mean, MARMOTTANT_RADIUS_STD, count), 0.5e-6, 5e-6)
    pressure = float(rng.uniform(*PRESSURE_MEAN_RANGE))
    return BubbleCloud(
        center=(float(center[0]), float(center[1])),
        major_axis=major,
        minor_axis=minor,
        positions=positions,
        radii=radii,
        drive_pressure=pressure,
    )


def sample_cloud(spec: SimSpec, rng: np.random.Generator, geom: ArrayGeometry) -> list[BubbleCloud]:
    """Draw one cloud, or two clouds at the ends of a random diameter."""
    half = geom.aperture / 2.0
    z_lo, z_hi = axial_range(geom)
    center = np.array([rng.uniform(-half, half), rng.uniform(z_lo, z_hi)])
    if spec.n_clouds == 1:
        return [_fill_cloud(center, rng)]
    separation = spec.separation
    if separation is None:
        separation = rng.uniform(*SEPARATION_RANGE)
    angle = spec.angle_deg
    if angle is None:
        angle = rng.uniform(*ANGLE_RANGE_DEG)
    theta = np.deg2rad(angle)
    offset = 0.5 * separation * np.array([np.cos(theta), np.sin(theta)])
    return [_fill_cloud(center - offset, rng), _fill_cloud(center + offset, rng)]


def draw_sim_spec(
    seed: int,
    acquisition: int,
    n_clouds: int = 1,
    model=EmissionModel.VOKURKA,
    snr_db=None,
    excitation_freq=None,
    n_cycles=None,
    sos=None,
    density: float = 1000.0,
    separation=None,
    angle_deg=None,
) -> SimSpec:
    """Draw the per-acquisition settings; any explicit argument pins its value.

    ``snr_db`` may be a number, ``None`` (noise-free) or a ``(lo, hi)`` pair
    to draw uniformly.
    """
    rng = stream(seed, acquisition, "spec")
    if excitation_freq is None:
        excitation_freq = TWO_CLOUD_FREQ if n_clouds == 2 else float(rng.choice(SINGLE_CLOUD_FREQS))
    if n_cycles is None:
        n_cycles = int(rng.integers(CYCLE_RANGE[0], CYCLE_RANGE[1] + 1))
    if sos is None:
        sos = float(rng.uniform(*SOS_RANGE))
    if isinstance(snr_db, (tuple, list)):
        snr_db = float(rng.uniform(*snr_db))
    return SimSpec(
        n_clouds=n_clouds,
        excitation_freq=excitation_freq,
        n_cycles=n_cycles,
        model=model,
        snr_db=snr_db,
        medium=Medium(sos=sos, density=density),
        seed=seed,
        separation=separation,
        angle_deg=angle_deg,
    )


@dataclass(frozen=True, eq=False)
class Acquisition:
    index: int
    spec: SimSpec
    clouds: list
    frame: RFFrame

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.clouds])


def cloud_emissions(clouds, spec: SimSpec, geom: ArrayGeometry, rng, n_samples=N_SAMPLES):
    """Yield ``(position, Emission)`` for every bubble in the clouds."""
    fs = geom.sample_rate
    for cloud in clouds:
        for position, radius in zip(cloud.positions, cloud.radii):
            if spec.model is EmissionModel.VOKURKA:
                emission = vokurka_emission(spec.n_cycles, spec.excitation_freq, fs, n_samples, rng)
            else:
                drive = Drive(spec.excitation_freq, cloud.drive_pressure, spec.n_cycles)
                emission = marmottant_emission(
                    float(radius), drive, fs, n_samples, spec.medium, rng=rng
                )
            yield position, emission


def simulate_acquisition(
    spec: SimSpec,
    geom: ArrayGeometry,
    acquisition: int = 0,
    n_samples: int = N_SAMPLES,
) -> Acquisition:
    """Clouds -> per-bubble emissions -> propagation -> band filter -> noise.

    Each stage draws from its own ``(seed, acquisition, role)`` stream.
    """
    clouds = sample_cloud(spec, stream(spec.seed, acquisition, "cloud"), geom)
    rng = stream(spec.seed, acquisition, "emission")
    sources = list(cloud_emissions(clouds, spec, geom, rng, n_samples))
    frame = propagate(sources, geom, spec.medium, n_samples=n_samples, seed=spec.seed)
    frame = band_filter(frame, geom)
    if spec.snr_db is not None:
        frame = add_noise(frame, spec.snr_db, stream(spec.seed, acquisition, "noise"))
    return Acquisition(acquisition, spec, clouds, frame)

