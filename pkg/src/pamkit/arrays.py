"""Transducer array geometry, acoustic medium and imaging grids.

Coordinates are in metres. The array lies on the ``z = 0`` line with the
aperture centred on the origin; ``x`` is lateral and ``z`` increases into
the medium. Elements are treated as omnidirectional points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    InvalidDecimationError,
    InvalidFieldPointError,
    UnsupportedModelError,
)

FULL_GRID_SIZE = 512
MAX_PIXELS = 2**22


class ArrayModel(enum.IntEnum):
    P4_1 = 0
    L7_4 = 1
    CL15_7 = 2

    @classmethod
    def parse(cls, value) -> "ArrayModel":
        """Accept an ``ArrayModel``, its integer code, or a name like ``"L7-4"``."""
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            try:
                return cls(int(value))
            except ValueError:
                raise UnsupportedModelError(f"unsupported array model code {value}") from None
        if isinstance(value, str):
            key = value.strip().upper().replace("-", "_")
            if key in cls.__members__:
                return cls[key]
        raise UnsupportedModelError(f"unsupported array model {value!r}")

    @property
    def label(self) -> str:
        return self.name.replace("_", "-")


# elements, aperture (m), centre frequency (Hz), fractional bandwidth, sampling rate (Hz)
_ARRAY_TABLE = {
    ArrayModel.P4_1: (96, 28.8e-3, 2.5e6, 0.80, 20.08e6),
    ArrayModel.L7_4: (128, 38.4e-3, 5.0e6, 0.60, 20.90e6),
    ArrayModel.CL15_7: (128, 25.6e-3, 9.0e6, 0.60, 35.6e6),
}

# lateral pixel (m), axial pixel (m), start of the axial range (m)
_GRID_TABLE = {
    ArrayModel.P4_1: (0.075e-3, 0.2e-3, 0.0),
    ArrayModel.L7_4: (0.075e-3, 0.1e-3, 15e-3),
    ArrayModel.CL15_7: (0.05e-3, 0.08e-3, 10e-3),
}


def _centered(n: int, step: float) -> np.ndarray:
    # (i - (n-1)/2) is exactly negated under i -> n-1-i, so the result is
    # bitwise antisymmetric about zero.
    return (np.arange(n) - (n - 1) / 2.0) * step


@dataclass(frozen=True)
class Medium:
    sos: float = 1540.0
    density: float = 1000.0

    def __post_init__(self):
        if not 1400.0 <= self.sos <= 1700.0:
            raise ConfigError(f"speed of sound {self.sos} m/s outside [1400, 1700]")
        if not self.density > 0:
            raise ConfigError(f"density must be positive, got {self.density}")

    @property
    def energy_prefactor(self) -> float:
        """The ``4*pi / (rho0 * c)`` factor that converts squared pressure to energy."""
        return 4.0 * np.pi / (self.density * self.sos)


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    model_id: ArrayModel
    element_x: np.ndarray
    pitch: float
    aperture: float
    center_freq: float
    frac_bandwidth: float
    sample_rate: float

    def __post_init__(self):
        x = self.element_x
        if x.ndim != 1 or x.size < 1:
            raise ConfigError("element_x must be a non-empty 1-D array")
        if np.any(np.diff(x) <= 0):
            raise ConfigError("element positions must be strictly increasing")
        if np.max(np.abs(x + x[::-1])) >= 1e-12:
            raise ConfigError("element positions must be symmetric about x = 0")
        nyquist = 2.0 * self.center_freq * (1.0 + self.frac_bandwidth / 2.0)
        if not self.sample_rate > nyquist:
            raise ConfigError(f"sample rate {self.sample_rate} Hz does not cover the band")
        x.setflags(write=False)

    @property
    def n_elements(self) -> int:
        return self.element_x.shape[0]

    def wavelength(self, medium: Medium) -> float:
        return medium.sos / self.center_freq

    def __eq__(self, other):
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        return (
            self.model_id == other.model_id
            and np.array_equal(self.element_x, other.element_x)
            and self.sample_rate == other.sample_rate
            and self.center_freq == other.center_freq
            and self.frac_bandwidth == other.frac_bandwidth
        )

    __hash__ = None


def build_array(model_id) -> ArrayGeometry:
    """Build the element layout of one of the supported arrays."""
    model = ArrayModel.parse(model_id)
    n, aperture, fc, bw, fs = _ARRAY_TABLE[model]
    pitch = aperture / n
    return ArrayGeometry(
        model_id=model,
        element_x=_centered(n, pitch),
        pitch=pitch,
        aperture=aperture,
        center_freq=fc,
        frac_bandwidth=bw,
        sample_rate=fs,
    )


def element_distances(points, geom: ArrayGeometry) -> np.ndarray:
    """Distances from field points to every element.

    Args:
        points: Array of shape ``(..., 2)`` holding ``(x, z)`` in metres.
        geom: Array geometry.

    Returns:
        Array of shape ``(..., N)``.
    """
    points = np.asarray(points, dtype=np.float64)
    if np.any(points[..., 1] <= 0):
        raise InvalidFieldPointError("field points must have a positive axial coordinate")
    dx = points[..., 0, None] - geom.element_x
    return np.hypot(dx, points[..., 1, None])


def element_path(r, j: int, geom: ArrayGeometry, medium: Medium) -> tuple[float, float]:
    """Propagation distance and travel time from ``r`` to element ``j``."""
    x, z = float(r[0]), float(r[1])
    if not z > 0:
        raise InvalidFieldPointError(f"axial coordinate must be positive, got {z}")
    if not 0 <= j < geom.n_elements:
        raise IndexError(f"element index {j} out of range for {geom.n_elements} elements")
    distance = float(np.hypot(x - geom.element_x[j], z))
    return distance, distance / medium.sos


@dataclass(frozen=True)
class ImagingGrid:
    """Regular pixel grid; ``(x0, z0)`` is the centre of the first pixel."""

    x0: float
    z0: float
    nx: int
    nz: int
    dx: float
    dz: float

    def __post_init__(self):
        if self.nx < 2 or self.nz < 2:
            raise ConfigError(f"grid must be at least 2x2, got {self.nz}x{self.nx}")
        if not (self.dx > 0 and self.dz > 0):
            raise ConfigError("pixel sizes must be positive")
        if self.nx * self.nz > MAX_PIXELS:
            raise ConfigError(f"grid of {self.nx * self.nz} pixels exceeds {MAX_PIXELS}")

    @property
    def x(self) -> np.ndarray:
        """Lateral pixel centres. Symmetric grids are exactly antisymmetric."""
        offset = self.x0 + (self.nx - 1) / 2.0 * self.dx
        return _centered(self.nx, self.dx) + offset

    @property
    def z(self) -> np.ndarray:
        return self.z0 + np.arange(self.nz) * self.dz

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nz, self.nx)

    @property
    def n_pixels(self) -> int:
        return self.nx * self.nz

    @property
    def extent(self) -> tuple[float, float]:
        """Physical (lateral, axial) size covered by the pixels."""
        return (self.nx * self.dx, self.nz * self.dz)

    def points(self) -> np.ndarray:
        """Pixel centres as an array of shape ``(nz, nx, 2)``."""
        xx, zz = np.meshgrid(self.x, self.z)
        return np.stack([xx, zz], axis=-1)


def build_grid(model_id, decimation: int = 1) -> ImagingGrid:
    """Reconstruction grid for an array, optionally decimated.

    The full grid is 512x512. Decimating by ``k`` keeps the physical extent
    and multiplies both pixel sizes by ``k``.
    """
    model = ArrayModel.parse(model_id)
    if isinstance(decimation, bool) or not isinstance(decimation, (int, np.integer)):
        raise InvalidDecimationError(f"decimation must be an integer, got {decimation!r}")
    if decimation < 1 or FULL_GRID_SIZE % decimation:
        raise InvalidDecimationError(f"decimation {decimation} does not divide {FULL_GRID_SIZE}")
    dx, dz, z_start = _GRID_TABLE[model]
    n = FULL_GRID_SIZE // int(decimation)
    dx *= decimation
    dz *= decimation
    return ImagingGrid(
        x0=-(n - 1) / 2.0 * dx,
        z0=z_start + dz / 2.0,
        nx=n,
        nz=n,
        dx=dx,
        dz=dz,
    )
