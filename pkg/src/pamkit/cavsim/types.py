"""Data containers produced by the cavitation simulator."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..arrays import ArrayModel, Medium
from ..errors import ConfigError


class EmissionModel(enum.Enum):
    MARMOTTANT = "marmottant"
    VOKURKA = "vokurka"

    @classmethod
    def parse(cls, value) -> "EmissionModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown emission model {value!r}") from None


@dataclass(frozen=True)
class SimSpec:
    """Parameters of one simulated acquisition.

    ``separation`` and ``angle_deg`` pin the two-cloud geometry; when left
    as ``None`` they are drawn from the dataset distribution.
    """

    n_clouds: int = 1
    excitation_freq: float = 0.5e6
    n_cycles: int = 50
    model: EmissionModel = EmissionModel.VOKURKA
    snr_db: float | None = None
    medium: Medium = field(default_factory=Medium)
    seed: int = 0
    separation: float | None = None
    angle_deg: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", EmissionModel.parse(self.model))
        if self.n_clouds not in (1, 2):
            raise ConfigError(f"n_clouds must be 1 or 2, got {self.n_clouds}")
        if not 0.25e6 <= self.excitation_freq <= 3e6:
            raise ConfigError(f"excitation frequency {self.excitation_freq} Hz outside [0.25, 3] MHz")
        if not 5 <= self.n_cycles <= 200:
            raise ConfigError(f"n_cycles {self.n_cycles} outside [5, 200]")
        if self.separation is not None and not self.separation > 0:
            raise ConfigError("cloud separation must be positive")


@dataclass(frozen=True, eq=False)
class BubbleCloud:
    """Bubbles scattered inside an ellipse.

    ``minor_axis`` is the lateral and ``major_axis`` the axial full length.
    """

    center: tuple[float, float]
    major_axis: float
    minor_axis: float
    positions: np.ndarray
    radii: np.ndarray
    drive_pressure: float = 0.0

    @property
    def n_bubbles(self) -> int:
        return self.positions.shape[0]

    def contains(self, points, rtol: float = 1e-12) -> np.ndarray:
        points = np.atleast_2d(points)
        u = (points[:, 0] - self.center[0]) / (self.minor_axis / 2.0)
        v = (points[:, 1] - self.center[1]) / (self.major_axis / 2.0)
        return u * u + v * v <= 1.0 + rtol


@dataclass(frozen=True, eq=False)
class Emission:
    """Source pressure waveform referenced to 1 mm from the bubble."""

    samples: np.ndarray
    sample_rate: float
    onset: float = 0.0

    def __post_init__(self):
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("emission must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("emission contains non-finite samples")


@dataclass(frozen=True, eq=False)
class RFFrame:
    """Passively received channel traces, shape ``(n_channels, n_samples)``."""

    data: np.ndarray
    sample_rate: float
    t_start: float
    array_model: ArrayModel
    medium: Medium
    seed: int = 0

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def with_data(self, data) -> "RFFrame":
        return RFFrame(data, self.sample_rate, self.t_start, self.array_model, self.medium, self.seed)
