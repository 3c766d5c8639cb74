"""Beamformer parameters and result containers."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..arrays import ImagingGrid
from ..errors import ConfigError


class Method(enum.IntEnum):
    TEA = 0
    RCB = 1
    EISRCB = 2
    DAXRCB = 3
    RLPB = 4

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            try:
                return cls(int(value))
            except ValueError:
                raise ConfigError(f"unknown beamforming method code {value}") from None
        key = str(value).strip().upper().replace("-", "").replace("_", "")
        if key in cls.__members__:
            return cls[key]
        raise ConfigError(f"unknown beamforming method {value!r}")

    @property
    def label(self) -> str:
        return {Method.DAXRCB: "DAX-RCB"}.get(self, self.name)

    @property
    def cli_name(self) -> str:
        return self.name.lower()


EPS_SINGLE_SOURCE = 20.0
EPS_MULTI_SOURCE = 30.0


@dataclass(frozen=True)
class BeamformParams:
    """User parameters of the adaptive beamformers.

    Attributes:
        eps: Radius (squared) of the steering-vector uncertainty ball.
        delta: Relative eigenvalue threshold of the signal subspace.
        tau: Weight-norm penalty of the linear-programming beamformer.
        dax_floor: Lower clamp of the dual-apodization correlation factor.
        rlpb_max_snapshots: Snapshots kept per pixel for the LP.
        steering: Assumed steering vector; ``None`` means all ones.
        window: ``(start, length)`` of the integration window in samples;
            ``None`` integrates over the whole trace.
    """

    eps: float = EPS_SINGLE_SOURCE
    delta: float = 0.5
    tau: float = 0.1
    dax_floor: float = 0.001
    rlpb_max_snapshots: int = 128
    steering: tuple | None = None
    window: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 0 < self.delta <= 1:
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta}")
        if not self.tau >= 0:
            raise ConfigError(f"tau must be non-negative, got {self.tau}")
        if not 0 < self.dax_floor < 1:
            raise ConfigError(f"dax_floor must lie in (0, 1), got {self.dax_floor}")
        if self.rlpb_max_snapshots < 1:
            raise ConfigError("rlpb_max_snapshots must be at least 1")
        if self.steering is not None:
            object.__setattr__(self, "steering", tuple(float(v) for v in self.steering))
        if self.window is not None:
            start, length = (int(v) for v in self.window)
            if start < 0 or length < 1:
                raise ConfigError(f"invalid integration window {self.window}")
            object.__setattr__(self, "window", (start, length))

    @classmethod
    def for_sources(cls, n_sources: int, **kwargs) -> "BeamformParams":
        """Default parameters for a known number of cavitation sources."""
        eps = EPS_SINGLE_SOURCE if n_sources <= 1 else EPS_MULTI_SOURCE
        return cls(eps=kwargs.pop("eps", eps), **kwargs)

    def steering_vector(self, n: int) -> np.ndarray:
        if self.steering is None:
            return np.ones(n)
        a = np.asarray(self.steering, dtype=np.float64)
        if a.shape != (n,):
            raise ConfigError(f"steering vector has {a.size} entries, array has {n}")
        return a


@dataclass(frozen=True, eq=False)
class DelayedStack:
    """Delayed, distance-compensated channel signals for one pixel.

    ``s`` has shape ``(N, T_w)``; ``window`` is ``(start, length)`` in samples.
    """

    s: np.ndarray
    dt: float
    window: tuple[int, int]

    @property
    def n_channels(self) -> int:
        return self.s.shape[0]


@dataclass(frozen=True, eq=False)
class CovMatrix:
    R: np.ndarray

    def is_valid(self) -> bool:
        """Symmetric and positive semidefinite up to rounding."""
        R = self.R
        scale = np.max(np.abs(R))
        if scale == 0:
            return True
        if np.max(np.abs(R - R.T)) >= 1e-9 * scale:
            return False
        g = np.linalg.eigvalsh(R)
        return bool(g[0] >= -1e-9 * max(g[-1], 0.0))


@dataclass(frozen=True, eq=False)
class Weights:
    w: np.ndarray
    method: Method


@dataclass(frozen=True, eq=False)
class EnergyMap:
    """Cavitation energy on an imaging grid, ``values`` of shape ``(nz, nx)``."""

    grid: ImagingGrid
    values: np.ndarray
    method: Method

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ConfigError(
                f"map values of shape {self.values.shape} do not match grid {self.grid.shape}"
            )
