"""Log-compressed grayscale rendering of energy maps."""

from __future__ import annotations

import warnings

import numpy as np

from ..beamform import EnergyMap
from ..errors import ConfigError


def to_gray(values, dyn_range_db: float) -> np.ndarray:
    """8-bit levels ``255 * clamp(1 + 10 log10(v / max) / DR, 0, 1)``, rounded half up."""
    if not dyn_range_db > 0:
        raise ConfigError(f"dynamic range must be positive, got {dyn_range_db}")
    v = np.asarray(values, dtype=np.float64)
    peak = float(np.max(v)) if v.size else 0.0
    if not peak > 0:
        warnings.warn("map has no positive values; rendering an all-black image", stacklevel=2)
        return np.zeros(v.shape, dtype=np.uint8)
    with np.errstate(divide="ignore"):
        level = 1.0 + 10.0 * np.log10(v / peak) / dyn_range_db
    level = np.clip(np.nan_to_num(level, nan=0.0, neginf=0.0), 0.0, 1.0)
    return np.floor(255.0 * level + 0.5).astype(np.uint8)


def render_map(m: EnergyMap, dyn_range_db: float, path) -> None:
    """Write a binary PGM; the top image row is the shallowest depth."""
    gray = to_gray(m.values, dyn_range_db)
    nz, nx = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {nz}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())
