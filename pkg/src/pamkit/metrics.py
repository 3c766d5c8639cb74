"""Energy-map quality and localization metrics.

All thresholds are relative to the map maximum, so every metric here is
invariant under positive scaling of the map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .beamform.types import EnergyMap
from .errors import DegenerateMaskError, UndefinedMetricError

HALF_MAX = 0.5
MINUS_20DB = 0.01
CDF_BIN = 0.25
# distances within this many wavelengths of a bin edge count as on the edge
EDGE_SNAP = 1e-9


@dataclass(frozen=True)
class MapStats:
    a3db_area: float
    isnr_db: float
    centroid: tuple[float, float]


@dataclass(frozen=True, eq=False)
class DeviationCDF:
    """Cumulative fraction of deviations ``<=`` each edge (edges in wavelengths)."""

    bin_edges: np.ndarray
    cumulative_fraction: np.ndarray


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, EnergyMap) else np.asarray(m, dtype=np.float64)


def _peak(values) -> float:
    peak = float(np.max(values))
    if not peak > 0:
        raise UndefinedMetricError("map has no positive maximum")
    return peak


def half_max_mask(m) -> np.ndarray:
    """Pixels strictly above half the maximum."""
    v = _values(m)
    return v > HALF_MAX * _peak(v)


def region_20db(m) -> np.ndarray:
    """Pixels strictly above one hundredth of the maximum."""
    v = _values(m)
    return v > MINUS_20DB * _peak(v)


def union_mask(maps) -> np.ndarray:
    """Union of the -20 dB regions of several maps on one grid."""
    maps = list(maps)
    if not maps:
        raise ValueError("need at least one map")
    out = np.zeros(_values(maps[0]).shape, dtype=bool)
    for m in maps:
        out |= region_20db(m)
    return out


def area_3db(m: EnergyMap) -> float:
    """Area (mm^2) of the pixels above half the maximum."""
    g = m.grid
    return float(np.count_nonzero(half_max_mask(m))) * (g.dx * 1e3) * (g.dz * 1e3)


def isnr(m: EnergyMap, union_mask=None) -> float:
    """Mean energy inside A-3dB over mean energy in the surrounding region, in dB.

    Args:
        m: Energy map.
        union_mask: Outer region shared across compared maps; defaults to
            this map's own -20 dB region.

    Raises:
        DegenerateMaskError: Nothing of the outer region lies outside A-3dB.
    """
    v = _values(m)
    inside = half_max_mask(v)
    outer = region_20db(v) if union_mask is None else np.asarray(union_mask, dtype=bool)
    if outer.shape != v.shape:
        raise ValueError(f"mask of shape {outer.shape} vs map {v.shape}")
    ring = outer & ~inside
    if not np.any(ring):
        raise DegenerateMaskError("no pixels between the -20 dB and -3 dB contours")
    mean_out = float(np.mean(v[ring]))
    mean_in = float(np.mean(v[inside]))
    if mean_out == 0:
        return float("inf")
    return float(10.0 * np.log10(mean_in / mean_out))


def _fold(a) -> np.ndarray:
    """Add each column to its lateral mirror so sums are mirror-order free."""
    nx = a.shape[1]
    half = nx // 2
    out = a[:, :half] + a[:, ::-1][:, :half]
    if nx % 2:
        out = np.concatenate([out, a[:, half : half + 1]], axis=1)
    return out


def centroid(m: EnergyMap) -> tuple[float, float]:
    """Energy-weighted centre ``(x, z)`` of the A-3dB pixels, in metres.

    Columns are summed in mirror pairs, so on a grid symmetric about
    ``x = 0`` mirroring the map negates the lateral coordinate exactly.
    """
    v = m.values
    w = np.where(half_max_mask(v), v, 0.0)
    folded = _fold(w)
    total = float(np.sum(folded))
    x_num = float(np.sum(_fold(w * m.grid.x[None, :])))
    z_num = float(np.sum(np.sum(folded, axis=1) * m.grid.z))
    return x_num / total, z_num / total


def map_stats(m: EnergyMap, union_mask=None) -> MapStats:
    return MapStats(area_3db(m), isnr(m, union_mask), centroid(m))


def n_components(mask) -> int:
    """Number of 8-connected components of a boolean mask."""
    _, count = ndimage.label(np.asarray(mask, dtype=bool), structure=np.ones((3, 3)))
    return int(count)


def deviations(estimate, truth) -> tuple[float, float, float]:
    """``(|dx|, |dz|, euclidean)`` between two positions."""
    dx = abs(float(estimate[0]) - float(truth[0]))
    dz = abs(float(estimate[1]) - float(truth[1]))
    return dx, dz, float(np.hypot(dx, dz))


def deviation_cdf(pairs, wavelength: float) -> DeviationCDF:
    """CDF of Euclidean centroid deviations in wavelength units.

    Edges start at 0 and step by a quarter wavelength up to the first edge
    covering every deviation, so the last fraction is always 1.
    """
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    d = np.array([deviations(a, b)[2] for a, b in pairs]) / wavelength
    n_bins = int(np.ceil(np.max(d) / CDF_BIN - EDGE_SNAP / CDF_BIN))
    edges = CDF_BIN * np.arange(max(n_bins, 0) + 1)
    frac = np.array([np.count_nonzero(d <= e + EDGE_SNAP) for e in edges]) / d.size
    return DeviationCDF(edges, frac)
