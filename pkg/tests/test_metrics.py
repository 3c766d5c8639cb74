import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamkit.arrays import ImagingGrid
from pamkit.beamform import EnergyMap, Method
from pamkit.errors import DegenerateMaskError, UndefinedMetricError
from pamkit.metrics import (
    area_3db,
    centroid,
    deviation_cdf,
    deviations,
    isnr,
    map_stats,
    n_components,
    union_mask,
)


def _map(values, dx=0.1e-3, dz=0.1e-3, x0=-1e-3, z0=10e-3):
    values = np.asarray(values, dtype=np.float64)
    nz, nx = values.shape
    return EnergyMap(ImagingGrid(x0, z0, nx, nz, dx, dz), values, Method.TEA)


def _blob(rng, n=24):
    v = rng.random((n, n)) * 0.05
    cz, cx = rng.uniform(6, n - 6, size=2)
    zz, xx = np.mgrid[0:n, 0:n]
    v += np.exp(-((zz - cz) ** 2 + (xx - cx) ** 2) / (2 * rng.uniform(1, 3) ** 2))
    return v


maps = st.integers(0, 2**32 - 1).map(lambda s: _blob(np.random.default_rng(s)))


def test_area_examples():
    v = np.zeros((5, 5))
    v[2, 3] = 1.0
    assert area_3db(_map(v)) == pytest.approx(0.01, rel=1e-12)
    assert area_3db(_map(np.full((5, 4), 2.0))) == pytest.approx(20 * 0.01, rel=1e-12)
    # ties at exactly one half are excluded
    v[1, 1] = 0.5
    assert area_3db(_map(v)) == pytest.approx(0.01, rel=1e-12)


def test_area_gaussian_blob():
    d = 0.02e-3
    n = 400
    g = ImagingGrid(-(n - 1) / 2 * d, 10e-3, n, n, d, d)
    xx, zz = np.meshgrid(g.x, g.z - g.z[n // 2] + d / 2)
    sigma = 1e-3
    v = np.exp(-(xx**2 + zz**2) / (2 * sigma**2))
    fwhm_mm = 2 * 1.0 * math.sqrt(2 * math.log(2))
    assert area_3db(EnergyMap(g, v, Method.TEA)) == pytest.approx(math.pi * (fwhm_mm / 2) ** 2, rel=0.02)


def test_zero_map_undefined():
    m = _map(np.zeros((4, 4)))
    for fn in (area_3db, isnr, centroid):
        with pytest.raises(UndefinedMetricError):
            fn(m)


def test_isnr_example():
    v = np.ones((4, 5))
    v[0, 0] = 100.0
    everywhere = np.ones(v.shape, dtype=bool)
    assert isnr(_map(v), everywhere) == pytest.approx(20.0, abs=1e-12)
    v[1:] = 1.5
    v[0, 1:] = 0.5
    assert isnr(_map(v)) == pytest.approx(10 * math.log10(100 / 1.5), abs=1e-12)


def test_isnr_degenerate():
    with pytest.raises(DegenerateMaskError):
        isnr(_map(np.full((3, 3), 1.0)))
    v = np.zeros((3, 3))
    v[1, 1] = 1.0
    with pytest.raises(DegenerateMaskError):
        isnr(_map(v))


@given(v=maps)
def test_isnr_matches_two_region_oracle(v):
    m = _map(v)
    peak = v.max()
    inside = v > peak / 2
    ring = (v > peak / 100) & ~inside
    oracle = 10 * math.log10(v[inside].mean() / v[ring].mean())
    assert isnr(m) == pytest.approx(oracle, abs=1e-10)
    other = np.roll(v, 3, axis=1)
    u = union_mask([m, _map(other)])
    ring_u = ((v > peak / 100) | (other > other.max() / 100)) & ~inside
    assert isnr(m, u) == pytest.approx(10 * math.log10(v[inside].mean() / v[ring_u].mean()), abs=1e-10)


@given(v=maps, alpha=st.floats(1e-3, 1e3))
def test_metrics_scale_invariant(v, alpha):
    # powers of two scale without rounding; other factors may move ties by an ulp
    for a in (alpha, 2.0**10):
        base, scaled = map_stats(_map(v)), map_stats(_map(a * v))
        assert scaled.a3db_area == base.a3db_area
        assert scaled.isnr_db == pytest.approx(base.isnr_db, abs=1e-9)
        assert scaled.centroid == pytest.approx(base.centroid, abs=1e-15)
    exact = map_stats(_map(4.0 * v))
    assert exact == map_stats(_map(v))


def test_centroid_examples():
    v = np.zeros((4, 6))
    v[1, 2] = 3.0
    m = _map(v)
    assert centroid(m) == (m.grid.x[2], m.grid.z[1])
    v[3, 4] = 3.0
    c = centroid(_map(v))
    assert c == pytest.approx(((m.grid.x[2] + m.grid.x[4]) / 2, (m.grid.z[1] + m.grid.z[3]) / 2), abs=1e-15)


@given(v=maps)
def test_centroid_oracle_and_bounds(v):
    m = _map(v)
    iz, ix = np.nonzero(v > v.max() / 2)
    w = v[iz, ix]
    ox = sum(wi * m.grid.x[i] for wi, i in zip(w, ix)) / w.sum()
    oz = sum(wi * m.grid.z[i] for wi, i in zip(w, iz)) / w.sum()
    cx, cz = centroid(m)
    assert abs(cx - ox) <= 1e-12 and abs(cz - oz) <= 1e-12
    assert m.grid.x[ix.min()] <= cx <= m.grid.x[ix.max()]
    assert m.grid.z[iz.min()] <= cz <= m.grid.z[iz.max()]


@given(v=maps)
def test_centroid_mirror(v):
    # a grid symmetric about x = 0
    g = dict(x0=-(v.shape[1] - 1) / 2 * 0.1e-3)
    cx, cz = centroid(_map(v, **g))
    mx, mz = centroid(_map(v[:, ::-1], **g))
    assert mx == -cx
    assert mz == cz


def test_n_components():
    v = np.zeros((6, 6), dtype=bool)
    v[0, 0] = v[1, 1] = True  # diagonal neighbours are connected
    v[4, 4] = True
    assert n_components(v) == 2
    assert n_components(np.zeros((3, 3), dtype=bool)) == 0


def test_deviations():
    assert deviations((1.0, 2.0), (4.0, -2.0)) == (3.0, 4.0, 5.0)


def test_cdf_examples():
    lam = 0.3e-3
    c = deviation_cdf([((0.0, 1e-2), (0.0, 1e-2))] * 3, lam)
    assert c.bin_edges.tolist() == [0.0]
    assert c.cumulative_fraction.tolist() == [1.0]
    c = deviation_cdf([((0.0, 1e-2), (2 * lam, 1e-2))], lam)
    assert c.bin_edges[-1] == 2.0
    np.testing.assert_array_equal(c.cumulative_fraction[c.bin_edges < 2.0], 0.0)
    np.testing.assert_array_equal(c.cumulative_fraction[c.bin_edges >= 2.0], 1.0)
    with pytest.raises(ValueError):
        deviation_cdf([], lam)
    with pytest.raises(ValueError):
        deviation_cdf([((0, 0), (0, 0))], 0.0)


def test_cdf_counting_oracle():
    rng = np.random.default_rng(12)
    lam = 0.25e-3
    pairs = [((rng.normal(0, 1e-3), rng.normal(3e-2, 1e-3)), (0.0, 3e-2)) for _ in range(100)]
    c = deviation_cdf(pairs, lam)
    d = [math.hypot(a[0] - b[0], a[1] - b[1]) / lam for a, b in pairs]
    for e, f in zip(c.bin_edges, c.cumulative_fraction):
        assert f == sum(1 for x in d if x <= e) / 100
    assert np.all(np.diff(c.cumulative_fraction) >= 0)
    assert c.cumulative_fraction[-1] == 1.0
    np.testing.assert_allclose(np.diff(c.bin_edges), 0.25)
