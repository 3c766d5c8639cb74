import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pamkit.arrays import ArrayModel, ImagingGrid, Medium, build_array, build_grid, element_distances
from pamkit.beamform import BeamformParams, Method, reconstruct
from pamkit.cavsim import Emission, RFFrame, propagate
from pamkit.errors import ConfigError, InfeasibleEpsilonError, PixelError

GEOM = build_array(ArrayModel.CL15_7)
MEDIUM = Medium()
N_T = 384


def _rf(data, geom=GEOM):
    return RFFrame(np.asarray(data, dtype=np.float64), geom.sample_rate, 0.0, geom.model_id, MEDIUM)


def _grid(nx, nz, dx=0.1e-3, dz=0.1e-3, cx=0.0, cz=6e-3):
    return ImagingGrid(cx - (nx - 1) / 2 * dx, cz - (nz // 2) * dz, nx, nz, dx, dz)


def _pulse(fs, fc, n=64):
    t = (np.arange(n) - n / 2) / fs
    return np.exp(-((t * fc / 1.5) ** 2)) * np.cos(2 * np.pi * fc * t)


@pytest.fixture(scope="module")
def point_source():
    grid = _grid(32, 32)
    src = (grid.x[16], grid.z[16])
    e = Emission(_pulse(GEOM.sample_rate, GEOM.center_freq), GEOM.sample_rate, 0.0)
    return grid, src, propagate([(src, e)], GEOM, MEDIUM, n_samples=N_T)


def _das_oracle(rf, grid):
    """Delay-and-sum energy with np.interp, one channel and pixel at a time."""
    fs, c = rf.sample_rate, rf.medium.sos
    t = np.arange(rf.n_samples)
    out = np.zeros(grid.shape)
    n = rf.n_channels
    for iz, z in enumerate(grid.z):
        for ix, x in enumerate(grid.x):
            d = element_distances(np.array([[x, z]]), GEOM)[0]
            y = np.zeros(rf.n_samples)
            for j in range(n):
                y += d[j] * np.interp(t + d[j] * fs / c, t, rf.data[j], left=0.0, right=0.0)
            out[iz, ix] = rf.medium.energy_prefactor / fs * np.sum((y / n) ** 2)
    return out


def test_zero_rf_zero_map():
    grid = _grid(8, 8)
    for method in (Method.TEA, Method.RCB):
        m = reconstruct(_rf(np.zeros((128, 200))), grid, method, geom=GEOM)
        assert np.all(m.values == 0)
        assert m.method is method


def test_point_source_tea_matches_das_oracle(point_source):
    grid, src, rf = point_source
    m = reconstruct(rf, grid, Method.TEA, geom=GEOM)
    oracle = _das_oracle(rf, grid)
    np.testing.assert_allclose(m.values, oracle, rtol=1e-9, atol=1e-12 * oracle.max())
    iz, ix = np.unravel_index(np.argmax(m.values), grid.shape)
    assert (grid.x[ix], grid.z[iz]) == src
    assert np.unravel_index(np.argmax(oracle), grid.shape) == (iz, ix)


@pytest.fixture(scope="module")
def noisy_source(point_source):
    grid, src, rf = point_source
    rng = np.random.default_rng(3)
    data = rf.data + 0.05 * np.std(rf.data) * rng.standard_normal(rf.data.shape)
    return _grid(8, 8, dx=0.2e-3, dz=0.2e-3, cx=src[0], cz=src[1]), _rf(data)


def test_eisrcb_tiny_delta_equals_rcb(noisy_source):
    grid, rf = noisy_source
    rcb = reconstruct(rf, grid, Method.RCB, BeamformParams(eps=20.0), geom=GEOM)
    eis = reconstruct(rf, grid, Method.EISRCB, BeamformParams(eps=20.0, delta=1e-12), geom=GEOM)
    np.testing.assert_allclose(eis.values, rcb.values, rtol=1e-8)


@settings(max_examples=15)
@given(alpha=st.floats(0.01, 100.0))
def test_tea_quadratic_scaling(alpha):
    rf = _rf(np.random.default_rng(4).standard_normal((128, 128)))
    grid = _grid(6, 6)
    base = reconstruct(rf, grid, Method.TEA, geom=GEOM).values
    scaled = reconstruct(_rf(alpha * rf.data), grid, Method.TEA, geom=GEOM).values
    np.testing.assert_allclose(scaled, alpha**2 * base, rtol=1e-10)


@pytest.mark.parametrize("method", list(Method))
def test_argmax_scale_invariant(method, noisy_source):
    grid, rf = noisy_source
    grid = _grid(4, 4, dx=0.2e-3, dz=0.2e-3, cx=grid.x[4], cz=grid.z[4])
    base = reconstruct(rf, grid, method, geom=GEOM).values
    scaled = reconstruct(_rf(7.0 * rf.data), grid, method, geom=GEOM).values
    assert np.argmax(scaled) == np.argmax(base)


def test_tea_mirror_symmetry():
    rng = np.random.default_rng(5)
    rf = _rf(rng.standard_normal((128, 256)))
    grid = build_grid(ArrayModel.CL15_7, decimation=16)
    m = reconstruct(rf, grid, Method.TEA, geom=GEOM).values
    mirrored = reconstruct(_rf(rf.data[::-1]), grid, Method.TEA, geom=GEOM).values
    assert np.array_equal(mirrored, m[:, ::-1])


@pytest.mark.parametrize("method", list(Method))
def test_thread_count_does_not_change_map(method, noisy_source):
    grid, rf = noisy_source
    if method is Method.RLPB:
        grid = _grid(3, 3, dx=0.2e-3, dz=0.2e-3, cx=grid.x[4], cz=grid.z[4])
    one = reconstruct(rf, grid, method, geom=GEOM, threads=1).values
    again = reconstruct(rf, grid, method, geom=GEOM, threads=1).values
    three = reconstruct(rf, grid, method, geom=GEOM, threads=3).values
    assert np.array_equal(one, again)
    assert np.array_equal(one, three)
    assert np.all(one >= 0) and np.all(np.isfinite(one))


def test_pixel_error_carries_coordinates():
    grid = _grid(3, 3)
    rf = _rf(np.random.default_rng(6).standard_normal((128, 64)))
    params = BeamformParams(steering=(0.0,) * 128)
    with pytest.raises(PixelError) as info:
        reconstruct(rf, grid, Method.RLPB, params, geom=GEOM)
    assert info.value.x == grid.x[0]
    assert info.value.z == grid.z[0]


def test_reconstruct_argument_errors():
    grid = _grid(3, 3)
    rf = _rf(np.zeros((128, 64)))
    with pytest.raises(InfeasibleEpsilonError):
        reconstruct(rf, grid, Method.RCB, BeamformParams(eps=128.0), geom=GEOM)
    with pytest.raises(ConfigError):
        reconstruct(_rf(np.zeros((96, 64)), build_array(ArrayModel.P4_1)), grid, "tea", geom=GEOM)
    with pytest.raises(ConfigError):
        reconstruct(rf, grid, Method.TEA, BeamformParams(window=(10, 60)), geom=GEOM)
    with pytest.raises(ConfigError):
        reconstruct(rf, grid, Method.TEA, geom=GEOM, threads=0)
    with pytest.warns(UserWarning):
        reconstruct(rf, grid, Method.RCB, geom=GEOM)
