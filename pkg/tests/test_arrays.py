import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamkit.arrays import (
    ArrayModel,
    ImagingGrid,
    Medium,
    build_array,
    build_grid,
    element_distances,
    element_path,
)
from pamkit.errors import (
    ConfigError,
    InvalidDecimationError,
    InvalidFieldPointError,
    UnsupportedModelError,
)

MODELS = list(ArrayModel)


def test_p4_1_parameters():
    g = build_array(ArrayModel.P4_1)
    assert g.n_elements == 96
    assert g.aperture == pytest.approx(28.8e-3)
    assert g.center_freq == 2.5e6
    assert g.frac_bandwidth == 0.80


def test_p4_1_pitch_and_first_element():
    g = build_array("p4-1")
    assert g.pitch == pytest.approx(0.3e-3, abs=1e-15)
    assert g.element_x[0] == pytest.approx(-14.25e-3, abs=1e-15)
    # summing the spacings reproduces the span between edge elements
    assert np.sum(np.diff(g.element_x)) == pytest.approx((g.n_elements - 1) * g.pitch, abs=1e-12)


def test_sample_rates():
    assert build_array(ArrayModel.CL15_7).sample_rate == 35.6e6
    assert build_array(ArrayModel.L7_4).sample_rate == 20.90e6
    assert build_array(ArrayModel.P4_1).sample_rate == 20.08e6


def test_unknown_model():
    with pytest.raises(UnsupportedModelError):
        build_array("c5-2")
    with pytest.raises(UnsupportedModelError):
        ArrayModel.parse(7)


@pytest.mark.parametrize("model", MODELS)
def test_geometry_invariants(model):
    g = build_array(model)
    x = g.element_x
    assert np.all(np.diff(x) > 0)
    assert np.max(np.abs(x + x[::-1])) < 1e-12
    assert abs(g.aperture - g.n_elements * g.pitch) < 1e-9
    assert g.sample_rate > 2 * g.center_freq * (1 + g.frac_bandwidth / 2)


def test_element_path_examples():
    g = build_array(ArrayModel.P4_1)
    c1500 = Medium(sos=1500.0)
    # element nearest x = 0 mm is at +-0.15 mm; use element_distances against a shifted point
    j = g.n_elements // 2
    d, t = element_path((g.element_x[j], 30e-3), j, g, c1500)
    assert d == pytest.approx(30e-3, rel=1e-15)
    assert t == pytest.approx(20e-6, rel=1e-15)
    d, t = element_path((g.element_x[j] - 3e-3, 4e-3), j, g, c1500)
    assert d == pytest.approx(5e-3, rel=1e-14)
    assert t == pytest.approx(5e-3 / 1500, rel=1e-14)


def test_element_path_edge_element():
    g = build_array(ArrayModel.P4_1)
    d, t = element_path((0.0, 57.6e-3), 0, g, Medium(sos=1480.0))
    assert d == pytest.approx(math.hypot(14.25e-3, 57.6e-3), rel=1e-14)
    assert d == pytest.approx(59.34e-3, abs=0.005e-3)
    assert t == pytest.approx(40.09e-6, abs=0.005e-6)


def test_element_path_errors():
    g = build_array(ArrayModel.L7_4)
    with pytest.raises(InvalidFieldPointError):
        element_path((0.0, 0.0), 0, g, Medium())
    with pytest.raises(InvalidFieldPointError):
        element_distances(np.array([[0.0, -1e-3]]), g)
    with pytest.raises(IndexError):
        element_path((0.0, 1e-3), g.n_elements, g, Medium())


def test_medium_validation():
    with pytest.raises(ConfigError):
        Medium(sos=1300.0)
    with pytest.raises(ConfigError):
        Medium(density=0.0)
    assert Medium(sos=1500.0, density=1000.0).energy_prefactor == pytest.approx(
        4 * math.pi / 1.5e6
    )


@given(
    model=st.sampled_from(MODELS),
    x=st.floats(-30e-3, 30e-3),
    z=st.floats(1e-4, 0.1),
    sos=st.floats(1400.0, 1700.0),
)
def test_mirror_and_delay_identities(model, x, z, sos):
    g = build_array(model)
    medium = Medium(sos=sos)
    d = element_distances(np.array([x, z]), g)
    dm = element_distances(np.array([-x, z]), g)
    np.testing.assert_allclose(d, dm[::-1], rtol=0, atol=1e-12)
    for j in (0, g.n_elements // 3, g.n_elements - 1):
        dist, delay = element_path((x, z), j, g, medium)
        assert abs(delay * sos - dist) <= 1e-15 * dist


def test_grid_cl15_7_full():
    g = build_grid(ArrayModel.CL15_7, 1)
    assert (g.nx, g.nz) == (512, 512)
    assert g.dx == pytest.approx(0.05e-3)
    assert g.dz == pytest.approx(0.08e-3)
    top = g.z[0] - g.dz / 2
    bottom = g.z[-1] + g.dz / 2
    assert top == pytest.approx(10e-3)
    assert bottom == pytest.approx(50.96e-3)


def test_grid_cl15_7_decimated():
    g1, g4 = build_grid(ArrayModel.CL15_7, 1), build_grid(ArrayModel.CL15_7, 4)
    assert (g4.nx, g4.nz) == (128, 128)
    assert g4.dx == pytest.approx(0.2e-3)
    assert g4.dz == pytest.approx(0.32e-3)
    assert g4.extent == pytest.approx(g1.extent)


def test_grid_p4_1_range():
    g = build_grid(ArrayModel.P4_1)
    assert g.extent[1] == pytest.approx(102.4e-3)
    assert g.extent[0] == pytest.approx(38.4e-3)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("k", [1, 2, 4, 8, 16, 32, 64, 128, 256])
def test_decimation_preserves_extent(model, k):
    g1, gk = build_grid(model, 1), build_grid(model, k)
    assert gk.nx * gk.dx == pytest.approx(g1.nx * g1.dx, rel=1e-12)
    assert gk.nz * gk.dz == pytest.approx(g1.nz * g1.dz, rel=1e-12)
    # lateral centres are exactly antisymmetric
    assert np.array_equal(gk.x, -gk.x[::-1])


@pytest.mark.parametrize("k", [0, 3, 7, 1024, 2.0, True])
def test_bad_decimation(k):
    with pytest.raises(InvalidDecimationError):
        build_grid(ArrayModel.L7_4, k)


def test_grid_validation():
    with pytest.raises(ConfigError):
        ImagingGrid(0.0, 1e-3, 1, 4, 1e-4, 1e-4)
    with pytest.raises(ConfigError):
        ImagingGrid(0.0, 1e-3, 4, 4, 0.0, 1e-4)
    with pytest.raises(ConfigError):
        ImagingGrid(0.0, 1e-3, 4096, 2048, 1e-4, 1e-4)
    g = ImagingGrid(-1e-3, 1e-3, 3, 2, 1e-3, 2e-3)
    assert g.points().shape == (2, 3, 2)
    np.testing.assert_allclose(g.x, [-1e-3, 0.0, 1e-3], atol=1e-18)
