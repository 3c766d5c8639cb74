"""Bubble-cloud cavitation simulator producing passive array RF frames."""

from .emission import (
    REFERENCE_DISTANCE,
    Drive,
    ShellParams,
    marmottant_emission,
    pulse_train,
    vokurka_emission,
)
from .propagation import N_SAMPLES, add_noise, band_filter, band_response, propagate
from .protocol import (
    Acquisition,
    cloud_axes,
    draw_sim_spec,
    sample_cloud,
    simulate_acquisition,
)
from .rng import stream
from .types import BubbleCloud, Emission, EmissionModel, RFFrame, SimSpec

__all__ = [
    "Acquisition",
    "BubbleCloud",
    "Drive",
    "Emission",
    "EmissionModel",
    "N_SAMPLES",
    "REFERENCE_DISTANCE",
    "RFFrame",
    "ShellParams",
    "SimSpec",
    "add_noise",
    "band_filter",
    "band_response",
    "cloud_axes",
    "draw_sim_spec",
    "marmottant_emission",
    "propagate",
    "pulse_train",
    "sample_cloud",
    "simulate_acquisition",
    "stream",
    "vokurka_emission",
]
