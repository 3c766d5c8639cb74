"""Passive beamformers producing cavitation energy maps."""

from .reconstruct import reconstruct
from .stack import delay_stack, pixel_energy, sample_covariance
from .types import (
    EPS_MULTI_SOURCE,
    EPS_SINGLE_SOURCE,
    BeamformParams,
    CovMatrix,
    DelayedStack,
    EnergyMap,
    Method,
    Weights,
)
from .weights import (
    correlation_coefficient,
    dax_factor,
    eisrcb_weights,
    rcb_solve,
    rcb_weights,
    rlpb_solve,
    rlpb_weights,
    tea_weights,
)

__all__ = [
    "EPS_MULTI_SOURCE",
    "EPS_SINGLE_SOURCE",
    "BeamformParams",
    "CovMatrix",
    "DelayedStack",
    "EnergyMap",
    "Method",
    "Weights",
    "correlation_coefficient",
    "dax_factor",
    "delay_stack",
    "eisrcb_weights",
    "pixel_energy",
    "rcb_solve",
    "rcb_weights",
    "reconstruct",
    "rlpb_solve",
    "rlpb_weights",
    "sample_covariance",
    "tea_weights",
]
