"""Delay compensation, covariance estimation and pixel energy."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..arrays import ArrayGeometry, Medium, element_distances
from ..errors import InvalidFieldPointError
from .types import CovMatrix, DelayedStack, Weights


def resolve_window(window, n_samples: int) -> tuple[int, int]:
    if window is None:
        return (0, n_samples)
    return (int(window[0]), int(window[1]))


@njit(cache=True, nogil=True)
def _gather(padded, first, a, b, out):
    n_b, n_ch, n_t = out.shape
    for p in range(n_b):
        for j in range(n_ch):
            k, wa, wb, row = first[p, j], a[p, j], b[p, j], padded[j]
            o = out[p, j]
            for t in range(n_t):
                o[t] = wa * row[k + t] + wb * row[k + t + 1]


@njit(cache=True, nogil=True)
def _mirror_sum(padded, first, a, b, out):
    # Channel j is always added to channel N-1-j first, so mirrored pixels
    # of a mirrored frame see identical operands in identical order.
    n_b, n_t = out.shape
    n_ch = first.shape[1]
    half = n_ch // 2
    for p in range(n_b):
        o = out[p]
        o[:] = 0.0
        for j in range(half):
            m = n_ch - 1 - j
            k1, a1, b1, r1 = first[p, j], a[p, j], b[p, j], padded[j]
            k2, a2, b2, r2 = first[p, m], a[p, m], b[p, m], padded[m]
            for t in range(n_t):
                o[t] += (a1 * r1[k1 + t] + b1 * r1[k1 + t + 1]) + (
                    a2 * r2[k2 + t] + b2 * r2[k2 + t + 1]
                )
        if n_ch % 2:
            k, wa, wb, row = first[p, half], a[p, half], b[p, half], padded[half]
            for t in range(n_t):
                o[t] += wa * row[k + t] + wb * row[k + t + 1]


def pad_traces(data, length) -> np.ndarray:
    """Zero-pad traces so any window of ``length + 1`` samples can be read."""
    n_ch, n_t = data.shape
    pad = length + 1
    padded = np.zeros((n_ch, pad + n_t + pad + 1))
    padded[:, pad : pad + n_t] = data
    return padded


def _taps(padded, fs, distances, sos, start, length):
    pad = length + 1
    n_t = padded.shape[1] - 2 * pad - 1
    position = start + distances * (fs / sos)
    whole = np.floor(position)
    frac = position - whole
    # Out-of-range starts only ever touch padding, so clipping them is exact.
    first = np.clip(whole, -pad, n_t).astype(np.int64) + pad
    return first, distances * (1.0 - frac), distances * frac


def stack_batch(data, fs, distances, sos, start, length, padded=None) -> np.ndarray:
    """Delayed stacks for many pixels at once.

    Args:
        data: Channel traces ``(N, T)``.
        fs: Sampling rate.
        distances: Pixel-to-element distances ``(B, N)``.
        sos: Speed of sound.
        start: First window sample.
        length: Number of window samples to produce.
        padded: ``pad_traces(data, L)`` for some ``L >= length``, to skip
            re-padding on repeated calls.

    Returns:
        Array ``(B, N, length)`` with ``s_j[k] = d_j * p_j(start + k + d_j fs / c)``;
        trace samples outside ``[0, T)`` read as zero.
    """
    distances = np.asarray(distances, dtype=np.float64)
    if padded is None:
        padded = pad_traces(np.asarray(data, dtype=np.float64), length)
    out = np.empty(distances.shape + (length,))
    _gather(padded, *_taps(padded, fs, distances, sos, start, _pad_length(padded, data)), out)
    return out


def channel_sum_batch(data, fs, distances, sos, start, length, padded=None) -> np.ndarray:
    """``sum_j s_j`` for many pixels, without materializing the stacks."""
    distances = np.asarray(distances, dtype=np.float64)
    if padded is None:
        padded = pad_traces(np.asarray(data, dtype=np.float64), length)
    out = np.empty((distances.shape[0], length))
    _mirror_sum(padded, *_taps(padded, fs, distances, sos, start, _pad_length(padded, data)), out)
    return out


def _pad_length(padded, data) -> int:
    return (padded.shape[1] - data.shape[1] - 1) // 2 - 1


def delay_stack(rf, r, geom: ArrayGeometry, medium: Medium | None = None, window=None) -> DelayedStack:
    """Delayed, distance-weighted element signals for the pixel at ``r``.

    Samples that fall beyond the recorded trace are zero-filled.
    """
    medium = rf.medium if medium is None else medium
    r = np.asarray(r, dtype=np.float64)
    if not r[1] > 0:
        raise InvalidFieldPointError(f"axial coordinate must be positive, got {r[1]}")
    start, length = resolve_window(window, rf.n_samples)
    dist = element_distances(r[None, :], geom)
    s = stack_batch(np.asarray(rf.data, dtype=np.float64), rf.sample_rate, dist, medium.sos, start, length)
    return DelayedStack(s[0], 1.0 / rf.sample_rate, (start, length))


def covariance_batch(s, dt) -> np.ndarray:
    return dt * (s @ np.swapaxes(s, -1, -2))


def sample_covariance(stack: DelayedStack) -> CovMatrix:
    """``R = dt * sum_t s(t) s(t)^T``."""
    return CovMatrix(covariance_batch(stack.s, stack.dt))


def energy_batch(y, dt, prefactor) -> np.ndarray:
    """Energies of beamformed signals ``y`` of shape ``(..., T)``."""
    return prefactor * dt * np.sum(y * y, axis=-1)


def pixel_energy(w, stack: DelayedStack, medium: Medium) -> float:
    """``4 pi / (rho0 c) * dt * sum_t (w^T s(t))^2``."""
    w = w.w if isinstance(w, Weights) else np.asarray(w, dtype=np.float64)
    if w.shape != (stack.n_channels,):
        raise ValueError(f"weights of shape {w.shape} vs {stack.n_channels} channels")
    y = w @ stack.s
    return float(energy_batch(y, stack.dt, medium.energy_prefactor))
