"""Free-field propagation to the array, receive band filter and noise."""

from __future__ import annotations

import numpy as np

from ..arrays import ArrayGeometry, Medium, element_distances
from ..errors import RateMismatchError, ZeroPowerError
from .emission import REFERENCE_DISTANCE
from .types import Emission, RFFrame

N_SAMPLES = 2048


def propagate(
    sources,
    geom: ArrayGeometry,
    medium: Medium,
    n_samples: int = N_SAMPLES,
    t_start: float = 0.0,
    seed: int = 0,
) -> RFFrame:
    """Sum spherically spreading emissions at every element.

    ``p_j(t) = sum_b (d_ref / d_jb) * e_b(t - onset_b - d_jb / c)`` with the
    fractional part of each delay resolved by linear interpolation; the
    emission is zero outside its sampled support.

    Args:
        sources: Iterable of ``(position, Emission)`` pairs.
        geom: Receiving array.
        medium: Homogeneous propagation medium.
        n_samples: Length of the recorded traces.
        t_start: Time of the first recorded sample.
        seed: Stored on the frame for provenance only.
    """
    fs = geom.sample_rate
    data = np.zeros((geom.n_elements, n_samples))
    n = np.arange(n_samples)
    for position, emission in sources:
        if emission.sample_rate != fs:
            raise RateMismatchError(
                f"emission sampled at {emission.sample_rate} Hz, array at {fs} Hz"
            )
        dist = element_distances(np.asarray(position, dtype=np.float64), geom)
        delay = (emission.onset + dist / medium.sos - t_start) * fs
        whole = np.floor(delay)
        frac = (delay - whole)[:, None]
        e = emission.samples
        # zero-extend by one sample on the left so index -1 reads as 0
        padded = np.concatenate(([0.0], e, [0.0]))
        k = n[None, :] - whole.astype(np.int64)[:, None]
        hi = np.clip(k, -1, e.size) + 1
        lo = np.clip(k - 1, -1, e.size) + 1
        data += (REFERENCE_DISTANCE / dist)[:, None] * ((1.0 - frac) * padded[hi] + frac * padded[lo])
    return RFFrame(data, fs, t_start, geom.model_id, medium, seed)


def band_response(freqs, geom: ArrayGeometry) -> np.ndarray:
    """Magnitude response of the receive filter.

    Gaussian in frequency with its -6 dB points at ``f_c (1 +- B/2)``,
    truncated to zero outside ``f_c (1 +- B)``.
    """
    fc = geom.center_freq
    sigma = fc * geom.frac_bandwidth / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    offset = np.abs(freqs) - fc
    h = np.exp(-0.5 * (offset / sigma) ** 2)
    h[np.abs(offset) > fc * geom.frac_bandwidth] = 0.0
    return h


def band_filter(rf: RFFrame, geom: ArrayGeometry) -> RFFrame:
    """Zero-phase band-pass filter matched to the array bandwidth."""
    if rf.sample_rate != geom.sample_rate:
        raise RateMismatchError(
            f"frame sampled at {rf.sample_rate} Hz, array at {geom.sample_rate} Hz"
        )
    n = rf.n_samples
    # linear (not circular) convolution: pad to at least twice the length
    n_fft = 1 << int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(rf.data, n=n_fft, axis=1)
    spectrum *= band_response(np.fft.rfftfreq(n_fft, 1.0 / rf.sample_rate), geom)
    return rf.with_data(np.fft.irfft(spectrum, n=n_fft, axis=1)[:, :n])


def add_noise(rf: RFFrame, snr_db: float, rng: np.random.Generator) -> RFFrame:
    """Add white Gaussian noise at a frame-wide signal-to-noise ratio."""
    power = float(np.mean(np.square(rf.data)))
    if power == 0.0:
        raise ZeroPowerError("cannot set an SNR on a frame with zero signal power")
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    return rf.with_data(rf.data + sigma * rng.standard_normal(rf.data.shape))
