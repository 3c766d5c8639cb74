"""Analytic FLOP model and wall-clock timing of the beamformers."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .beamform import BeamformParams, EnergyMap, Method, reconstruct
from .errors import ConfigError

MIN_REPEATS = 5
CSV_HEADER = "method,pixels,threads,repeats,wall_ms,flops"


@dataclass(frozen=True)
class FlopModel:
    """Inputs of the per-method FLOP estimate.

    Solver iteration counts and the signal-subspace size are not fixed by
    the algorithms, so they are exposed here instead of being guessed.
    """

    method: Method
    n_elements: int
    n_samples: int
    n_pixels: int
    rcb_iters: int = 20
    rlpb_snapshots: int = 128
    rlpb_iters: int = 20
    subspace_dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        for name in ("n_elements", "n_samples", "n_pixels", "rcb_iters",
                     "rlpb_snapshots", "rlpb_iters", "subspace_dim"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


def _tea(n, t) -> int:
    # 4 flops of linear interpolation and 2 of weighted summation per
    # channel sample, then square and accumulate, plus per-channel setup
    return 6 * n * t + 3 * t + 6 * n


def _rcb_core(n, iters) -> int:
    return 26 * n**3 + iters * 6 * n + 4 * n * n


def _covariance(n, t) -> int:
    return n * (n + 1) * t


def flops(model: FlopModel) -> int:
    """Estimated floating-point operations to reconstruct one map."""
    n, t = model.n_elements, model.n_samples
    per_pixel = _tea(n, t)
    m = model.method
    if m in (Method.RCB, Method.EISRCB, Method.DAXRCB):
        per_pixel += _covariance(n, t) + _rcb_core(n, model.rcb_iters)
    if m is Method.EISRCB:
        per_pixel += 4 * n * model.subspace_dim
    if m is Method.DAXRCB:
        half = n // 2
        per_pixel += _rcb_core(half, model.rcb_iters) + _rcb_core(n - half, model.rcb_iters)
        per_pixel += 6 * t
    if m is Method.RLPB:
        ts = model.rlpb_snapshots
        per_pixel += model.rlpb_iters * (2 * ts + 2 * n + 1) * (n + 2)
    return per_pixel * model.n_pixels


@dataclass(frozen=True, eq=False)
class BenchReport:
    method: Method
    pixels: int
    wall_ms: float
    repeats: int
    threads: int
    flops: int = 0
    samples_ms: tuple = ()
    result: EnergyMap | None = field(default=None, repr=False)

    def csv_row(self) -> str:
        return (
            f"{self.method.cli_name},{self.pixels},{self.threads},{self.repeats},"
            f"{self.wall_ms:.3f},{self.flops}"
        )


def _model_for(rf, grid, method, params) -> FlopModel:
    window = params.window
    n_samples = rf.n_samples if window is None else window[1]
    return FlopModel(method, rf.n_channels, n_samples, grid.n_pixels,
                     rlpb_snapshots=min(params.rlpb_max_snapshots, n_samples))


def _check_repeats(repeats):
    if repeats < MIN_REPEATS:
        raise ConfigError(f"need at least {MIN_REPEATS} repeats, got {repeats}")


def _report(method, grid, threads, samples, result, rf, params) -> BenchReport:
    return BenchReport(
        method=method,
        pixels=grid.n_pixels,
        wall_ms=statistics.median(samples),
        repeats=len(samples),
        threads=threads,
        flops=flops(_model_for(rf, grid, method, params)),
        samples_ms=tuple(samples),
        result=result,
    )


def _timed(rf, grid, method, params, threads, geom):
    t0 = time.perf_counter()
    m = reconstruct(rf, grid, method, params, geom=geom, threads=threads)
    return (time.perf_counter() - t0) * 1e3, m


def time_reconstruct(
    rf,
    grid,
    method,
    params: BeamformParams | None = None,
    threads: int = 1,
    repeats: int = MIN_REPEATS,
    geom=None,
) -> BenchReport:
    """Median wall time of ``reconstruct`` over ``repeats`` runs.

    The last map is returned in ``result`` so callers can confirm timing
    did not change the output.
    """
    _check_repeats(repeats)
    method = Method.parse(method)
    params = BeamformParams() if params is None else params
    samples, result = [], None
    for _ in range(repeats):
        ms, result = _timed(rf, grid, method, params, threads, geom)
        samples.append(ms)
    return _report(method, grid, threads, samples, result, rf, params)


def time_methods(
    rf,
    grid,
    methods,
    params: BeamformParams | None = None,
    threads: int = 1,
    repeats: int = MIN_REPEATS,
    geom=None,
) -> dict:
    """Time several methods with repeats interleaved round-robin.

    Interleaving spreads slow drifts of machine load evenly over the
    methods, which matters when two of them cost nearly the same.
    """
    _check_repeats(repeats)
    methods = [Method.parse(m) for m in methods]
    params = BeamformParams() if params is None else params
    samples = {m: [] for m in methods}
    results = {}
    for _ in range(repeats):
        for m in methods:
            ms, results[m] = _timed(rf, grid, m, params, threads, geom)
            samples[m].append(ms)
    return {m: _report(m, grid, threads, samples[m], results[m], rf, params) for m in methods}
