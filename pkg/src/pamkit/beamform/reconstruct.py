"""Pixel-wise energy-map reconstruction.

Pixels are processed in fixed chunks, each a slice of one grid row. The
chunk layout and the trimmed stack length of every row depend only on the
grid and the frame, so a map is bitwise identical whatever the thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from ..arrays import ArrayGeometry, ImagingGrid, build_array, element_distances
from ..errors import ConfigError, InfeasibleEpsilonError, NumericalError, PamError, PixelError
from .stack import (
    channel_sum_batch,
    covariance_batch,
    energy_batch,
    pad_traces,
    resolve_window,
    stack_batch,
)
from .types import BeamformParams, EnergyMap, Method
from .weights import (
    dax_batch,
    eisrcb_mask,
    eisrcb_project,
    normalized_steering,
    rcb_batch,
    rlpb_snapshots,
    rlpb_solve,
)

CHUNK_ELEMENTS = 1 << 22


class _Job:
    """Everything a worker needs; read-only once built."""

    def __init__(self, rf, grid, geom, method, params):
        self.data = np.ascontiguousarray(rf.data, dtype=np.float64)
        self.fs = rf.sample_rate
        self.dt = 1.0 / rf.sample_rate
        self.sos = rf.medium.sos
        self.prefactor = rf.medium.energy_prefactor
        self.method = method
        self.params = params
        self.start, self.length = resolve_window(params.window, rf.n_samples)
        self.abar = normalized_steering(params, geom.n_elements)
        self.geom = geom
        self.grid = grid
        self.padded = pad_traces(self.data, self.length)
        n = geom.n_elements
        self.chunk = max(1, min(grid.nx, CHUNK_ELEMENTS // (n * self.length)))

    def row_distances(self, iz: int) -> np.ndarray:
        pts = np.column_stack([self.grid.x, np.full(self.grid.nx, self.grid.z[iz])])
        return element_distances(pts, self.geom)

    def trimmed_length(self, dist) -> int:
        # Samples past this index read beyond the trace on every channel.
        last = self.data.shape[1] - self.start - float(np.min(dist)) * self.fs / self.sos
        return int(min(self.length, max(1, math.ceil(last))))

    def values(self, dist, n_keep) -> np.ndarray:
        method, params, k = self.method, self.params, self.prefactor
        if method is Method.TEA:
            n = dist.shape[1]
            y = channel_sum_batch(
                self.data, self.fs, dist, self.sos, self.start, n_keep, self.padded
            )
            return energy_batch(y, self.dt, k) / (n * n)
        s = stack_batch(self.data, self.fs, dist, self.sos, self.start, n_keep, self.padded)
        if method is Method.RLPB:
            out = np.empty(s.shape[0])
            for b in range(s.shape[0]):
                S = rlpb_snapshots(s[b], self.length, params.rlpb_max_snapshots)
                w, _ = rlpb_solve(S, self.abar, params.tau)
                out[b] = energy_batch(w @ s[b], self.dt, k)
            return out
        R = covariance_batch(s, self.dt)
        sol = rcb_batch(R, self.abar, params.eps)
        if method is Method.RCB:
            return k * sol.power()
        if method is Method.EISRCB:
            w = eisrcb_project(sol.w, sol.U, eisrcb_mask(sol, params.delta))
            return k * np.einsum("bi,bij,bj->b", w, R, w)
        rho = dax_batch(R, s.sum(axis=-1), self.length, self.dt, self.abar, params)
        return k * sol.power() * rho

    def run(self, iz, i0, i1, dist, n_keep):
        try:
            v = self.values(dist[i0:i1], n_keep)
            if not np.all(np.isfinite(v)):
                raise NumericalError("non-finite pixel energy")
            return v
        except (ConfigError, PixelError):
            raise
        except (PamError, ArithmeticError, np.linalg.LinAlgError) as exc:
            ix = self._culprit(iz, i0, i1, dist, n_keep)
            raise PixelError(float(self.grid.x[ix]), float(self.grid.z[iz]), exc) from exc

    def _culprit(self, iz, i0, i1, dist, n_keep) -> int:
        """First pixel of a failed chunk that also fails on its own."""
        for ix in range(i0, i1):
            try:
                if np.all(np.isfinite(self.values(dist[ix : ix + 1], n_keep))):
                    continue
            except Exception:  # noqa: BLE001
                pass
            return ix
        return i0


def reconstruct(
    rf,
    grid: ImagingGrid,
    method,
    params: BeamformParams | None = None,
    geom: ArrayGeometry | None = None,
    threads: int = 1,
) -> EnergyMap:
    """Energy map of ``rf`` on ``grid`` for one beamforming method.

    Args:
        rf: Recorded frame.
        grid: Imaging grid (all pixels must lie below the array).
        method: ``Method`` or its name.
        params: Beamformer settings; defaults to single-source values.
        geom: Array geometry; built from ``rf.array_model`` when omitted.
        threads: Worker threads. BLAS is pinned to one thread per worker.

    Raises:
        InfeasibleEpsilonError: ``eps`` not below ``||a||^2``.
        PixelError: A pixel's weight solver failed; carries its coordinates.
    """
    method = Method.parse(method)
    params = BeamformParams() if params is None else params
    geom = build_array(rf.array_model) if geom is None else geom
    if rf.n_channels != geom.n_elements:
        raise ConfigError(f"frame has {rf.n_channels} channels, array {geom.n_elements}")
    if threads < 1:
        raise ConfigError(f"threads must be at least 1, got {threads}")
    start, length = resolve_window(params.window, rf.n_samples)
    if start + length > rf.n_samples:
        raise ConfigError(f"window {(start, length)} exceeds the {rf.n_samples}-sample trace")
    if method in (Method.RCB, Method.EISRCB, Method.DAXRCB):
        n = geom.n_elements
        if not params.eps < n:
            raise InfeasibleEpsilonError(f"eps={params.eps} must be below N={n}")
        if length < n:
            warnings.warn(f"window of {length} samples is shorter than {n} channels", stacklevel=2)

    job = _Job(rf, grid, geom, method, params)
    tasks = []
    for iz in range(grid.nz):
        dist = job.row_distances(iz)
        n_keep = job.trimmed_length(dist)
        for i0 in range(0, grid.nx, job.chunk):
            tasks.append((iz, i0, min(grid.nx, i0 + job.chunk), dist, n_keep))

    values = np.empty(grid.shape)
    with threadpool_limits(limits=1):
        if threads == 1:
            results = [job.run(*t) for t in tasks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda t: job.run(*t), tasks))
    for (iz, i0, i1, _, _), v in zip(tasks, results):
        values[iz, i0:i1] = v
    np.maximum(values, 0.0, out=values)
    return EnergyMap(grid, values, method)
