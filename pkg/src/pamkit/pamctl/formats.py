"""Binary RF and energy-map files plus their JSON sidecars.

Both formats are a fixed little-endian header followed by a float32
little-endian payload. RF payloads are channel-major, map payloads are
row-major in z (one row per depth).
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

from ..arrays import ArrayModel, ImagingGrid, Medium
from ..beamform import EnergyMap, Method
from ..cavsim import RFFrame
from ..errors import ConfigError, FormatError, UnsupportedVersionError

RF_MAGIC = b"PAMRF\0\0\0"
MAP_MAGIC = b"PAMMAP\0\0"
VERSION = 1
RF_HEADER = struct.Struct("<8sIIIIddddQ")
MAP_HEADER = struct.Struct("<8sIIII4d")
PAYLOAD = np.dtype("<f4")


def quantize(data) -> np.ndarray:
    """Round to the stored precision, so a written file reads back exactly."""
    return np.asarray(data, dtype=np.float64).astype(PAYLOAD).astype(np.float64)


def _write(path, header: bytes, payload: np.ndarray):
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(payload, dtype=PAYLOAD).tobytes())
    os.replace(tmp, path)


def _read_header(blob: bytes, layout: struct.Struct, magic: bytes, kind: str):
    if len(blob) < len(magic):
        raise FormatError(f"{kind} file too short for its magic", offset=len(blob))
    if blob[: len(magic)] != magic:
        raise FormatError(f"not a {kind} file: bad magic {blob[:len(magic)]!r}", offset=0)
    if len(blob) < layout.size:
        raise FormatError(f"truncated {kind} header", offset=len(blob))
    fields = layout.unpack_from(blob)
    if fields[1] != VERSION:
        raise UnsupportedVersionError(f"{kind} file version {fields[1]}", offset=len(magic))
    return fields


def _payload(blob: bytes, offset: int, count: int, kind: str) -> np.ndarray:
    expected = offset + count * PAYLOAD.itemsize
    if len(blob) != expected:
        where = min(len(blob), expected)
        raise FormatError(
            f"{kind} payload has {len(blob) - offset} bytes, header implies {count * PAYLOAD.itemsize}",
            offset=where,
        )
    return np.frombuffer(blob, dtype=PAYLOAD, count=count, offset=offset).astype(np.float64)


def write_rf(frame: RFFrame, path) -> None:
    """Write a frame; samples are stored as float32 (see ``quantize``)."""
    n_ch, n_s = frame.data.shape
    if n_ch == 0 or n_s == 0:
        raise ConfigError("cannot write an empty RF frame")
    header = RF_HEADER.pack(
        RF_MAGIC,
        VERSION,
        int(frame.array_model),
        n_ch,
        n_s,
        float(frame.sample_rate),
        float(frame.medium.sos),
        float(frame.medium.density),
        float(frame.t_start),
        int(frame.seed),
    )
    _write(path, header, frame.data)


def read_rf(path) -> RFFrame:
    blob = Path(path).read_bytes()
    _, _, model, n_ch, n_s, fs, sos, density, t_start, seed = _read_header(
        blob, RF_HEADER, RF_MAGIC, "RF"
    )
    try:
        model = ArrayModel(model)
    except ValueError:
        raise FormatError(f"unknown array model code {model}", offset=12) from None
    try:
        medium = Medium(sos=sos, density=density)
    except ConfigError as exc:
        raise FormatError(f"invalid medium in header: {exc}", offset=32) from None
    if not fs > 0:
        raise FormatError(f"invalid sample rate {fs}", offset=24)
    data = _payload(blob, RF_HEADER.size, n_ch * n_s, "RF").reshape(n_ch, n_s)
    return RFFrame(data, fs, t_start, model, medium, seed)


def write_map(m: EnergyMap, path) -> None:
    g = m.grid
    if g.nx * g.nz == 0 or m.values.size == 0:
        raise ConfigError("cannot write a zero-size map")
    header = MAP_HEADER.pack(
        MAP_MAGIC, VERSION, int(m.method), g.nx, g.nz,
        float(g.x0), float(g.z0), float(g.dx), float(g.dz),
    )
    _write(path, header, m.values)


def read_map(path) -> EnergyMap:
    blob = Path(path).read_bytes()
    _, _, method, nx, nz, x0, z0, dx, dz = _read_header(blob, MAP_HEADER, MAP_MAGIC, "map")
    try:
        method = Method(method)
    except ValueError:
        raise FormatError(f"unknown method code {method}", offset=12) from None
    try:
        grid = ImagingGrid(x0, z0, nx, nz, dx, dz)
    except ConfigError as exc:
        raise FormatError(f"invalid grid in header: {exc}", offset=16) from None
    values = _payload(blob, MAP_HEADER.size, nx * nz, "map").reshape(nz, nx)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise FormatError("map payload has negative or non-finite values", offset=MAP_HEADER.size)
    return EnergyMap(grid, values, method)


def sidecar_path(path) -> Path:
    return Path(f"{path}.json")


def write_sidecar(path, info: dict) -> None:
    text = json.dumps(info, sort_keys=True, indent=2) + "\n"
    sidecar_path(path).write_text(text)


def read_sidecar(path) -> dict:
    """Metadata stored next to a data file; empty when there is none."""
    p = sidecar_path(path)
    if not p.exists():
        return {}
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed sidecar {p}: {exc.msg}", offset=exc.pos) from None
