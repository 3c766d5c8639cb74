"""Experiment configuration: ``[section]`` headers with ``key = value`` lines.

Every key is declared in ``SCHEMA`` together with its parser; unknown
sections or keys are rejected so that a typo cannot silently fall back to
a default.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from ..arrays import ArrayModel
from ..beamform import Method
from ..cavsim import EmissionModel
from ..errors import ConfigError


def _optional(parse):
    def inner(text):
        return None if text.strip().lower() in ("", "none") else parse(text)

    return inner


def _snr(text):
    """A number, ``none`` (noise-free) or ``lo, hi`` for a uniform draw."""
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 2:
        lo, hi = float(parts[0]), float(parts[1])
        if lo > hi:
            raise ValueError(f"empty SNR range {lo}..{hi}")
        return (lo, hi)
    return float(text)


def _int(text):
    return int(text.strip())


SCHEMA = {
    "array": {"model": ArrayModel.parse},
    "medium": {"sos": _optional(float), "density": float},
    "simulation": {
        "seed": _int,
        "n_clouds": _int,
        "model": EmissionModel.parse,
        "snr_db": _optional(_snr),
        "excitation_freq": _optional(float),
        "n_cycles": _optional(_int),
        "separation": _optional(float),
        "angle_deg": _optional(float),
        "n_samples": _int,
    },
    "beamform": {
        "method": Method.parse,
        "grid_decim": _int,
        "eps": _optional(float),
        "delta": float,
        "tau": float,
        "dax_floor": float,
        "rlpb_max_snapshots": _int,
        "window_start": _optional(_int),
        "window_length": _optional(_int),
        "sources": _optional(_int),
        "threads": _int,
    },
    "bench": {"repeats": _int, "threads": _int},
}

DEFAULTS = {
    "array": {"model": ArrayModel.P4_1},
    "medium": {"sos": None, "density": 1000.0},
    "simulation": {
        "seed": 0,
        "n_clouds": 1,
        "model": EmissionModel.VOKURKA,
        "snr_db": None,
        "excitation_freq": None,
        "n_cycles": None,
        "separation": None,
        "angle_deg": None,
        "n_samples": 2048,
    },
    "beamform": {
        "method": Method.EISRCB,
        "grid_decim": 4,
        "eps": None,
        "delta": 0.5,
        "tau": 0.1,
        "dax_floor": 0.001,
        "rlpb_max_snapshots": 128,
        "window_start": None,
        "window_length": None,
        "sources": None,
        "threads": 1,
    },
    "bench": {"repeats": 5, "threads": 1},
}


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into ``{section: {key: value}}`` with defaults filled in."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__none__"
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    out = {section: dict(values) for section, values in DEFAULTS.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in parser.items(section):
            parse = SCHEMA[section].get(key)
            if parse is None:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            try:
                out[section][key] = parse(raw)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{source}: bad value for {section}.{key} = {raw!r}: {exc}") from None
    return out


def load_config(path=None) -> dict:
    if path is None:
        return parse_config("")
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    return parse_config(text, source=str(p))
