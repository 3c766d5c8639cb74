"""Command-line tooling, configuration and file formats."""

from .config import load_config, parse_config
from .formats import read_map, read_rf, read_sidecar, write_map, write_rf, write_sidecar
from .render import render_map, to_gray

__all__ = [
    "load_config",
    "parse_config",
    "read_map",
    "read_rf",
    "read_sidecar",
    "render_map",
    "to_gray",
    "write_map",
    "write_rf",
    "write_sidecar",
]
