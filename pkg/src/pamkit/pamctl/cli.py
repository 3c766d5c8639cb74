"""``pam`` command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data-format error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

import numpy as np

from .. import bench, metrics
from ..arrays import ArrayModel, Medium, build_array, build_grid
from ..beamform import BeamformParams, EnergyMap, Method, reconstruct
from ..cavsim import draw_sim_spec, simulate_acquisition
from ..errors import ConfigError, FormatError, NumericalError
from . import formats
from .config import load_config
from .render import render_map

EXIT_OK, EXIT_CONFIG, EXIT_FORMAT, EXIT_NUMERICAL = 0, 2, 3, 4
METRIC_HEADER = (
    "acquisition_id,method,a3db_mm2,isnr_db,centroid_x_mm,centroid_z_mm,dev_lat_wl,dev_ax_wl"
)
COMPARE_HEADER = "method,n,a3db_mean_mm2,a3db_std_mm2,isnr_mean_db,isnr_std_db"


def _write_lines(path, header, rows):
    Path(path).write_text("\n".join([header, *rows]) + "\n")


def _expand(pattern) -> list[str]:
    paths = sorted(glob.glob(pattern))
    if not paths:
        raise ConfigError(f"no files match {pattern!r}")
    return paths


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6f}"


# -- simulate -----------------------------------------------------------------


def _draw(cfg, seed, k):
    sim, med = cfg["simulation"], cfg["medium"]
    return draw_sim_spec(
        seed,
        k,
        n_clouds=sim["n_clouds"],
        model=sim["model"],
        snr_db=sim["snr_db"],
        excitation_freq=sim["excitation_freq"],
        n_cycles=sim["n_cycles"],
        sos=med["sos"],
        density=med["density"],
        separation=sim["separation"],
        angle_deg=sim["angle_deg"],
    )


def simulate_to(cfg, seed, k, geom):
    """One acquisition with samples rounded to the stored precision."""
    spec = _draw(cfg, seed, k)
    acq = simulate_acquisition(spec, geom, k, n_samples=cfg["simulation"]["n_samples"])
    info = {
        "acquisition_id": k,
        "array_model": geom.model_id.label,
        "seed": seed,
        "n_clouds": spec.n_clouds,
        "centers_m": acq.centers.tolist(),
        "sos": spec.medium.sos,
        "excitation_freq": spec.excitation_freq,
        "n_cycles": spec.n_cycles,
        "emission_model": spec.model.value,
        "snr_db": spec.snr_db,
    }
    return acq.frame.with_data(formats.quantize(acq.frame.data)), info


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    seed = cfg["simulation"]["seed"] if args.seed is None else args.seed
    if args.count < 1:
        raise ConfigError("--count must be at least 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geom = build_array(cfg["array"]["model"])
    for k in range(args.count):
        frame, info = simulate_to(cfg, seed, k, geom)
        path = out / f"acq_{k:04d}.rf"
        formats.write_rf(frame, path)
        formats.write_sidecar(path, info)
    return EXIT_OK


# -- beamform -----------------------------------------------------------------


def _params(cfg, args, n_sources) -> BeamformParams:
    bf = cfg["beamform"]
    sources = getattr(args, "sources", None) or bf["sources"] or n_sources or 1
    eps = getattr(args, "eps", None)
    eps = bf["eps"] if eps is None else eps
    kwargs = dict(
        delta=bf["delta"] if getattr(args, "delta", None) is None else args.delta,
        tau=bf["tau"] if getattr(args, "tau", None) is None else args.tau,
        dax_floor=bf["dax_floor"],
        rlpb_max_snapshots=bf["rlpb_max_snapshots"],
    )
    if eps is not None:
        kwargs["eps"] = eps
    start, length = bf["window_start"], bf["window_length"]
    window = getattr(args, "window", None)
    if window is not None:
        start, length = window
    if length is not None:
        kwargs["window"] = (start or 0, length)
    elif start is not None:
        raise ConfigError("window_start needs window_length")
    return BeamformParams.for_sources(sources, **kwargs)


def beamform_file(path, method, decim, cfg, args, threads) -> tuple[EnergyMap, dict]:
    frame = formats.read_rf(path)
    info = formats.read_sidecar(path)
    params = _params(cfg, args, info.get("n_clouds"))
    grid = build_grid(frame.array_model, decim)
    m = reconstruct(frame, grid, method, params, threads=threads)
    m = EnergyMap(m.grid, formats.quantize(m.values), m.method)
    info = dict(info, method=m.method.cli_name, source=Path(path).name,
                array_model=frame.array_model.label, sos=frame.medium.sos)
    return m, info


def cmd_beamform(args) -> int:
    cfg = load_config(args.config)
    method = Method.parse(args.method or cfg["beamform"]["method"])
    decim = args.grid_decim or cfg["beamform"]["grid_decim"]
    threads = args.threads or cfg["beamform"]["threads"]
    m, info = beamform_file(args.inp, method, decim, cfg, args, threads)
    formats.write_map(m, args.out)
    formats.write_sidecar(args.out, info)
    return EXIT_OK


# -- metrics ------------------------------------------------------------------


def _wavelength(info, args):
    if args.wavelength is not None:
        return args.wavelength
    if not args.wavelength_from_array or "array_model" not in info:
        return None
    geom = build_array(ArrayModel.parse(info["array_model"]))
    return geom.wavelength(Medium(sos=info.get("sos", Medium().sos)))


def metric_row(acq_id, m, info, union, wavelength) -> str:
    stats = metrics.map_stats(m, union)
    dev_lat = dev_ax = None
    centers = info.get("centers_m")
    if centers and wavelength:
        truth = np.mean(np.asarray(centers, dtype=np.float64), axis=0)
        dev_lat, dev_ax, _ = metrics.deviations(stats.centroid, truth)
        dev_lat, dev_ax = dev_lat / wavelength, dev_ax / wavelength
    cx, cz = stats.centroid
    return ",".join([
        str(acq_id), m.method.cli_name, _fmt(stats.a3db_area), _fmt(stats.isnr_db),
        _fmt(cx * 1e3), _fmt(cz * 1e3), _fmt(dev_lat), _fmt(dev_ax),
    ])


def cmd_metrics(args) -> int:
    loaded = []
    for path in _expand(args.maps):
        info = formats.read_sidecar(path)
        loaded.append((info.get("acquisition_id", Path(path).stem), formats.read_map(path), info))
    unions = {}
    if args.union:
        groups = {}
        for acq_id, m, _ in loaded:
            groups.setdefault(acq_id, []).append(m)
        for acq_id, maps in groups.items():
            shapes = {mm.values.shape for mm in maps}
            if len(shapes) != 1:
                raise ConfigError(f"maps of acquisition {acq_id} are on different grids")
            unions[acq_id] = metrics.union_mask(maps)
    rows = [
        metric_row(acq_id, m, info, unions.get(acq_id), _wavelength(info, args))
        for acq_id, m, info in loaded
    ]
    _write_lines(args.out, METRIC_HEADER, rows)
    return EXIT_OK


# -- compare ------------------------------------------------------------------


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    methods = [Method.parse(s) for s in args.methods.split(",") if s.strip()]
    if not methods:
        raise ConfigError("--methods is empty")
    decim = args.grid_decim or cfg["beamform"]["grid_decim"]
    threads = args.threads or cfg["beamform"]["threads"]
    areas = {m: [] for m in methods}
    isnrs = {m: [] for m in methods}
    for path in _expand(args.rf):
        maps = [beamform_file(path, m, decim, cfg, args, threads)[0] for m in methods]
        union = metrics.union_mask(maps)
        for mm in maps:
            areas[mm.method].append(metrics.area_3db(mm))
            isnrs[mm.method].append(metrics.isnr(mm, union))

    def mean_std(xs):
        xs = np.asarray(xs)
        return float(np.mean(xs)), float(np.std(xs, ddof=1)) if xs.size > 1 else 0.0

    rows = []
    for m in methods:
        a_mean, a_std = mean_std(areas[m])
        i_mean, i_std = mean_std(isnrs[m])
        rows.append(f"{m.cli_name},{len(areas[m])},{_fmt(a_mean)},{_fmt(a_std)},{_fmt(i_mean)},{_fmt(i_std)}")
    _write_lines(args.out, COMPARE_HEADER, rows)
    return EXIT_OK


# -- bench / render -----------------------------------------------------------


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    if args.inp:
        frame = formats.read_rf(args.inp)
        n_sources = formats.read_sidecar(args.inp).get("n_clouds")
    else:
        geom = build_array(cfg["array"]["model"])
        seed = cfg["simulation"]["seed"] if args.seed is None else args.seed
        frame, info = simulate_to(cfg, seed, 0, geom)
        n_sources = info["n_clouds"]
    method = Method.parse(args.method or cfg["beamform"]["method"])
    grid = build_grid(frame.array_model, args.grid_decim or cfg["beamform"]["grid_decim"])
    report = bench.time_reconstruct(
        frame,
        grid,
        method,
        _params(cfg, args, n_sources),
        threads=args.threads or cfg["bench"]["threads"],
        repeats=args.repeats or cfg["bench"]["repeats"],
    )
    _write_lines(args.out, bench.CSV_HEADER, [report.csv_row()])
    return EXIT_OK


def cmd_render(args) -> int:
    render_map(formats.read_map(args.map), args.dyn_range, args.out)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def _add_params(p):
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--sources", type=int, choices=(1, 2))
    p.add_argument("--window", type=int, nargs=2, metavar=("START", "LENGTH"))
    p.add_argument("--threads", type=int)
    p.add_argument("--config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pam", description="Passive acoustic mapping toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate seeded RF acquisitions")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("beamform", help="reconstruct one energy map")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--method")
    p.add_argument("--grid-decim", type=int)
    p.add_argument("--out", required=True)
    _add_params(p)
    p.set_defaults(func=cmd_beamform)

    p = sub.add_parser("metrics", help="tabulate map metrics as CSV")
    p.add_argument("--maps", required=True)
    p.add_argument("--union", action="store_true")
    p.add_argument("--wavelength-from-array", action="store_true")
    p.add_argument("--wavelength", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="mean and std of metrics per method")
    p.add_argument("--rf", required=True)
    p.add_argument("--methods", required=True)
    p.add_argument("--grid-decim", type=int)
    p.add_argument("--out", required=True)
    _add_params(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time one beamformer")
    p.add_argument("--method")
    p.add_argument("--grid-decim", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--in", dest="inp")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    _add_params(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="write a dB-compressed PGM image of a map")
    p.add_argument("--map", required=True)
    p.add_argument("--dyn-range", type=float, default=40.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        code, message = EXIT_CONFIG, str(exc)
    except FormatError as exc:
        code, message = EXIT_FORMAT, str(exc)
    except NumericalError as exc:
        code, message = EXIT_NUMERICAL, str(exc)
    except OSError as exc:
        code = EXIT_CONFIG
        message = f"{exc.filename}: {exc.strerror}" if exc.filename else str(exc)
    print(f"pam: error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
