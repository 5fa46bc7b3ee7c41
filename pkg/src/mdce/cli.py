"""Command-line orchestration: config parsing, experiment dispatch, data export.

Every run writes its outputs plus a manifest JSON into the output directory.
Files are written atomically (write-then-rename) and all numeric output uses a
fixed 17-significant-digit format, so reruns with identical configs produce
bit-identical CSV numbers.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (fourier_spectrum, photon_flux, snr, steady_state_value,
                       transition_rate)
from .dynamics import dressed_jump_operators, evolve, ground_state_density
from .fockspace import Dims, build_operators
from .model import DriveConfig, SystemParams, build_static_hamiltonian
from .perturbation import TargetPair, perturbation_report
from .presets import (EXPERIMENTS, ExperimentConfig, Integration, ScanSpec,
                      SweepSpec, preset, preset_names)
from .spectrum import find_avoided_crossing, scan_levels

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """A configuration field is missing or invalid."""


# ----------------------------------------------------------------------------
# config (de)serialization


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = {
        "experiment": cfg.experiment,
        "params": asdict(cfg.params),
        "dims": {"n_cav": cfg.dims.n_cav, "n_mech": cfg.dims.n_mech},
        "drive": asdict(cfg.drive),
        "integration": asdict(cfg.integration),
        "pairs": [[p.n, p.m] for p in cfg.pairs],
        "checkpoint": cfg.checkpoint,
    }
    if cfg.scan is not None:
        out["scan"] = asdict(cfg.scan)
    if cfg.sweep is not None:
        out["sweep"] = {"axis": cfg.sweep.axis, "values": list(cfg.sweep.values),
                        "inner": cfg.sweep.inner}
    return out


def _build(section: str, factory, payload: dict):
    try:
        return factory(**payload)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {section!r} section: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    """Validate a plain dict (parsed JSON) into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - {"experiment", "params", "dims", "drive", "integration",
                           "pairs", "scan", "sweep", "checkpoint"}
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    for required in ("experiment", "params"):
        if required not in data:
            raise ConfigError(f"missing required config field {required!r}")

    params = _build("params", SystemParams, data["params"])
    kwargs = {
        "experiment": data["experiment"],
        "params": params,
        "checkpoint": bool(data.get("checkpoint", False)),
    }
    if "dims" in data:
        kwargs["dims"] = _build("dims", Dims, data["dims"])
    if "drive" in data:
        kwargs["drive"] = _build("drive", DriveConfig, data["drive"])
    if "integration" in data:
        kwargs["integration"] = _build("integration", Integration, data["integration"])
    if "pairs" in data:
        try:
            kwargs["pairs"] = tuple(TargetPair(int(n), int(m)) for n, m in data["pairs"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid 'pairs' section: {exc}") from exc
    if "scan" in data:
        kwargs["scan"] = _build("scan", ScanSpec, data["scan"])
    if "sweep" in data:
        sweep = dict(data["sweep"])
        if "values" in sweep:
            sweep["values"] = tuple(float(v) for v in sweep["values"])
        kwargs["sweep"] = _build("sweep", SweepSpec, sweep)
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


# ----------------------------------------------------------------------------
# atomic, deterministic writers


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{float(value):.17g}"


def write_csv(path: Path, header: list, rows) -> Path:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_json(path: Path, payload: dict) -> Path:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


# ----------------------------------------------------------------------------
# experiment implementations


@dataclass
class RunManifest:
    """What a run did: config snapshot, code version, timing, checks, outputs."""

    experiment: str
    config: dict
    code_version: str
    wall_time_s: float
    convergence_checks: list
    outputs: list

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "code_version": self.code_version,
            "wall_time_s": self.wall_time_s,
            "convergence_checks": self.convergence_checks,
            "outputs": self.outputs,
        }


def _run_trajectory(cfg: ExperimentConfig, dims: Dims | None = None,
                    dt: float | None = None):
    dims = dims or cfg.dims
    dt = dt or cfg.integration.dt
    ops = build_operators(dims)
    h = build_static_hamiltonian(cfg.params, ops)
    diss = dressed_jump_operators(h, ops, cfg.params)
    rho0 = ground_state_density(ops)
    return evolve(rho0, cfg.integration.t_end, dt, h, cfg.drive, diss, ops,
                  store_every=cfg.integration.store_every)


def _trajectory_rows(traj):
    return zip(traj.times, traj.n_qubit, traj.n_cav, traj.n_mech, traj.trace_err)


TRAJECTORY_HEADER = ["t", "n_qubit", "n_cav", "n_mech", "trace_err"]


def _exp_evolve(cfg: ExperimentConfig, out: Path, tag: str = "") -> list:
    traj = _run_trajectory(cfg)
    files = [write_csv(out / f"trajectory{tag}.csv", TRAJECTORY_HEADER, _trajectory_rows(traj))]
    if cfg.checkpoint:
        state_path = out / f"rho_final{tag}.npy"
        np.save(state_path, traj.rho_final)
        files.append(state_path)
    return files


def _exp_fft(cfg: ExperimentConfig, out: Path) -> list:
    traj = _run_trajectory(cfg)
    spec = fourier_spectrum(traj.n_cav, traj.dt_sample)
    peak_freqs, peak_mags = spec.peaks()
    files = [
        write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, _trajectory_rows(traj)),
        write_csv(out / "spectrum_fft.csv", ["freq", "magnitude"],
                  zip(spec.freqs, spec.magnitude)),
        write_json(out / "summary.json", {
            "bin_width": spec.bin_width,
            "peaks_angular": list(peak_freqs),
            "peaks_rate": list(transition_rate(peak_freqs)),
            "peak_magnitudes": list(peak_mags),
        }),
    ]
    return files


REFERENCE_LINEWIDTH = 2.0 * math.pi * 2e6    # rad/s, typical microwave cavity


def _exp_steady(cfg: ExperimentConfig, out: Path) -> list:
    traj = _run_trajectory(cfg)
    results = {name: steady_state_value(traj, name) for name in ("n_qubit", "n_cav", "n_mech")}
    summary = {
        name: {"value": r.value, "drift": r.drift, "steady": r.steady, "window": list(r.window)}
        for name, r in results.items()
    }
    flux = photon_flux(results["n_cav"].value, REFERENCE_LINEWIDTH)
    return [
        write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, _trajectory_rows(traj)),
        write_json(out / "summary.json", {
            "steady_state": summary,
            "flux_at_reference_linewidth": flux,
            "reference_linewidth_rad_per_s": REFERENCE_LINEWIDTH,
        }),
    ]


def _exp_perturb(cfg: ExperimentConfig, out: Path) -> list:
    lines = []
    reports = []
    for pair in cfg.pairs:
        rep = perturbation_report(pair, cfg.params)
        reports.append(rep)
        lines.append(f"pair (n={pair.n}, m={pair.m}): "
                     f"{pair.state_e} <-> {pair.state_g}")
        lines.append(f"  coupling closed form   : {_fmt(rep.coupling_closed)}")
        lines.append(f"  coupling enumeration   : {_fmt(rep.coupling_generic)}")
        lines.append(f"  shift of {str(pair.state_g):7s}     : {_fmt(rep.shift_g)}")
        lines.append(f"  shift of {str(pair.state_e):7s}     : {_fmt(rep.shift_e)}")
        lines.append(f"  resonance offset       : {_fmt(rep.offset)}")
        lines.append(f"  resonant omega_a       : {_fmt(rep.resonant_omega_a)}")
        lines.append("  enumeration paths:")
        for label, contribution in rep.paths:
            lines.append(f"    via {str(label):8s}: {_fmt(contribution)}")
        lines.append("")
    report_path = out / "perturb_report.txt"
    _atomic_write(report_path, "\n".join(lines))
    summary = write_json(out / "summary.json", {
        "reports": [
            {
                "pair": [r.pair.n, r.pair.m],
                "coupling_closed": r.coupling_closed,
                "coupling_generic": r.coupling_generic,
                "shift_g": r.shift_g,
                "shift_e": r.shift_e,
                "offset": r.offset,
                "resonant_omega_a": r.resonant_omega_a,
                "offset_identity_error": r.offset_identity_error,
            }
            for r in reports
        ],
    })
    return [report_path, summary]


def _exp_spectrum(cfg: ExperimentConfig, out: Path) -> list:
    scan = scan_levels(cfg.params, (cfg.scan.omega_a_min, cfg.scan.omega_a_max),
                       cfg.scan.points, cfg.pairs, cfg.dims)
    header = ["omega_a"]
    header += [f"E_{k}" for k in range(scan.levels.shape[1])]
    for lbl in scan.labels:
        tag = f"{lbl.j}{lbl.n}{lbl.m}"
        header += [f"track_{tag}_level", f"track_{tag}_overlap", f"track_{tag}_ambiguous"]
    rows = []
    for p, wa in enumerate(scan.omega_a_grid):
        row = [wa, *scan.levels[p]]
        for l in range(len(scan.labels)):
            k = scan.tracked_index[p, l]
            row += [k, scan.overlaps[p, l, k], scan.ambiguous[p, l]]
        rows.append(row)
    return [write_csv(out / "spectrum_levels.csv", header, rows)]


def _exp_crossing(cfg: ExperimentConfig, out: Path, tag: str = "") -> list:
    rows = []
    for pair in cfg.pairs:
        res = find_avoided_crossing(cfg.params, pair, cfg.dims)
        rows.append([pair.n, pair.m, res.omega_a_star, res.gap, res.predicted_gap,
                     res.gap / 2.0, (cfg.params.omega_c - cfg.params.omega_m) - res.omega_a_star])
    header = ["n", "m", "omega_a_star", "gap", "predicted_gap", "half_gap", "offset_numeric"]
    return [write_csv(out / f"crossing{tag}.csv", header, rows)]


def _exp_snr(cfg: ExperimentConfig, out: Path, tag: str = "") -> list:
    if cfg.drive.kind != "continuous" or cfg.drive.amplitude <= 0:
        raise ConfigError("the snr experiment requires a continuous drive with amplitude > 0")
    result = snr(cfg.params, cfg.params.omega_m, cfg.drive.amplitude,
                 dims=cfg.dims, t_end=cfg.integration.t_end, dt=cfg.integration.dt,
                 store_every=cfg.integration.store_every)
    payload = {
        "omega_m": result.omega_m,
        "omega_a": result.omega_a,
        "n_both": result.n_both,
        "n_atom_only": result.n_atom_only,
        "n_signal": result.n_signal,
        "eta": result.eta,
        "eta_raw": result.eta_raw,
        "noise_floor": result.noise_floor,
        "flux_at_reference_linewidth": photon_flux(result.n_both, REFERENCE_LINEWIDTH),
        "reference_linewidth_rad_per_s": REFERENCE_LINEWIDTH,
    }
    return [write_json(out / f"snr{tag}.json", payload)]


def _sweep_point_config(cfg: ExperimentConfig, value: float) -> ExperimentConfig:
    axis = cfg.sweep.axis
    if axis == "omega_m":
        params = replace(cfg.params, omega_m=value)
        drive = replace(cfg.drive, freq_mech=value) if cfg.drive.kind != "off" else cfg.drive
        return replace(cfg, params=params, drive=drive)
    if axis == "lam":
        return replace(cfg, params=replace(cfg.params, lam=value))
    if axis == "sigma":
        return replace(cfg, drive=replace(cfg.drive, sigma=value))
    if axis == "loss":
        return replace(cfg, params=replace(cfg.params, kappa=value, eta=value, gamma=value))
    raise ConfigError(f"unhandled sweep axis {axis!r}")


def _run_sweep_point(args):
    cfg, value, out_dir, index = args
    out = Path(out_dir)
    point_cfg = _sweep_point_config(cfg, value)
    tag = f"_{cfg.sweep.axis}_{index:02d}"
    inner = cfg.sweep.inner
    if inner == "evolve":
        files = _exp_evolve(point_cfg, out, tag=tag)
        summary = {"value": value}
    elif inner == "crossing":
        files = _exp_crossing(point_cfg, out, tag=tag)
        summary = {"value": value}
    elif inner == "snr":
        files = _exp_snr(point_cfg, out, tag=tag)
        with open(files[0], encoding="utf-8") as fh:
            summary = {"value": value, **json.load(fh)}
        summary.pop("schema_version", None)
    else:  # pragma: no cover - SweepSpec already validates
        raise ConfigError(f"unhandled sweep inner {inner!r}")
    return [str(f) for f in files], summary


def _exp_sweep(cfg: ExperimentConfig, out: Path, jobs: int) -> list:
    tasks = [(cfg, value, str(out), i) for i, value in enumerate(cfg.sweep.values)]
    if jobs > 1:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(_run_sweep_point, tasks)
    else:
        results = [_run_sweep_point(task) for task in tasks]

    files = [Path(f) for listing, _ in results for f in listing]
    summaries = [summary for _, summary in results]
    files.append(write_json(out / "sweep_summary.json",
                            {"axis": cfg.sweep.axis, "inner": cfg.sweep.inner,
                             "points": summaries}))
    if cfg.sweep.inner == "snr":
        header = ["omega_m", "omega_a", "n_both", "n_atom_only", "n_signal", "eta", "eta_raw"]
        rows = [[s["value"], s["omega_a"], s["n_both"], s["n_atom_only"], s["n_signal"],
                 s["eta"], s["eta_raw"]] for s in summaries]
        files.append(write_csv(out / "sweep.csv", header, rows))
    else:
        files.append(write_csv(out / "sweep.csv", [cfg.sweep.axis],
                               [[s["value"]] for s in summaries]))
    return files


# ----------------------------------------------------------------------------
# convergence checks (--verify)


def _relative_change(base: float, other: float) -> float:
    scale = max(abs(base), abs(other), 1e-300)
    return abs(other - base) / scale


def _verify_dynamics(cfg: ExperimentConfig) -> list:
    checks = []
    base = _run_trajectory(cfg)
    halved = _run_trajectory(cfg, dt=cfg.integration.dt / 2.0)
    change = _relative_change(base.n_cav[-1], halved.n_cav[-1])
    checks.append({"check": "dt_halving", "quantity": "n_cav(t_end)",
                   "base": base.n_cav[-1], "perturbed": halved.n_cav[-1],
                   "rel_change": change, "threshold": 1e-4, "passed": bool(change < 1e-4)})

    bumped_dims = Dims(cfg.dims.n_cav + 2, cfg.dims.n_mech + 2)
    bumped = _run_trajectory(cfg, dims=bumped_dims)
    if cfg.drive.kind == "continuous":
        q_base = steady_state_value(base, "n_cav").value
        q_bump = steady_state_value(bumped, "n_cav").value
        quantity = "steady n_cav"
    else:
        q_base, q_bump, quantity = base.n_cav[-1], bumped.n_cav[-1], "n_cav(t_end)"
    change = _relative_change(q_base, q_bump)
    checks.append({"check": "truncation_bump", "quantity": quantity,
                   "base": q_base, "perturbed": q_bump,
                   "rel_change": change, "threshold": 0.02, "passed": bool(change < 0.02)})
    return checks


def _verify_static(cfg: ExperimentConfig) -> list:
    checks = []
    bumped_dims = Dims(cfg.dims.n_cav + 2, cfg.dims.n_mech + 2)
    for pair in cfg.pairs:
        base = find_avoided_crossing(cfg.params, pair, cfg.dims)
        bumped = find_avoided_crossing(cfg.params, pair, bumped_dims)
        change = _relative_change(base.gap, bumped.gap)
        checks.append({"check": "truncation_bump", "quantity": f"gap pair ({pair.n},{pair.m})",
                       "base": base.gap, "perturbed": bumped.gap,
                       "rel_change": change, "threshold": 1e-4,
                       "passed": bool(change < 1e-4)})
    return checks


def run_convergence_checks(cfg: ExperimentConfig) -> list:
    if cfg.experiment in ("evolve", "fft", "steady"):
        return _verify_dynamics(cfg)
    if cfg.experiment in ("crossing", "spectrum"):
        return _verify_static(cfg)
    if cfg.experiment == "sweep" and cfg.sweep.inner in ("evolve", "snr"):
        point = _sweep_point_config(cfg, cfg.sweep.values[0])
        if cfg.sweep.inner == "snr":
            point = replace(point, drive=replace(point.drive, kind="continuous",
                                                 amplitude=12.0,
                                                 gamma_scale=point.params.gamma,
                                                 freq_mech=point.params.omega_m,
                                                 freq_atom=point.params.omega_a))
        return _verify_dynamics(point)
    if cfg.experiment == "sweep":
        return _verify_static(_sweep_point_config(cfg, cfg.sweep.values[0]))
    return []


# ----------------------------------------------------------------------------
# dispatch


def run(cfg: ExperimentConfig, out_dir, jobs: int = 1, verify: bool = False) -> RunManifest:
    """Execute one experiment, write its outputs and manifest, return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()

    if cfg.experiment == "evolve":
        files = _exp_evolve(cfg, out)
    elif cfg.experiment == "fft":
        files = _exp_fft(cfg, out)
    elif cfg.experiment == "steady":
        files = _exp_steady(cfg, out)
    elif cfg.experiment == "perturb":
        files = _exp_perturb(cfg, out)
    elif cfg.experiment == "spectrum":
        files = _exp_spectrum(cfg, out)
    elif cfg.experiment == "crossing":
        files = _exp_crossing(cfg, out)
    elif cfg.experiment == "snr":
        files = _exp_snr(cfg, out)
    else:
        files = _exp_sweep(cfg, out, jobs)

    checks = run_convergence_checks(cfg) if verify else []
    manifest = RunManifest(
        experiment=cfg.experiment,
        config=config_to_dict(cfg),
        code_version=__version__,
        wall_time_s=time.perf_counter() - start,
        convergence_checks=checks,
        outputs=[str(Path(f).name) for f in files],
    )
    write_json(out / "manifest.json", manifest.to_dict())
    if verify and not all(c["passed"] for c in checks):
        failed = [c for c in checks if not c["passed"]]
        raise RuntimeError(f"convergence checks failed: {failed}")
    return manifest


# ----------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--config", type=str, help="JSON config file")
    parser.add_argument("--out", type=str, default="out", help="output directory")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="parallel workers for sweeps")
    parser.add_argument("--verify", action="store_true",
                        help="run dt-halving / truncation-bump convergence checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdce",
        description="Simulate mechanically induced photon generation in a "
                    "qubit-cavity-mechanics system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("perturb", "spectrum", "crossing", "evolve", "fft", "steady",
                 "snr", "sweep"):
        p = sub.add_parser(name, help=f"run a {name} experiment from a config file")
        _add_common(p)
        if name == "perturb":
            p.add_argument("--pair", type=int, nargs=2, metavar=("N", "M"),
                           help="target pair indices (overrides config)")

    p = sub.add_parser("preset", help="run a named reference experiment")
    p.add_argument("name", choices=list(preset_names()))
    p.add_argument("--show", action="store_true",
                   help="print the preset config as JSON instead of running")
    _add_common(p)
    return parser


def _config_for(args) -> ExperimentConfig:
    if args.command == "preset":
        return preset(args.name)
    if args.config:
        cfg = load_config(args.config)
        if cfg.experiment != args.command:
            raise ConfigError(
                f"config declares experiment {cfg.experiment!r} but the "
                f"{args.command!r} subcommand was invoked"
            )
    else:
        if args.command != "perturb":
            raise ConfigError(f"the {args.command!r} subcommand requires --config")
        from .presets import resonant_params
        cfg = ExperimentConfig(experiment="perturb", params=resonant_params())
    if args.command == "perturb" and getattr(args, "pair", None):
        cfg = replace(cfg, pairs=(TargetPair(*args.pair),))
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_for(args)
        if args.command == "preset" and args.show:
            print(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True))
            return 0
        manifest = run(cfg, args.out, jobs=args.jobs, verify=args.verify)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"{cfg.experiment}: wrote {', '.join(manifest.outputs)} to {args.out} "
          f"in {manifest.wall_time_s:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
