"""Command-line experiment runner.

Every subcommand merges built-in defaults, an optional JSON config file and
explicit flags (in increasing priority), writes ``manifest.json`` into the
output directory before computing, and then adds CSV tables, a JSON
summary and SVG figures.  Exit codes: 0 success, 2 bad arguments,
3 capacity exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, plotting, rmt
from .classical import mask_correlation, phase_diagram_scan, write_phase_csv
from .dynamics import STROBOSCOPIC_WINDOW, Window, evolve_state
from .errors import CapacityError, KrylovQfiError, NumericalError
from .experiments import (
    SECTOR_CHOICES,
    default_window,
    growth_fit,
    krylov_report,
    level_spacings,
    prepare_dynamics,
    qfi_evolution,
    scaling_sweep,
)
from .models import DEFAULT_PARAMS, KICK_PERIOD, ModelName, ModelSpec
from .predict import entanglement_depth, universal_qfi
from .spin import MAX_FULL_QUBITS, build_collective_ops
from .wigner import rotation_fidelity_width, wigner_grid

EXIT_OK, EXIT_ARGS, EXIT_CAPACITY, EXIT_NUMERICAL = 0, 2, 3, 4

COMMON_DEFAULTS = {
    "model": "coe",
    "n": 100,
    "seed": 0,
    "out": "results",
    "threads": 1,
    "max_qubits": MAX_FULL_QUBITS,
    "params": {},
}

DEFAULTS = {
    "levels": {
        "n": 400,
        "sector": "auto",
        "bins": rmt.HIST_BINS,
        "hist_range": list(rmt.HIST_RANGE),
        "degree": 10,
        "trim": 0.1,
        "verdict_threshold": rmt.VERDICT_THRESHOLD,
    },
    "qfi-evolve": {"axes": "xyz", "steps": None, "window_start": None, "dt": None, "direction": None},
    "scaling-sweep": {
        "n_list": [20, 40, 60, 80, 100, 150, 200],
        "axis": "z",
        "direction": None,
        "window_start": None,
        "steps": None,
        "dt": None,
    },
    "phase-diagram": {
        "n": 40,
        "a_range": [0.0, 3.0],
        "c_range": [0.0, 15.0],
        "grid": 50,
        "le_iter": 10_000,
        "le_transient": 1_000,
        "le_points": 100,
        "window_start": STROBOSCOPIC_WINDOW.start,
        "steps": STROBOSCOPIC_WINDOW.stop,
        "le_threshold": 0.1,
        "qfi_threshold": 0.8,
    },
    "random-qfi": {
        "k": [3, 11, 101],
        "ensembles": ["COE", "CUE", "CSE"],
        "samples": 10_000,
        "shards": 8,
    },
    "wigner": {
        "times": [0.0, 3.0, 1000.0],
        "n_theta": 64,
        "n_phi": 128,
        "direction": None,
    },
    "krylov-dim": {"direction": None, "tol": 1e-10},
}


# ------------------------------------------------------------------ parsing


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a number")


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--model", choices=[m.value for m in ModelName], default=S)
    p.add_argument("--n", type=int, default=S, help="number of qubits")
    p.add_argument("--param", type=_param, action="append", default=S, metavar="KEY=VALUE",
                   help="model parameter, repeatable")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--threads", type=int, default=S)
    p.add_argument("--max-qubits", type=int, default=S, dest="max_qubits")
    p.add_argument("--config", default=S, help="JSON file with default overrides")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="krylovqfi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="level-spacing statistics")
    _add_common(p)
    p.add_argument("--sector", choices=SECTOR_CHOICES, default=S)
    p.add_argument("--bins", type=int, default=S)
    p.add_argument("--degree", type=int, default=S, help="unfolding polynomial degree")
    p.add_argument("--trim", type=float, default=S, help="fraction trimmed at each edge")

    for name, help_ in (("qfi-evolve", "QFI time series"), ("scaling-sweep", "plateau QFI against N")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        p.add_argument("--steps", type=float, default=S, help="end of the time window")
        p.add_argument("--window-start", type=float, default=S, dest="window_start")
        p.add_argument("--dt", type=float, default=S, help="sampling step")
        p.add_argument("--direction", default=S, help="initial coherent state, e.g. -y")
        if name == "qfi-evolve":
            p.add_argument("--axes", default=S)
        else:
            p.add_argument("--n-list", type=int, nargs="+", default=S, dest="n_list")
            p.add_argument("--axis", choices=list("xyz"), default=S)

    p = sub.add_parser("phase-diagram", help="LE and QFI over the (A, C) plane")
    _add_common(p)
    p.add_argument("--a-range", type=float, nargs=2, default=S, dest="a_range")
    p.add_argument("--c-range", type=float, nargs=2, default=S, dest="c_range")
    p.add_argument("--grid", type=int, default=S)
    p.add_argument("--le-iter", type=int, default=S, dest="le_iter")
    p.add_argument("--le-points", type=int, default=S, dest="le_points")
    p.add_argument("--steps", type=float, default=S)
    p.add_argument("--window-start", type=float, default=S, dest="window_start")

    p = sub.add_parser("random-qfi", help="Monte-Carlo QFI of random states")
    _add_common(p)
    p.add_argument("--k", type=int, nargs="+", default=S, help="Hilbert-space dimensions")
    p.add_argument("--ensembles", nargs="+", choices=["COE", "CUE", "CSE"], default=S)
    p.add_argument("--samples", type=int, default=S)
    p.add_argument("--shards", type=int, default=S)

    p = sub.add_parser("wigner", help="Wigner fields along a trajectory")
    _add_common(p)
    p.add_argument("--times", type=float, nargs="+", default=S)
    p.add_argument("--n-theta", type=int, default=S, dest="n_theta")
    p.add_argument("--n-phi", type=int, default=S, dest="n_phi")
    p.add_argument("--direction", default=S)

    p = sub.add_parser("krylov-dim", help="Krylov dimension of an initial state")
    _add_common(p)
    p.add_argument("--direction", default=S)
    p.add_argument("--tol", type=float, default=S)
    return parser


def _load_config(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_settings(command: str, cli: dict) -> dict:
    """Merge defaults < config file < explicit flags."""
    settings = dict(COMMON_DEFAULTS)
    settings.update(DEFAULTS[command])
    config_path = cli.pop("config", None)
    if config_path is not None:
        config = _load_config(config_path)
        unknown = set(config) - set(settings)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        settings.update(config)
        settings["config"] = str(config_path)
    cli_params = dict(cli.pop("param", []))
    settings.update(cli)
    model = ModelName(settings["model"])
    params = dict(DEFAULT_PARAMS[model])
    params.update(settings.get("params") or {})
    params.update(cli_params)
    settings["params"] = params
    settings["model"] = model.value
    if settings["threads"] < 1:
        raise ValueError("--threads must be at least 1")
    return settings


# ---------------------------------------------------------------- manifest


class Manifest:
    def __init__(self, out: Path, command: str, settings: dict):
        self.path = out / "manifest.json"
        self.data = {
            "command": command,
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "started": datetime.now(timezone.utc).isoformat(),
            "finished": None,
            "status": "running",
            "seed": settings["seed"],
            "kick_period": KICK_PERIOD,
            "settings": settings,
            "outputs": [],
        }
        self.write()

    def add(self, *paths) -> None:
        self.data["outputs"].extend(Path(p).name for p in paths)

    def finish(self, status: str = "ok") -> None:
        self.data["status"] = status
        self.data["finished"] = datetime.now(timezone.utc).isoformat()
        self.write()

    def write(self) -> None:
        with open(self.path, "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True, default=str)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def _write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=float)


def _spec(settings) -> ModelSpec:
    return ModelSpec(ModelName(settings["model"]), int(settings["n"]), settings["params"])


def _window(settings, spec: ModelSpec) -> Window:
    base = default_window(spec)
    stop = settings.get("steps")
    stop = base.stop if stop is None else float(stop)
    if stop <= 0:
        raise ValueError("--steps must be positive")
    start = settings.get("window_start")
    if start is None:
        start = base.start if base.start < stop else 0.1 * stop
    step = settings.get("dt")
    step = base.step if step is None else float(step)
    window = Window(float(start), stop, step)
    settings.update(window_start=window.start, steps=window.stop, dt=window.step)
    return window


# ------------------------------------------------------------- subcommands


def cmd_levels(s, out: Path, manifest: Manifest) -> dict:
    spec = _spec(s)
    sample, sector = level_spacings(spec, s["sector"], s["degree"], s["trim"], s["max_qubits"])
    s["sector"] = sector
    test = rmt.spacing_test(sample, threshold=s["verdict_threshold"])
    verdict = None if test.verdict is None else test.verdict.name
    rows = rmt.spacing_histogram(
        sample, test.verdict or min(test.ks, key=test.ks.get), s["bins"], tuple(s["hist_range"])
    )
    csv_path = out / "spacings.csv"
    rmt.write_histogram_csv(csv_path, rows)
    summary = {
        "n_spacings": len(sample),
        "ks": {e.name: d for e, d in test.ks.items()},
        "verdict": verdict,
        "source": sample.source,
    }
    _write_json(out / "summary.json", summary)
    plotting.spacing_histogram(out / "spacings.svg", rows, f"{sample.source}: {verdict}")
    manifest.add(csv_path, out / "summary.json", out / "spacings.svg")
    return summary


def cmd_qfi_evolve(s, out: Path, manifest: Manifest) -> dict:
    spec = _spec(s)
    setup = prepare_dynamics(spec, s["direction"], s["max_qubits"])
    s["direction"] = setup.direction
    window = _window(s, spec)
    trace = qfi_evolution(setup, s["axes"], window)
    csv_path = out / "qfi.csv"
    trace.to_csv(csv_path)
    fits = {}
    for ax in trace.qfi:
        try:
            f = growth_fit(trace, ax)
            fits[ax] = {"rate": f.rate, "prefactor": f.prefactor, "t_range": list(map(float, f.t_range))}
        except NumericalError as exc:
            fits[ax] = {"error": str(exc)}
    means = trace.means
    summary = {
        "sector": setup.sector,
        "window": list(trace.window),
        "t_star": trace.t_star,
        "t_star_conclusive": trace.t_star_conclusive,
        "mean": means,
        "std": {ax: trace.std(ax) for ax in trace.qfi},
        "prediction": setup.prediction,
        "mean_over_prediction": {ax: v / setup.prediction for ax, v in means.items()},
        "entanglement_depth": {
            ax: entanglement_depth(min(v, spec.n_qubits**2), spec.n_qubits) for ax, v in means.items()
        },
        "growth_fit": fits,
    }
    _write_json(out / "summary.json", summary)
    plotting.qfi_trace(out / "qfi.svg", trace, setup.prediction, f"{spec.model.value} N={spec.n_qubits}")
    manifest.add(csv_path, out / "summary.json", out / "qfi.svg")
    return summary


def cmd_scaling_sweep(s, out: Path, manifest: Manifest) -> dict:
    model = ModelName(s["model"])
    probe = ModelSpec(model, int(s["n_list"][0]), s["params"])
    window = _window(s, probe)
    rows, fit = scaling_sweep(
        model, s["n_list"], s["params"], s["axis"], s["direction"], window, s["threads"],
        s["max_qubits"],
    )
    csv_path = out / "scaling.csv"
    _write_csv(
        csv_path,
        ["N", "qfi_mean", "qfi_std", "prediction", "window_start"],
        [(r.n_qubits, r.qfi_mean, r.qfi_std, r.prediction, r.window_start) for r in rows],
    )
    summary = {"prefactor": fit.prefactor, "exponent": fit.exponent, "axis": s["axis"]}
    _write_json(out / "summary.json", summary)
    plotting.scaling(
        out / "scaling.svg",
        [r.n_qubits for r in rows],
        [r.qfi_mean for r in rows],
        [r.prediction for r in rows],
        fit,
        model.value,
    )
    manifest.add(csv_path, out / "summary.json", out / "scaling.svg")
    return summary


def cmd_phase_diagram(s, out: Path, manifest: Manifest) -> dict:
    if s["grid"] < 2:
        raise ValueError("--grid must be at least 2")
    a_vals = np.linspace(*s["a_range"], s["grid"])
    c_vals = np.linspace(*s["c_range"], s["grid"])
    window = Window(float(s["window_start"]), float(s["steps"]), 1.0)
    cells = phase_diagram_scan(
        a_vals, c_vals, int(s["n"]), window, threads=s["threads"],
        n_iter=s["le_iter"], n_transient=s["le_transient"], n_points=s["le_points"], seed=s["seed"],
    )
    write_phase_csv(out / "phase.csv", cells)
    le = np.array([c.lambda_le for c in cells]).reshape(a_vals.size, c_vals.size)
    qfi = np.array([c.qfi_over_prediction for c in cells]).reshape(a_vals.size, c_vals.size)
    header = ["A\\C"] + [repr(float(c)) for c in c_vals]
    for name, grid in (("lambda_grid.csv", le), ("qfi_grid.csv", qfi)):
        _write_csv(out / name, header, [[float(a)] + [float(v) for v in row] for a, row in zip(a_vals, grid)])
    corr = mask_correlation(cells, s["le_threshold"], s["qfi_threshold"])
    summary = {"mask_correlation": corr, "cells": len(cells)}
    _write_json(out / "summary.json", summary)
    plotting.heatmap(out / "lambda.svg", c_vals, a_vals, le, "C", "A", "Lyapunov exponent")
    plotting.heatmap(out / "qfi.svg", c_vals, a_vals, qfi, "C", "A", "QFI / prediction")
    manifest.add(
        out / "phase.csv", out / "lambda_grid.csv", out / "qfi_grid.csv", out / "summary.json",
        out / "lambda.svg", out / "qfi.svg",
    )
    return summary


def cmd_random_qfi(s, out: Path, manifest: Manifest) -> dict:
    rows = []
    for k in s["k"]:
        if k < 2:
            raise ValueError("dimensions must be at least 2")
        jz = build_collective_ops(int(k) - 1)["z"]
        exact = rmt.rand_qfi_exact(jz)
        exact_real = rmt.rand_qfi_exact_real(jz)
        for name in s["ensembles"]:
            ens = rmt.Ensemble.parse(name)
            seed = [s["seed"], int(k), ens.beta]
            mc = rmt.random_qfi(jz, ens, s["samples"], seed, s["shards"], s["threads"])
            ref = exact_real if ens is rmt.Ensemble.COE else exact
            rows.append(
                (int(k), ens.name, mc.samples, mc.mean, mc.standard_error, exact, exact_real,
                 (mc.mean - ref) / mc.standard_error, universal_qfi(jz).leading_value)
            )
    csv_path = out / "random_qfi.csv"
    _write_csv(
        csv_path,
        ["K", "ensemble", "samples", "mean", "standard_error", "exact_complex", "exact_real",
         "z_score", "universal"],
        rows,
    )
    manifest.add(csv_path)
    return {"rows": len(rows)}


def cmd_wigner(s, out: Path, manifest: Manifest) -> dict:
    spec = _spec(s)
    if not spec.is_floquet and spec.model is not ModelName.LMG:
        raise ValueError("Wigner fields need a collective (symmetric-space) model")
    setup = prepare_dynamics(spec, s["direction"], s["max_qubits"])
    s["direction"] = setup.direction
    times = [float(t) for t in s["times"]]
    states = [(f"t={t:g}", evolve_state(setup.psi0, setup.spectrum, t)) for t in times]
    haar = rmt.sample_random_state(setup.spectrum.dim, "CUE", s["seed"], setup.psi0.basis)
    states.append(("haar", haar))
    summary = {}
    for label, psi in states:
        field = wigner_grid(psi, s["n_theta"], s["n_phi"])
        stem = "wigner_" + label.replace("=", "").replace(".", "p")
        field.to_csv(out / f"{stem}.csv")
        plotting.sphere_field(out / f"{stem}.svg", field, label)
        manifest.add(out / f"{stem}.csv", out / f"{stem}.svg")
        summary[label] = {
            "integral": field.integral(),
            "peak": list(field.argmax()),
            "fidelity_width": {ax: rotation_fidelity_width(psi, ax).angle for ax in "xyz"},
        }
    _write_json(out / "summary.json", summary)
    manifest.add(out / "summary.json")
    return summary


def cmd_krylov_dim(s, out: Path, manifest: Manifest) -> dict:
    spec = _spec(s)
    setup = prepare_dynamics(spec, s["direction"], s["max_qubits"])
    s["direction"] = setup.direction
    report = krylov_report(setup, float(s["tol"]))
    summary = {
        "lanczos": report.lanczos,
        "spectral": report.spectral,
        "hilbert_dimension": report.hilbert_dimension,
        "sector": setup.sector,
    }
    _write_csv(out / "krylov.csv", ["N", "lanczos", "spectral", "hilbert_dimension"],
               [(spec.n_qubits, report.lanczos, report.spectral, report.hilbert_dimension)])
    _write_json(out / "summary.json", summary)
    manifest.add(out / "krylov.csv", out / "summary.json")
    return summary


COMMANDS = {
    "levels": cmd_levels,
    "qfi-evolve": cmd_qfi_evolve,
    "scaling-sweep": cmd_scaling_sweep,
    "phase-diagram": cmd_phase_diagram,
    "random-qfi": cmd_random_qfi,
    "wigner": cmd_wigner,
    "krylov-dim": cmd_krylov_dim,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    manifest = None
    try:
        settings = resolve_settings(command, args)
        out = Path(settings["out"])
        out.mkdir(parents=True, exist_ok=True)
        manifest = Manifest(out, command, settings)
        summary = COMMANDS[command](settings, out, manifest)
        manifest.data["settings"] = settings
        manifest.finish()
    except CapacityError as exc:
        return _fail(manifest, exc, EXIT_CAPACITY)
    except NumericalError as exc:
        return _fail(manifest, exc, EXIT_NUMERICAL)
    except (ValueError, KeyError, OSError, KrylovQfiError) as exc:
        return _fail(manifest, exc, EXIT_ARGS)
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return EXIT_OK


def _fail(manifest, exc, code) -> int:
    if manifest is not None:
        manifest.data["error"] = f"{type(exc).__name__}: {exc}"
        manifest.finish("failed")
    print(f"error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
