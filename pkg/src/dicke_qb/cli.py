"""Command-line frontend: qb <command> --config <file> [--out <dir>] [overrides].

Commands
--------
trace        time series of E, P, Sigma, <J_z>/(N/2) -> trace.csv
extrema      refined E_max/P_max/Sigma_bar for one point -> extrema.csv
sweep        2-D parameter sweep of one quantity -> sweep.csv (long form)
phase        ground-state inversion sweep; adds critical.csv on (g, eta) axes
scaling      P_max power-law fits over N -> scaling_<label>.csv, alphas.csv
convergence  photon-cutoff audit -> convergence.csv
reproduce    canned benchmark-table comparisons -> report.md

Configuration is a single JSON document; command-line flags override
config fields which override defaults.  Every CSV has a JSON sidecar
carrying the full parameter set, units and warnings needed to re-run it.
Numbers are written in shortest round-trip form, so identical configs
produce byte-identical files.

Exit codes: 0 success, 1 usage error, 2 environment/resource error,
3 partial sweep failure, 4 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Any

import numpy as np

from . import __version__, reproduce, svg
from .analysis import (
    QUANTITIES,
    SWEEPABLE,
    critical_eta,
    cutoff_convergence,
    fit_power_scaling,
    power_scaling,
    sweep,
)
from .dynamics import charging_trace, find_extrema
from .model import ChargingProtocol, ModelParams

UNITS = {
    "energy": "omega_a",
    "time": "1/omega_a",
    "power": "omega_a^2",
    "power_normalized": "g*omega_a^2",
    "sz_ratio": "dimensionless",
}


class ConfigError(ValueError):
    """Malformed configuration or command usage; maps to exit code 1."""


# ---------------------------------------------------------------------------
# config plumbing

_PARAM_KEYS = {"n_tls", "g", "eta", "omega_drive", "omega_a", "omega_c", "cutoff_factor"}
_PROTOCOL_KEYS = {"search_horizon", "coarse_points", "refine_tolerance"}
_TOP_KEYS = {
    "params",
    "protocol",
    "axes",
    "quantity",
    "scaling",
    "factors",
    "tables",
    "formats",
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _merge_params(cfg: dict, args: argparse.Namespace) -> ModelParams:
    merged: dict[str, Any] = dict(cfg.get("params", {}))
    unknown = set(merged) - _PARAM_KEYS
    if unknown:
        raise ConfigError(f"unknown params keys: {sorted(unknown)}")
    for key in _PARAM_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if "n_tls" not in merged:
        raise ConfigError("params.n_tls is required (config or --n-tls)")
    if "g" not in merged:
        raise ConfigError("params.g is required (config or --g)")
    merged.setdefault("cutoff_factor", 4)
    merged["n_tls"] = int(merged["n_tls"])
    merged["cutoff_factor"] = int(merged["cutoff_factor"])
    try:
        return ModelParams(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid params: {exc}") from exc


def _merge_protocol(cfg: dict, args: argparse.Namespace) -> ChargingProtocol:
    merged: dict[str, Any] = dict(cfg.get("protocol", {}))
    unknown = set(merged) - _PROTOCOL_KEYS
    if unknown:
        raise ConfigError(f"unknown protocol keys: {sorted(unknown)}")
    if getattr(args, "horizon", None) is not None:
        merged["search_horizon"] = args.horizon
    if getattr(args, "coarse_points", None) is not None:
        merged["coarse_points"] = int(args.coarse_points)
    if getattr(args, "refine_tolerance", None) is not None:
        merged["refine_tolerance"] = args.refine_tolerance
    try:
        return ChargingProtocol(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid protocol: {exc}") from exc


def _axis_values(spec: dict) -> np.ndarray:
    if "values" in spec:
        vals = np.asarray(spec["values"], dtype=float)
    elif {"start", "stop", "num"} <= set(spec):
        vals = np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
    elif {"start", "stop", "step"} <= set(spec):
        step = float(spec["step"])
        if step <= 0:
            raise ConfigError("axis step must be positive")
        vals = np.arange(float(spec["start"]), float(spec["stop"]) + 0.5 * step, step)
    else:
        raise ConfigError("axis needs 'values', or 'start'/'stop' with 'num' or 'step'")
    if vals.size == 0 or not np.all(np.isfinite(vals)):
        raise ConfigError("axis values must be non-empty and finite")
    return vals


def _merge_axes(cfg: dict) -> tuple[tuple[str, np.ndarray], tuple[str, np.ndarray]]:
    axes = cfg.get("axes")
    if not isinstance(axes, dict) or "axis1" not in axes or "axis2" not in axes:
        raise ConfigError("sweep/phase needs config axes.axis1 and axes.axis2")
    out = []
    for key in ("axis1", "axis2"):
        spec = axes[key]
        name = spec.get("name")
        if name not in SWEEPABLE:
            raise ConfigError(f"{key}.name must be one of {SWEEPABLE}")
        out.append((name, _axis_values(spec)))
    return out[0], out[1]


def _formats(cfg: dict, args: argparse.Namespace) -> set[str]:
    raw = args.formats if args.formats is not None else cfg.get("formats", ["csv", "json"])
    if isinstance(raw, str):
        raw = [part.strip() for part in raw.split(",") if part.strip()]
    formats = set(raw)
    unknown = formats - {"csv", "json", "svg"}
    if unknown:
        raise ConfigError(f"unknown formats: {sorted(unknown)}; pick from csv,json,svg")
    return formats | {"csv", "json"}  # CSV + sidecar are the contract


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, int(args.threads))
    env = os.environ.get("QB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"QB_THREADS must be an integer, got {env!r}") from exc
    return 1


# ---------------------------------------------------------------------------
# deterministic writers

def _num(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isfinite(v) and v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    text = str(value)
    if any(ch in text for ch in ',"\n'):  # RFC 4180 quoting for label fields
        text = '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_num(v) for v in row) + "\n")


def _sidecar(path, command: str, params: ModelParams | None, protocol: ChargingProtocol | None, extra: dict) -> None:
    doc: dict[str, Any] = {
        "artifact": "dicke-qb",
        "version": __version__,
        "command": command,
        "units": UNITS,
    }
    if params is not None:
        doc["params"] = dataclasses.asdict(params)
        if not params.resonant:
            doc.setdefault("warnings", []).append(
                "off-resonance omega_a != omega_c: accepted but unvalidated"
            )
    if protocol is not None:
        doc["protocol"] = dataclasses.asdict(protocol)
    for key, value in extra.items():
        if key == "warnings":
            doc.setdefault("warnings", []).extend(value)
        else:
            doc[key] = value
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# command handlers

def cmd_trace(cfg: dict, args: argparse.Namespace, out: str) -> int:
    params = _merge_params(cfg, args)
    protocol = _merge_protocol(cfg, args)
    formats = _formats(cfg, args)
    tr = charging_trace(params, protocol)
    write_csv(
        os.path.join(out, "trace.csv"),
        ["t", "energy", "power", "fluctuation", "sz_ratio"],
        zip(tr.times, tr.energy, tr.power, tr.fluctuation, tr.sz),
    )
    _sidecar(
        os.path.join(out, "trace.json"),
        "trace",
        params,
        protocol,
        {"search_horizon_used": tr.search_horizon, "rows": len(tr.times)},
    )
    if "svg" in formats:
        svg.line_plot(
            os.path.join(out, "trace.svg"),
            tr.times,
            {"E(t)": tr.energy, "P(t)": tr.power, "Sigma(t)": tr.fluctuation},
            f"charging trace N={params.n_tls} g={params.g} eta={params.eta} drive={params.omega_drive}",
            "t [1/omega_a]",
            "[omega_a units]",
        )
    return 0


def cmd_extrema(cfg: dict, args: argparse.Namespace, out: str) -> int:
    params = _merge_params(cfg, args)
    protocol = _merge_protocol(cfg, args)
    report = find_extrema(params, protocol)
    write_csv(
        os.path.join(out, "extrema.csv"),
        ["e_max", "t_e", "p_max", "t_p", "sigma_bar", "p_max_normalized"],
        [(report.e_max, report.t_e, report.p_max, report.t_p, report.sigma_bar,
          report.p_max / (params.g * params.omega_a**2) if params.g > 0 else float("nan"))],
    )
    warnings = ["stored-energy maximum on the search boundary"] if report.horizon_warning else []
    _sidecar(
        os.path.join(out, "extrema.json"),
        "extrema",
        params,
        protocol,
        {"search_horizon_used": report.search_horizon, "warnings": warnings},
    )
    return 0


def _run_grid(cfg: dict, args: argparse.Namespace, out: str, command: str, quantity: str) -> int:
    params = _merge_params(cfg, args)
    protocol = _merge_protocol(cfg, args)
    formats = _formats(cfg, args)
    axis1, axis2 = _merge_axes(cfg)
    grid = sweep(params, axis1, axis2, quantity, protocol, threads=_threads(args))

    rows = [
        (grid.axis1_values[i], grid.axis2_values[k], grid.values[i, k])
        for i in range(len(grid.axis1_values))
        for k in range(len(grid.axis2_values))
    ]
    write_csv(os.path.join(out, "sweep.csv"), [grid.axis1_name, grid.axis2_name, quantity], rows)

    warnings = []
    if grid.cell_errors:
        warnings.append(f"{len(grid.cell_errors)} cell(s) failed")
    if grid.horizon_warnings:
        warnings.append(f"{len(grid.horizon_warnings)} cell(s) hit the search boundary")
    if grid.degenerate_cells:
        warnings.append(f"{len(grid.degenerate_cells)} cell(s) have a near-degenerate ground state")
    _sidecar(
        os.path.join(out, "sweep.json"),
        command,
        params,
        protocol,
        {
            "quantity": quantity,
            "axis1": {"name": grid.axis1_name, "values": list(map(float, grid.axis1_values))},
            "axis2": {"name": grid.axis2_name, "values": list(map(float, grid.axis2_values))},
            "failed_cells": {f"{i},{k}": msg for (i, k), msg in sorted(grid.cell_errors.items())},
            "degenerate_cells": sorted(grid.degenerate_cells),
            "horizon_warning_cells": sorted(grid.horizon_warnings),
            "warnings": warnings,
        },
    )

    if command == "phase":
        names = {grid.axis1_name, grid.axis2_name}
        if names == {"g", "eta"}:
            g_values = grid.axis1_values if grid.axis1_name == "g" else grid.axis2_values
            write_csv(
                os.path.join(out, "critical.csv"),
                ["g", "eta_c"],
                [(g, critical_eta(g, params.n_tls, params.omega_a, params.omega_c)) for g in g_values],
            )

    if "svg" in formats:
        svg.heatmap(
            os.path.join(out, "sweep.svg"),
            grid.axis2_values,
            grid.axis1_values,
            grid.values,
            f"{quantity} over ({grid.axis1_name}, {grid.axis2_name}), N={params.n_tls}",
            grid.axis2_name,
            grid.axis1_name,
        )
    return 3 if grid.cell_errors else 0


def cmd_sweep(cfg: dict, args: argparse.Namespace, out: str) -> int:
    quantity = args.quantity or cfg.get("quantity")
    if quantity not in QUANTITIES:
        raise ConfigError(f"sweep needs quantity, one of {QUANTITIES}")
    return _run_grid(cfg, args, out, "sweep", quantity)


def cmd_phase(cfg: dict, args: argparse.Namespace, out: str) -> int:
    return _run_grid(cfg, args, out, "phase", "gs_sz")


def cmd_scaling(cfg: dict, args: argparse.Namespace, out: str) -> int:
    params = _merge_params(cfg, args)
    protocol = _merge_protocol(cfg, args)
    formats = _formats(cfg, args)
    spec = cfg.get("scaling", {})
    sets = spec.get("sets")
    if not sets:
        raise ConfigError("scaling needs config scaling.sets (list of parameter sets)")
    n_min = int(spec.get("n_min", 1))
    n_max = int(spec.get("n_max", 30))
    if not 1 <= n_min < n_max:
        raise ConfigError("scaling needs 1 <= n_min < n_max")
    n_values = list(range(n_min, n_max + 1))

    summary = []
    for entry in sets:
        label = entry.get("label")
        if not label:
            raise ConfigError("every scaling set needs a label")
        if "synthetic" in entry:  # test hook: inject an exact power law
            alpha = float(entry["synthetic"]["alpha"])
            beta = float(entry["synthetic"]["beta"])
            fit = fit_power_scaling([(n, beta * n**alpha) for n in n_values])
            resolved: dict[str, Any] = {"synthetic": entry["synthetic"]}
        else:
            overrides = {k: v for k, v in entry.items() if k != "label"}
            unknown = set(overrides) - _PARAM_KEYS
            if unknown:
                raise ConfigError(f"scaling set {label!r}: unknown keys {sorted(unknown)}")
            point = dataclasses.replace(params, **overrides)
            fit = power_scaling(point, n_values, protocol, threads=_threads(args))
            resolved = dataclasses.asdict(point)
        write_csv(
            os.path.join(out, f"scaling_{label}.csv"),
            ["N", "p_max_normalized"],
            zip(fit.n_values, fit.p_max_values),
        )
        summary.append((label, fit, resolved))

    write_csv(
        os.path.join(out, "alphas.csv"),
        ["label", "alpha", "beta", "residual"],
        [(label, fit.alpha, fit.beta, fit.residual) for label, fit, _ in summary],
    )
    _sidecar(
        os.path.join(out, "scaling.json"),
        "scaling",
        params,
        protocol,
        {
            "n_min": n_min,
            "n_max": n_max,
            "sets": [
                {"label": label, "alpha": fit.alpha, "beta": fit.beta,
                 "residual": fit.residual, "params": resolved}
                for label, fit, resolved in summary
            ],
        },
    )
    if "svg" in formats:
        first_label, first_fit, _ = summary[0]
        svg.line_plot(
            os.path.join(out, "scaling.svg"),
            np.log10(first_fit.n_values),
            {
                first_label: np.log10(first_fit.p_max_values),
                "fit": first_fit.alpha * np.log10(first_fit.n_values) + np.log10(first_fit.beta),
            },
            f"log10 P_max vs log10 N ({first_label})",
            "log10 N",
            "log10 P_max [g*omega_a^2]",
        )
    return 0


def cmd_convergence(cfg: dict, args: argparse.Namespace, out: str) -> int:
    params = _merge_params(cfg, args)
    protocol = _merge_protocol(cfg, args)
    factors = cfg.get("factors", [3, 4, 5])
    rows = cutoff_convergence(params, factors, protocol)
    diffs = [float("nan")] + [abs(b.e_max - a.e_max) for a, b in zip(rows, rows[1:])]
    write_csv(
        os.path.join(out, "convergence.csv"),
        ["factor", "e_max", "p_max", "abs_delta_e_max"],
        [(r.factor, r.e_max, r.p_max, d) for r, d in zip(rows, diffs)],
    )
    _sidecar(
        os.path.join(out, "convergence.json"),
        "convergence",
        params,
        protocol,
        {"factors": [r.factor for r in rows]},
    )
    return 0


def cmd_reproduce(cfg: dict, args: argparse.Namespace, out: str) -> int:
    tables = cfg.get("tables", reproduce.ALL_TABLES)
    if args.tables is not None:
        tables = [t.strip() for t in args.tables.split(",") if t.strip()]
    unknown = set(tables) - set(reproduce.ALL_TABLES)
    if unknown:
        raise ConfigError(f"unknown reproduce tables {sorted(unknown)}; pick from {reproduce.ALL_TABLES}")
    result = reproduce.run(out, tables=tables, threads=_threads(args))
    print(result.summary_line)
    return 0 if result.all_pass else 4


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qb",
        description="Driven extended Dicke quantum battery simulator (exact diagonalization).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "trace": cmd_trace,
        "extrema": cmd_extrema,
        "sweep": cmd_sweep,
        "phase": cmd_phase,
        "scaling": cmd_scaling,
        "convergence": cmd_convergence,
        "reproduce": cmd_reproduce,
    }
    for name, handler in handlers.items():
        p = sub.add_parser(name)
        p.set_defaults(handler=handler)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--threads", type=int, help="parallel cells/points (or QB_THREADS)")
        p.add_argument("--formats", help="comma list from csv,json,svg")
        p.add_argument("--n-tls", dest="n_tls", type=int)
        p.add_argument("--g", dest="g", type=float)
        p.add_argument("--eta", dest="eta", type=float)
        p.add_argument("--omega-drive", dest="omega_drive", type=float)
        p.add_argument("--omega-a", dest="omega_a", type=float)
        p.add_argument("--omega-c", dest="omega_c", type=float)
        p.add_argument("--cutoff-factor", dest="cutoff_factor", type=int)
        p.add_argument("--horizon", dest="horizon", type=float)
        p.add_argument("--coarse-points", dest="coarse_points", type=int)
        p.add_argument("--refine-tolerance", dest="refine_tolerance", type=float)
        if name == "sweep":
            p.add_argument("--quantity", choices=QUANTITIES)
        else:
            p.set_defaults(quantity=None)
        if name == "reproduce":
            p.add_argument("--tables", help="comma list from " + ",".join(reproduce.ALL_TABLES))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        cfg = _load_config(args.config)
        out = args.out
        os.makedirs(out, exist_ok=True)
        probe = os.path.join(out, ".qb-writable")
        with open(probe, "w", encoding="utf-8") as fh:
            fh.write("")
        os.remove(probe)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2

    try:
        return args.handler(cfg, args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MemoryError as exc:
        print(f"error: out of memory: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        if "memory guard" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
