"""Canned benchmark reproductions: bundled reference tables vs this implementation.

Each table runs a frozen configuration (documented below) and juxtaposes
the reference values with computed ones in report.md.  The
search horizons for tables 1 and 2 mirror the per-panel timescales the
reference data was read from (stored energy keeps producing larger
recurrences on longer windows, so the window is part of the benchmark
definition; see README "Reproduction notes").

Gates follow the acceptance tolerances:

* table1 / table2: E(t_E) and Sigma_bar within +-0.05 omega_a, all cells.
* table3: alpha and beta within +-0.05 (beta in g*omega_a^2 units).
* table4: alpha within +-0.05; the (drive=0, g=0.1) cell accepts the
  union band [1.51, 1.67] covering the reference's two inconsistent
  printings of that same physical point.
* table5: alpha within +-0.05 for the drive=0.5 and 1.0 rows; the 0.1 row
  is reported without gating (flagged anomalous upstream).
* phase: the eta of the steepest ground-state inversion jump within one
  grid step (0.2) of the analytic critical line, N=10.
* cutoff: |e_max(factor 5) - e_max(factor 4)| <= 1e-2 omega_a.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import critical_eta, cutoff_convergence, ground_state_sz, power_scaling
from .dynamics import find_extrema
from .model import ChargingProtocol, ModelParams

ALL_TABLES = ("table1", "table2", "table3", "table4", "table5", "phase", "cutoff")

N_TLS = 10
G_COLUMNS = (0.1, 0.5, 2.0)

# (g, eta) -> (E(t_E), Sigma_bar), N=10, drive=0, window 10/omega_a
TABLE1 = {
    (0.1, -2.0): (1.473, 2.013), (0.5, -2.0): (6.662, 3.468), (2.0, -2.0): (6.992, 3.533),
    (0.1, 0.0): (7.931, 1.391), (0.5, 0.0): (6.768, 3.473), (2.0, 0.0): (7.000, 3.528),
    (0.1, 2.0): (5.899, 2.525), (0.5, 2.0): (6.709, 3.488), (2.0, 2.0): (6.995, 3.530),
}

# (g, drive) -> (E(t_E), Sigma_bar), N=10, eta=0, window 20/omega_a
TABLE2 = {
    (0.1, 0.0): (7.931, 1.391), (0.5, 0.0): (6.768, 3.473), (2.0, 0.0): (7.000, 3.528),
    (0.1, 0.5): (4.917, 2.944), (0.5, 0.5): (6.451, 3.421), (2.0, 0.5): (6.978, 3.522),
    (0.1, 2.0): (8.424, 1.443), (0.5, 2.0): (5.437, 3.443), (2.0, 2.0): (6.667, 3.486),
}

# (eta, g) -> (alpha, beta), drive=0, N in [1, 30]
TABLE3 = {
    (-3.0, 0.1): (1.87, 0.38), (-3.0, 0.5): (1.56, 0.85), (-3.0, 2.0): (1.47, 0.97),
    (0.0, 0.1): (1.62, 0.73), (0.0, 0.5): (1.50, 0.93), (0.0, 2.0): (1.46, 0.98),
    (1.5, 0.1): (1.68, 0.70), (1.5, 0.5): (1.50, 0.92), (1.5, 2.0): (1.46, 0.98),
    (3.0, 0.1): (1.62, 0.73), (3.0, 0.5): (1.50, 0.93), (3.0, 2.0): (1.46, 0.98),
    (6.0, 0.1): (1.88, 0.36), (6.0, 0.5): (1.56, 0.84), (6.0, 2.0): (1.47, 0.97),
}

# (drive, g) -> (alpha, beta), eta=0, N in [1, 30]
TABLE4 = {
    (0.0, 0.1): (1.56, 0.78), (0.0, 0.5): (1.50, 0.93), (0.0, 2.0): (1.46, 0.98),
    (0.1, 0.1): (1.58, 0.76), (0.1, 0.5): (1.50, 0.93), (0.1, 2.0): (1.46, 0.98),
    (0.5, 0.1): (1.19, 1.38), (0.5, 0.5): (1.49, 0.94), (0.5, 2.0): (1.46, 0.98),
    (2.0, 0.1): (1.00, 3.17), (2.0, 0.5): (1.22, 1.27), (2.0, 2.0): (1.46, 0.98),
    (5.0, 0.1): (1.00, 4.76), (5.0, 0.5): (1.00, 2.15), (5.0, 2.0): (1.36, 1.10),
}

# (drive, g) -> (alpha, beta), eta=1.5, N in [1, 30]
TABLE5 = {
    (0.1, 0.1): (1.60, 0.38), (0.1, 0.5): (1.18, 0.85), (0.1, 2.0): (1.00, 0.97),
    (0.5, 0.1): (1.50, 0.46), (0.5, 0.5): (1.49, 0.90), (0.5, 2.0): (1.42, 0.97),
    (1.0, 0.1): (1.46, 0.73), (1.0, 0.5): (1.46, 0.93), (1.0, 2.0): (1.46, 0.98),
}
TABLE5_GATED_ROWS = (0.5, 1.0)

TABLE1_PROTOCOL = ChargingProtocol(search_horizon=10.0)
TABLE2_PROTOCOL = ChargingProtocol(search_horizon=20.0)
SCALING_N = tuple(range(1, 31))

PHASE_G = (0.05, 0.1, 0.15, 0.2)
PHASE_ETA_STEP = 0.2
PHASE_ETA_RANGE = (-10.0, 10.0)

CUTOFF_SETS = ((0.5, 0.0, 0.0), (2.0, 0.0, 0.0), (0.1, 6.0, 0.0), (0.1, 0.0, 5.0))
CUTOFF_TOL = 1e-2

ENERGY_TOL = 0.05
ALPHA_TOL = 0.05
BETA_TOL = 0.05
ALPHA_UNION_BAND = (1.51, 1.67)  # (drive=0, g=0.1): reference prints 1.56 and 1.62


@dataclass(frozen=True)
class Check:
    """One compared quantity: reference vs computed, optionally gated."""

    label: str
    reference: float
    computed: float
    tolerance: float
    gated: bool = True
    band: tuple[float, float] | None = None

    @property
    def delta(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def passed(self) -> bool:
        if self.band is not None:
            return self.band[0] <= self.computed <= self.band[1]
        return self.delta <= self.tolerance

    @property
    def verdict(self) -> str:
        if not self.gated:
            return "report-only"
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class TableResult:
    name: str
    title: str
    checks: list[Check]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.gated)


@dataclass(frozen=True)
class ReproduceResult:
    tables: list[TableResult]
    report_path: str

    @property
    def all_pass(self) -> bool:
        return all(t.all_pass for t in self.tables)

    @property
    def summary_line(self) -> str:
        failed = [t.name for t in self.tables if not t.all_pass]
        if not failed:
            return f"reproduce: all {len(self.tables)} table(s) PASS"
        return f"reproduce: FAIL in {', '.join(failed)} (see report.md)"


def _params(g: float, eta: float = 0.0, drive: float = 0.0, n_tls: int = N_TLS) -> ModelParams:
    return ModelParams(n_tls=n_tls, g=g, eta=eta, omega_drive=drive)


def reproduce_table1(threads: int = 1) -> TableResult:
    checks = []
    for (g, eta), (e_ref, s_ref) in sorted(TABLE1.items()):
        report = find_extrema(_params(g, eta=eta), TABLE1_PROTOCOL)
        tag = f"g={g} eta={eta}"
        checks.append(Check(f"{tag}: E(t_E)", e_ref, report.e_max, ENERGY_TOL))
        checks.append(Check(f"{tag}: Sigma_bar", s_ref, report.sigma_bar, ENERGY_TOL))
    return TableResult("table1", "Stored energy and fluctuation vs (g, eta), N=10, no drive", checks)


def reproduce_table2(threads: int = 1) -> TableResult:
    checks = []
    for (g, drive), (e_ref, s_ref) in sorted(TABLE2.items()):
        report = find_extrema(_params(g, drive=drive), TABLE2_PROTOCOL)
        tag = f"g={g} drive={drive}"
        checks.append(Check(f"{tag}: E(t_E)", e_ref, report.e_max, ENERGY_TOL))
        checks.append(Check(f"{tag}: Sigma_bar", s_ref, report.sigma_bar, ENERGY_TOL))
    return TableResult("table2", "Stored energy and fluctuation vs (g, drive), N=10, eta=0", checks)


class _FitCache:
    """Shared power-law fits: table4's drive=0 row is table3's eta=0 row."""

    def __init__(self, threads: int = 1):
        self.threads = threads
        self._fits: dict[tuple[float, float, float], object] = {}

    def fit(self, g: float, eta: float, drive: float):
        key = (g, eta, drive)
        if key not in self._fits:
            self._fits[key] = power_scaling(
                _params(g, eta=eta, drive=drive), SCALING_N, threads=self.threads
            )
        return self._fits[key]


def _scaling_table(name: str, title: str, cells: dict, cache: _FitCache, *,
                   eta_fixed: float | None, gate_beta: bool,
                   gated_rows: tuple | None = None,
                   union_band_cell: tuple | None = None) -> TableResult:
    checks = []
    for (row, g), (a_ref, b_ref) in sorted(cells.items()):
        eta = eta_fixed if eta_fixed is not None else row
        drive = row if eta_fixed is not None else 0.0
        fit = cache.fit(g, eta, drive)
        tag = f"{'drive' if eta_fixed is not None else 'eta'}={row} g={g}"
        gated = gated_rows is None or row in gated_rows
        band = ALPHA_UNION_BAND if union_band_cell == (row, g) else None
        checks.append(Check(f"{tag}: alpha", a_ref, fit.alpha, ALPHA_TOL, gated=gated, band=band))
        checks.append(Check(f"{tag}: beta", b_ref, fit.beta, BETA_TOL, gated=gate_beta and gated))
    return TableResult(name, title, checks)


def reproduce_table3(threads: int = 1, cache: _FitCache | None = None) -> TableResult:
    cache = cache or _FitCache(threads)
    return _scaling_table(
        "table3",
        "Power scaling P_max = beta * N^alpha vs (eta, g), no drive, N in [1, 30]",
        TABLE3, cache, eta_fixed=None, gate_beta=True,
    )


def reproduce_table4(threads: int = 1, cache: _FitCache | None = None) -> TableResult:
    cache = cache or _FitCache(threads)
    return _scaling_table(
        "table4",
        "Power scaling vs (drive, g), eta=0, N in [1, 30]",
        TABLE4, cache, eta_fixed=0.0, gate_beta=False,
        union_band_cell=(0.0, 0.1),
    )


def reproduce_table5(threads: int = 1, cache: _FitCache | None = None) -> TableResult:
    cache = cache or _FitCache(threads)
    return _scaling_table(
        "table5",
        "Power scaling vs (drive, g), eta=1.5, N in [1, 30]",
        TABLE5, cache, eta_fixed=1.5, gate_beta=False,
        gated_rows=TABLE5_GATED_ROWS,
    )


def phase_jump_eta(g: float, n_tls: int = N_TLS,
                   eta_range: tuple[float, float] = PHASE_ETA_RANGE,
                   step: float = PHASE_ETA_STEP) -> float:
    """Midpoint eta of the largest adjacent jump in |<J_z>/(N/2)| of the ground state."""
    etas = np.arange(eta_range[0], eta_range[1] + 0.5 * step, step)
    ratios = np.array([abs(ground_state_sz(_params(g, eta=eta, n_tls=n_tls)).ratio) for eta in etas])
    jumps = np.abs(np.diff(ratios))
    k = int(np.argmax(jumps))
    return float(0.5 * (etas[k] + etas[k + 1]))


def reproduce_phase(threads: int = 1) -> TableResult:
    checks = []
    for g in PHASE_G:
        eta_c = critical_eta(g, N_TLS)
        eta_jump = phase_jump_eta(g)
        checks.append(Check(f"g={g}: eta of max inversion jump vs eta_c", eta_c, eta_jump, PHASE_ETA_STEP))
    return TableResult(
        "phase",
        "Critical interaction line: steepest ground-state inversion jump vs eta_c = omega_a - 4 g^2 N / omega_c",
        checks,
    )


def reproduce_cutoff(threads: int = 1) -> TableResult:
    checks = []
    for g, eta, drive in CUTOFF_SETS:
        rows = cutoff_convergence(_params(g, eta=eta, drive=drive), [4, 5])
        delta = abs(rows[1].e_max - rows[0].e_max)
        checks.append(Check(f"(g={g} eta={eta} drive={drive}): |e_max(5) - e_max(4)|", 0.0, delta, CUTOFF_TOL))
    return TableResult("cutoff", "Photon cutoff convergence at N_ph = 4N", checks)


_RUNNERS = {
    "table1": reproduce_table1,
    "table2": reproduce_table2,
    "table3": reproduce_table3,
    "table4": reproduce_table4,
    "table5": reproduce_table5,
    "phase": reproduce_phase,
    "cutoff": reproduce_cutoff,
}


def run(out_dir: str, tables=ALL_TABLES, threads: int = 1) -> ReproduceResult:
    """Run the selected reproductions, write report.md and per-table CSVs."""
    from .cli import write_csv  # deterministic number formatting

    os.makedirs(out_dir, exist_ok=True)
    cache = _FitCache(threads)
    results = []
    for name in tables:
        runner = _RUNNERS[name]
        if name in ("table3", "table4", "table5"):
            result = runner(threads=threads, cache=cache)
        else:
            result = runner(threads=threads)
        results.append(result)
        write_csv(
            os.path.join(out_dir, f"reproduce_{name}.csv"),
            ["check", "reference", "computed", "abs_diff", "gated", "verdict"],
            [(c.label, c.reference, c.computed, c.delta, c.gated, c.verdict) for c in result.checks],
        )

    report_path = os.path.join(out_dir, "report.md")
    _write_report(report_path, results)

    import json

    sidecar = {
        "artifact": "dicke-qb",
        "version": __version__,
        "command": "reproduce",
        "tables": list(tables),
        "canned": {
            "table1": {"n_tls": N_TLS, "search_horizon": TABLE1_PROTOCOL.search_horizon},
            "table2": {"n_tls": N_TLS, "search_horizon": TABLE2_PROTOCOL.search_horizon},
            "scaling": {"n_range": [SCALING_N[0], SCALING_N[-1]], "search_horizon": "heuristic"},
            "phase": {"n_tls": N_TLS, "g": list(PHASE_G), "eta_step": PHASE_ETA_STEP},
            "cutoff": {"factors": [4, 5], "tolerance": CUTOFF_TOL},
        },
        "gated_all_pass": all(r.all_pass for r in results),
    }
    with open(os.path.join(out_dir, "reproduce.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ReproduceResult(tables=results, report_path=report_path)


def _write_report(path: str, results: list[TableResult]) -> None:
    lines = [
        "# Reproduction report",
        "",
        f"dicke-qb {__version__}. Energies in omega_a, times in 1/omega_a, "
        "power-law prefactors beta in g*omega_a^2 units.",
        "",
    ]
    for result in results:
        gated = [c for c in result.checks if c.gated]
        n_pass = sum(c.passed for c in gated)
        lines.append(f"## {result.name}: {result.title}")
        lines.append("")
        lines.append(f"Gated checks passing: {n_pass}/{len(gated)}"
                     + ("" if result.all_pass else "  **FAIL**"))
        lines.append("")
        lines.append("| check | reference | computed | abs diff | verdict |")
        lines.append("|---|---|---|---|---|")
        for c in result.checks:
            ref = f"[{c.band[0]}, {c.band[1]}]" if c.band is not None else f"{c.reference:.3f}"
            lines.append(
                f"| {c.label} | {ref} | {c.computed:.4f} | {c.delta:.4f} | {c.verdict} |"
            )
        lines.append("")
    overall = all(r.all_pass for r in results)
    lines.append(f"**Overall: {'PASS' if overall else 'FAIL'}**")
    lines.append("")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
