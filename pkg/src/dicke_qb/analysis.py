"""Parameter sweeps, ground-state phase diagram, scaling fits, cutoff audits.

Sweep cells are pure functions of (params, protocol) and run independently;
a thread pool may evaluate them concurrently (dense eigensolves release the
GIL) with results assembled deterministically by cell index.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .dynamics import decompose, find_extrema
from .model import ChargingProtocol, ModelParams, build_h_total

SWEEPABLE = ("g", "eta", "omega_drive", "n_tls")
QUANTITIES = ("e_max", "p_max", "sigma_bar", "gs_sz")

DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class GroundState:
    """Scaled inversion of the lowest eigenstate of H = H0 + H1.

    gap is the distance to the second eigenvalue; near-degenerate parity
    doublets in the superradiant phase are flagged rather than resolved
    (|ratio| is doublet-stable).
    """

    ratio: float
    energy: float
    gap: float
    degenerate: bool


@dataclass(frozen=True)
class SweepGrid:
    """2-D sweep of one quantity with per-cell error isolation.

    Failed cells hold NaN in `values` with the reason recorded in
    `cell_errors`; a partially failed grid is still returned.
    """

    axis1_name: str
    axis1_values: np.ndarray
    axis2_name: str
    axis2_values: np.ndarray
    quantity: str
    values: np.ndarray
    base_params: ModelParams
    cell_errors: dict[tuple[int, int], str]
    horizon_warnings: list[tuple[int, int]]
    degenerate_cells: list[tuple[int, int]]


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit P_max = beta * N^alpha over a battery-size scan.

    p_max_values are stored normalized to g * omega_a^2 units, the
    presentation the fitted beta refers to; alpha is unit-invariant.
    residual is the RMS of log-space fit residuals.
    """

    n_values: np.ndarray
    p_max_values: np.ndarray
    alpha: float
    beta: float
    residual: float


@dataclass(frozen=True)
class CutoffRow:
    factor: int
    e_max: float
    p_max: float


def critical_eta(g: float, n_tls: int, omega_a: float = 1.0, omega_c: float = 1.0) -> float:
    """Critical atomic interaction eta_c = omega_a - 4 g^2 N / omega_c.

    Above eta_c the ground state leaves the normal phase (scaled inversion
    -1) and bends toward the zero-inversion regime.
    """
    if omega_c <= 0:
        raise ValueError("omega_c must be positive")
    return omega_a - 4.0 * g * g * n_tls / omega_c


def ground_state_sz(params: ModelParams) -> GroundState:
    """Diagonalize H = H0 + H1 and return <J_z>/(N/2) of the lowest eigenstate."""
    space = params.space()
    decomp = decompose(build_h_total(params, space))
    v0 = decomp.eigenvectors[:, 0]
    jz_diag = np.kron(np.ones(space.n_ph_max + 1), space.m_values)
    ratio = float(v0 @ (jz_diag * v0)) / (0.5 * params.n_tls)
    gap = float(decomp.eigenvalues[1] - decomp.eigenvalues[0])
    return GroundState(
        ratio=ratio,
        energy=float(decomp.eigenvalues[0]),
        gap=gap,
        degenerate=gap < DEGENERACY_GAP,
    )


def _apply_axis(params: ModelParams, name: str, value) -> ModelParams:
    if name == "n_tls":
        return replace(params, n_tls=int(value))
    return replace(params, **{name: float(value)})


def _cell(params: ModelParams, quantity: str, protocol: ChargingProtocol):
    """(value, horizon_warning, degenerate) for one sweep cell."""
    if quantity == "gs_sz":
        gs = ground_state_sz(params)
        return gs.ratio, False, gs.degenerate
    report = find_extrema(params, protocol)
    return getattr(report, quantity), report.horizon_warning, False


def sweep(
    base_params: ModelParams,
    axis1: tuple[str, Sequence],
    axis2: tuple[str, Sequence],
    quantity: str,
    protocol: ChargingProtocol | None = None,
    threads: int = 1,
) -> SweepGrid:
    """Evaluate `quantity` on the axis1 x axis2 grid, isolating per-cell failures."""
    name1, values1 = axis1
    name2, values2 = axis2
    for name in (name1, name2):
        if name not in SWEEPABLE:
            raise ValueError(f"axis {name!r} not one of {SWEEPABLE}")
    if name1 == name2:
        raise ValueError("sweep axes must name distinct parameters")
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity {quantity!r} not one of {QUANTITIES}")
    if len(values1) == 0 or len(values2) == 0:
        raise ValueError("sweep axes must be non-empty")
    protocol = protocol if protocol is not None else ChargingProtocol()

    values1 = np.asarray(values1)
    values2 = np.asarray(values2)
    shape = (len(values1), len(values2))
    grid = np.full(shape, np.nan)
    errors: dict[tuple[int, int], str] = {}
    warnings: list[tuple[int, int]] = []
    degenerate: list[tuple[int, int]] = []

    cells = [(i, k) for i in range(shape[0]) for k in range(shape[1])]

    def run(cell: tuple[int, int]):
        i, k = cell
        point = _apply_axis(_apply_axis(base_params, name1, values1[i]), name2, values2[k])
        return _cell(point, quantity, protocol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {cell: pool.submit(run, cell) for cell in cells}
            outcomes = {cell: _capture(futures[cell].result) for cell in cells}
    else:
        outcomes = {cell: _capture(lambda c=cell: run(c)) for cell in cells}

    for cell in cells:  # deterministic assembly, independent of evaluation order
        result, error = outcomes[cell]
        if error is not None:
            errors[cell] = error
            continue
        value, warned, degen = result
        grid[cell] = value
        if warned:
            warnings.append(cell)
        if degen:
            degenerate.append(cell)

    return SweepGrid(
        axis1_name=name1,
        axis1_values=values1,
        axis2_name=name2,
        axis2_values=values2,
        quantity=quantity,
        values=grid,
        base_params=base_params,
        cell_errors=errors,
        horizon_warnings=warnings,
        degenerate_cells=degenerate,
    )


def _capture(thunk):
    try:
        return thunk(), None
    except Exception as exc:  # noqa: BLE001 - per-cell isolation is the contract
        return None, f"{type(exc).__name__}: {exc}"


def fit_power_scaling(points: Iterable[tuple[float, float]]) -> ScalingFit:
    """Ordinary least squares of log(P_max) against log(N).

    Requires at least three points with strictly positive P_max; synthetic
    exact power laws are recovered to machine precision.
    """
    pts = sorted((float(n), float(p)) for n, p in points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points to fit a power law, got {len(pts)}")
    ns = np.array([n for n, _ in pts])
    ps = np.array([p for _, p in pts])
    if np.any(ps <= 0):
        raise ValueError("all P_max values must be positive for a log-log fit")
    if np.any(ns <= 0):
        raise ValueError("all N values must be positive")
    log_n = np.log(ns)
    log_p = np.log(ps)
    design = np.column_stack([log_n, np.ones_like(log_n)])
    (alpha, intercept), *_ = np.linalg.lstsq(design, log_p, rcond=None)
    resid = log_p - design @ np.array([alpha, intercept])
    return ScalingFit(
        n_values=ns,
        p_max_values=ps,
        alpha=float(alpha),
        beta=float(np.exp(intercept)),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def power_scaling(
    base_params: ModelParams,
    n_values: Sequence[int],
    protocol: ChargingProtocol | None = None,
    threads: int = 1,
) -> ScalingFit:
    """Scan battery size N, collect P_max/(g omega_a^2), fit the power law.

    Points with nonpositive P_max (no charging at all) are dropped before
    fitting per the fit contract.
    """
    if base_params.g <= 0:
        raise ValueError("power normalization to g*omega_a^2 units requires g > 0")
    ns = sorted(int(n) for n in n_values)
    if len(ns) != len(set(ns)):
        raise ValueError("n_values must be distinct")
    protocol = protocol if protocol is not None else ChargingProtocol()
    norm = base_params.g * base_params.omega_a**2

    def p_of(n: int) -> float:
        report = find_extrema(replace(base_params, n_tls=n), protocol)
        return report.p_max / norm

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            p_values = list(pool.map(p_of, ns))
    else:
        p_values = [p_of(n) for n in ns]

    points = [(n, p) for n, p in zip(ns, p_values) if p > 0]
    return fit_power_scaling(points)


def cutoff_convergence(
    params: ModelParams,
    factors: Sequence[int],
    protocol: ChargingProtocol | None = None,
) -> list[CutoffRow]:
    """Recompute the extrema per photon-cutoff factor to audit truncation.

    Successive |differences| of e_max quantify convergence; the memory
    guard applies per row, so oversized factors raise before allocating.
    """
    factors = [int(f) for f in factors]
    if factors != sorted(factors):
        raise ValueError("factors must be sorted ascending")
    if any(f < 1 for f in factors):
        raise ValueError("factors must be >= 1")
    protocol = protocol if protocol is not None else ChargingProtocol()
    rows = []
    for factor in factors:
        point = replace(params, cutoff_factor=factor)
        report = find_extrema(point, protocol)
        rows.append(CutoffRow(factor=factor, e_max=report.e_max, p_max=report.p_max))
    return rows
