"""Physical parameters and Hamiltonian assembly.

Units: hbar = 1 and energies are measured in omega_a (the TLS splitting),
times in 1/omega_a.  The battery Hamiltonian is

    H0 = omega_a * J_z

and the charger

    H1 = omega_c * adag a
       + 2 omega_c g * J_x (adag + a)
       + (eta / N) * J_z^2
       + omega_drive * (J+ + J-)

with H = H0 + H1 during the charging window.  Note the drive convention:
the drive strength multiplies the bare ladder sum (J+ + J-) = 2 J_x.  This
is the normalization under which the bundled reference benchmarks
(and the closed-form matrix elements checked by cross_check_formula) are
mutually consistent; see README "Conventions".

The canonical construction is by operator products of the elementary
matrices from :mod:`dicke_qb.hilbert`.  cross_check_formula provides an
independent closed-form expression for every matrix element and returns
the worst-case deviation between the two routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from . import hilbert
from .hilbert import DEFAULT_CUTOFF_FACTOR, HilbertSpace, build_space, index_of

SEARCH_HORIZON_MIN = 10.0
SEARCH_HORIZON_MAX = 1000.0


@dataclass(frozen=True)
class ModelParams:
    """All physical parameters of one simulation point.

    omega_a / omega_c default to the resonant dimensionless convention
    omega_a = omega_c = 1.  Off-resonant values are accepted but flagged
    as unvalidated in output metadata (see `resonant`).
    """

    n_tls: int
    g: float
    eta: float = 0.0
    omega_drive: float = 0.0
    omega_a: float = 1.0
    omega_c: float = 1.0
    cutoff_factor: int = DEFAULT_CUTOFF_FACTOR

    def __post_init__(self) -> None:
        if not isinstance(self.n_tls, (int, np.integer)) or self.n_tls < 1:
            raise ValueError(f"n_tls must be a positive integer, got {self.n_tls!r}")
        if not isinstance(self.cutoff_factor, (int, np.integer)) or self.cutoff_factor < 1:
            raise ValueError(f"cutoff_factor must be a positive integer, got {self.cutoff_factor!r}")
        for name in ("g", "eta", "omega_drive", "omega_a", "omega_c"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g!r}")
        if self.omega_a <= 0 or self.omega_c <= 0:
            raise ValueError("omega_a and omega_c must be positive")

    @property
    def resonant(self) -> bool:
        return self.omega_a == self.omega_c

    def space(self, max_dim: int = hilbert.DEFAULT_MAX_DIM) -> HilbertSpace:
        return build_space(self.n_tls, self.cutoff_factor, max_dim=max_dim)


@dataclass(frozen=True)
class ChargingProtocol:
    """How extrema are searched for on a charging trace.

    search_horizon of None selects the per-point heuristic
    default_search_horizon(params).  The coarse grid locates candidate
    maxima; golden-section refinement narrows each candidate's time
    bracket below refine_tolerance (spectral evaluation is exact at any t,
    so refinement is cheap).
    """

    search_horizon: float | None = None
    coarse_points: int = 2000
    refine_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.search_horizon is not None and not self.search_horizon > 0:
            raise ValueError(f"search_horizon must be positive, got {self.search_horizon!r}")
        if self.coarse_points < 100:
            raise ValueError(f"coarse_points must be >= 100, got {self.coarse_points!r}")
        if not self.refine_tolerance > 0:
            raise ValueError(f"refine_tolerance must be positive, got {self.refine_tolerance!r}")

    def horizon(self, params: ModelParams) -> float:
        if self.search_horizon is not None:
            return self.search_horizon
        return default_search_horizon(params)


def default_search_horizon(params: ModelParams) -> float:
    """Collective-Rabi heuristic 20/(g sqrt(N) omega_a), clipped to [10, 1000]/omega_a.

    The first stored-energy maximum sits on the collective Rabi timescale
    ~1/(g sqrt(N)); a 20x window plus the clip covers slow weak-coupling
    dynamics without unbounded scans.  g = 0 falls back to the upper clip.
    """
    wa = params.omega_a
    if params.g <= 0:
        return SEARCH_HORIZON_MAX / wa
    t = 20.0 / (params.g * math.sqrt(params.n_tls) * wa)
    return min(max(t, SEARCH_HORIZON_MIN / wa), SEARCH_HORIZON_MAX / wa)


def _check_space(params: ModelParams, space: HilbertSpace) -> None:
    if space.n_tls != params.n_tls or space.n_ph_max != params.cutoff_factor * params.n_tls:
        raise ValueError(
            f"space (N={space.n_tls}, n_ph_max={space.n_ph_max}) inconsistent with "
            f"params (N={params.n_tls}, cutoff_factor={params.cutoff_factor})"
        )


def build_h0(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """Battery Hamiltonian omega_a * J_z (diagonal)."""
    _check_space(params, space)
    return params.omega_a * hilbert.jz_op(space)


def build_h1(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """Charger Hamiltonian, assembled by products of the elementary operators."""
    _check_space(params, space)
    # Sparse products: every elementary operator is banded, so this stays
    # O(dim) in flops while the returned matrix is dense per the contract.
    a = scipy.sparse.csr_matrix(hilbert.a_op(space))
    adag = a.T.tocsr()
    jz = scipy.sparse.csr_matrix(hilbert.jz_op(space))
    jp = scipy.sparse.csr_matrix(hilbert.jp_op(space))
    jm = jp.T.tocsr()
    jx = 0.5 * (jp + jm)

    h1 = (
        params.omega_c * (adag @ a)
        + (2.0 * params.omega_c * params.g) * (jx @ (adag + a))
        + (params.eta / params.n_tls) * (jz @ jz)
        + params.omega_drive * (jp + jm)
    )
    return h1.toarray()


def build_h_total(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """Full charging Hamiltonian H = H0 + H1."""
    return build_h0(params, space) + build_h1(params, space)


def formula_hamiltonian(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """Closed-form matrix elements of H, written independently of operator products.

    Labels follow the q = j - m convention: the element
    <n', j, j-q' | H | n, j, j-q> is

        omega_c * { [n + m + (eta/N) m^2] delta(n',n) delta(q',q)
                    + drive * [f1 delta(q',q+1) + f2 delta(q',q-1)] delta(n',n)
                    + g * [f3 delta(n',n+1) delta(q',q+1)
                         + f4 delta(n',n+1) delta(q',q-1)
                         + f5 delta(n',n-1) delta(q',q+1)
                         + f6 delta(n',n-1) delta(q',q-1)] }

    with m = j - q and

        f1 = sqrt(j(j+1) - m(m-1))          f2 = sqrt(j(j+1) - m(m+1))
        f3 = sqrt((n+1) (j(j+1) - m(m-1)))  f4 = sqrt((n+1) (j(j+1) - m(m+1)))
        f5 = sqrt(n (j(j+1) - m(m-1)))      f6 = sqrt(n (j(j+1) - m(m+1)))

    This expression assumes the dimensionless resonance convention
    omega_a = omega_c = 1 (a single omega_c prefactor covers every term);
    it is a consistency oracle, not the canonical construction.
    """
    _check_space(params, space)
    n_max = space.n_ph_max
    n_tls = space.n_tls
    j = space.j
    wc = params.omega_c
    g = params.g
    drive = params.omega_drive
    eta = params.eta

    h = np.zeros((space.dim, space.dim))
    jj = j * (j + 1)
    for n in range(n_max + 1):
        for q in range(n_tls + 1):
            m = j - q
            col = index_of(space, n, m)
            h[col, col] = wc * (n + m + (eta / n_tls) * m * m)
            f1 = math.sqrt(max(jj - m * (m - 1), 0.0))
            f2 = math.sqrt(max(jj - m * (m + 1), 0.0))
            if q + 1 <= n_tls:  # q' = q+1, i.e. m' = m-1
                h[index_of(space, n, m - 1), col] += wc * drive * f1
            if q - 1 >= 0:      # q' = q-1, i.e. m' = m+1
                h[index_of(space, n, m + 1), col] += wc * drive * f2
            if n + 1 <= n_max and q + 1 <= n_tls:
                h[index_of(space, n + 1, m - 1), col] += wc * g * math.sqrt(n + 1) * f1
            if n + 1 <= n_max and q - 1 >= 0:
                h[index_of(space, n + 1, m + 1), col] += wc * g * math.sqrt(n + 1) * f2
            if n - 1 >= 0 and q + 1 <= n_tls:
                h[index_of(space, n - 1, m - 1), col] += wc * g * math.sqrt(n) * f1
            if n - 1 >= 0 and q - 1 >= 0:
                h[index_of(space, n - 1, m + 1), col] += wc * g * math.sqrt(n) * f2
    return h


def cross_check_formula(params: ModelParams, space: HilbertSpace) -> float:
    """Max absolute deviation between formula_hamiltonian and build_h_total.

    Should be <= 1e-12 at resonance for any (g, eta, omega_drive).
    """
    return float(np.max(np.abs(formula_hamiltonian(params, space) - build_h_total(params, space))))
