"""Truncated photon x collective-spin basis and elementary operators.

The basis is |n> (x) |j, m> with the collective spin fixed at j = N/2,
photon occupation n in [0, n_ph_max] and magnetic quantum number
m in {-j, ..., +j}.  Basis indices are row-major with the photon number
as the outer label and m ascending inside each photon block:

    index(n, m) = n * (N + 1) + (m + j)

so (n=0, m=-j) maps to 0 and (n=n_ph_max, m=+j) maps to dim - 1.

Every operator built here has real matrix elements in this basis and is
returned as a dense float64 array.  Hermitian operators are exactly
symmetric by construction, and adag_op is exactly the transpose of a_op.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_CUTOFF_FACTOR = 4
DEFAULT_MAX_DIM = 20000


@dataclass(frozen=True)
class HilbertSpace:
    """Dimensions and index maps of the truncated product basis."""

    n_tls: int
    n_ph_max: int

    @property
    def j(self) -> float:
        return 0.5 * self.n_tls

    @property
    def n_spin(self) -> int:
        """Number of m levels in the fixed j = N/2 block."""
        return self.n_tls + 1

    @property
    def dim(self) -> int:
        return (self.n_ph_max + 1) * self.n_spin

    @property
    def m_values(self) -> np.ndarray:
        """All J_z eigenvalues, ascending from -j to +j."""
        return np.arange(self.n_spin) - self.j


def build_space(
    n_tls: int,
    cutoff_factor: int = DEFAULT_CUTOFF_FACTOR,
    max_dim: int = DEFAULT_MAX_DIM,
) -> HilbertSpace:
    """Build the basis for N two-level systems with photon cutoff = cutoff_factor * N.

    The cutoff must keep the initial N-photon Fock state representable,
    which cutoff_factor >= 1 guarantees.  A memory guard rejects spaces
    whose dense operators would be unreasonably large; raise max_dim to
    override deliberately.
    """
    if not isinstance(n_tls, (int, np.integer)) or n_tls < 1:
        raise ValueError(f"n_tls must be a positive integer, got {n_tls!r}")
    if not isinstance(cutoff_factor, (int, np.integer)) or cutoff_factor < 1:
        raise ValueError(f"cutoff_factor must be a positive integer, got {cutoff_factor!r}")
    space = HilbertSpace(n_tls=int(n_tls), n_ph_max=int(cutoff_factor) * int(n_tls))
    if space.dim > max_dim:
        raise ValueError(
            f"basis dimension {space.dim} = ({space.n_ph_max + 1})x({space.n_spin}) "
            f"exceeds the memory guard max_dim={max_dim}; dense eigensolves scale as "
            f"dim^3 -- reduce n_tls/cutoff_factor or raise max_dim explicitly"
        )
    return space


def index_of(space: HilbertSpace, n: int, m: float) -> int:
    """Basis index of |n; j, m>.  Inverse of state_of."""
    if not 0 <= n <= space.n_ph_max:
        raise ValueError(f"photon number n={n} outside [0, {space.n_ph_max}]")
    p = m + space.j
    p_int = int(round(p))
    if abs(p - p_int) > 1e-9 or not 0 <= p_int <= space.n_tls:
        raise ValueError(f"m={m} is not in {{-j, ..., +j}} for j={space.j}")
    return int(n) * space.n_spin + p_int


def state_of(space: HilbertSpace, idx: int) -> tuple[int, float]:
    """(n, m) labels of basis index idx.  Inverse of index_of."""
    if not 0 <= idx < space.dim:
        raise ValueError(f"index {idx} outside [0, {space.dim})")
    n, p = divmod(int(idx), space.n_spin)
    return n, p - space.j


# -- single-factor matrices ------------------------------------------------

def _photon_annihilation(space: HilbertSpace) -> np.ndarray:
    n_ph = space.n_ph_max + 1
    return np.diag(np.sqrt(np.arange(1, n_ph)), k=1)


def _spin_plus(space: HilbertSpace) -> np.ndarray:
    j = space.j
    m = space.m_values[:-1]  # J+ raises every m except the highest
    return np.diag(np.sqrt(j * (j + 1) - m * (m + 1)), k=-1)


def _spin_z(space: HilbertSpace) -> np.ndarray:
    return np.diag(space.m_values)


# -- full-space operators ----------------------------------------------------

def a_op(space: HilbertSpace) -> np.ndarray:
    """Photon annihilation: <n-1, m| a |n, m> = sqrt(n)."""
    return np.kron(_photon_annihilation(space), np.eye(space.n_spin))


def adag_op(space: HilbertSpace) -> np.ndarray:
    """Photon creation, exactly a_op(space).T."""
    return a_op(space).T.copy()


def n_op(space: HilbertSpace) -> np.ndarray:
    """Photon number operator adag * a (diagonal n per spin block)."""
    n_ph = space.n_ph_max + 1
    return np.kron(np.diag(np.arange(n_ph, dtype=float)), np.eye(space.n_spin))


def jz_op(space: HilbertSpace) -> np.ndarray:
    """Collective J_z, diagonal with entries m."""
    return np.kron(np.eye(space.n_ph_max + 1), _spin_z(space))


def jp_op(space: HilbertSpace) -> np.ndarray:
    """Collective raising operator J+ in the fixed j = N/2 block."""
    return np.kron(np.eye(space.n_ph_max + 1), _spin_plus(space))


def jm_op(space: HilbertSpace) -> np.ndarray:
    """Collective lowering operator J-, exactly jp_op(space).T."""
    return jp_op(space).T.copy()


def jx_op(space: HilbertSpace) -> np.ndarray:
    """J_x = (J+ + J-)/2, real symmetric."""
    jp = jp_op(space)
    return 0.5 * (jp + jp.T)


def j2_op(space: HilbertSpace) -> np.ndarray:
    """Total spin J^2 = J_x^2 + J_y^2 + J_z^2 assembled from operator products.

    J_y^2 is evaluated in real arithmetic as -((J+ - J-)/2)^2.  In the fixed
    j block the result equals j(j+1) times the identity, which the test
    suite asserts.
    """
    jp = jp_op(space)
    jm = jp.T
    jx = 0.5 * (jp + jm)
    jy_times_i = 0.5 * (jp - jm)  # i * J_y, real antisymmetric
    jz = jz_op(space)
    return jx @ jx - jy_times_i @ jy_times_i + jz @ jz
