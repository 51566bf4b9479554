"""Dense linear algebra on a truncated oscillator Fock space.

Ladder operators, displacement operators, Hermite-function position
transforms and partial traces, all as plain complex numpy matrices with
explicit truncation metadata. Matrix exponentials are computed by
eigendecomposition of Hermitian generators, which keeps every propagator
unitary up to diagonalization error; nothing here uses series expansions
or scaling-and-squaring.

Position convention: xi = sqrt(kappa) x with kappa = M Omega / (2 hbar) is
the dimensionless position, the ground-state density is proportional to
exp(-2 xi^2), and coherent states peak at xi = Re(alpha) with momentum
phase exp(2i Im(alpha) xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "FockOperator",
    "DensityMatrix",
    "PositionGrid",
    "TruncationPolicy",
    "ladder",
    "displacement",
    "expi_hermitian",
    "position_wavefunctions",
    "fock_to_position",
    "partial_trace",
    "matrix_to_csv",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = -1e-10


@dataclass(eq=False)
class FockOperator:
    """A dense operator on a truncated Fock space.

    `label` is free-text provenance; `warnings` collects truncation-guard
    messages attached by the constructing operation.
    """

    dim: int
    data: np.ndarray
    label: str = ""
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError(f"truncation dimension must be >= 2, got {self.dim}")
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.dim, self.dim):
            raise DomainError(
                f"operator data has shape {self.data.shape}, expected {(self.dim, self.dim)}"
            )
        if not np.all(np.isfinite(self.data)):
            raise DomainError("operator entries must be finite")

    @property
    def dag(self) -> np.ndarray:
        return self.data.conj().T


@dataclass(eq=False)
class DensityMatrix:
    """A (possibly truncated) density matrix.

    `tail_mass` is the probability discarded by truncation; a valid matrix
    has trace 1 - tail_mass within TRACE_TOL, is Hermitian within
    HERMITICITY_TOL and positive semidefinite down to eigenvalue PSD_TOL.
    """

    dim: int
    data: np.ndarray
    tail_mass: float = 0.0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.dim, self.dim):
            raise DomainError(
                f"density matrix has shape {self.data.shape}, expected {(self.dim, self.dim)}"
            )

    def validate(self) -> "DensityMatrix":
        herm = np.max(np.abs(self.data - self.data.conj().T))
        if herm > HERMITICITY_TOL:
            raise DomainError(f"density matrix not Hermitian: deviation {herm:.3e}")
        tr = self.data.trace().real
        if abs(tr - (1.0 - self.tail_mass)) > TRACE_TOL:
            raise DomainError(
                f"trace {tr!r} differs from 1 - tail_mass = {1.0 - self.tail_mass!r}"
            )
        evals = np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))
        if evals.min() < PSD_TOL:
            raise DomainError(f"density matrix not PSD: min eigenvalue {evals.min():.3e}")
        return self

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.data, self.data).real)


@dataclass(frozen=True)
class PositionGrid:
    """Ordered dimensionless positions xi = sqrt(kappa) x.

    Points must be strictly increasing; the default constructor produces a
    uniform grid symmetric about 0. `kappa` [m^-2] converts back to
    physical positions, x = xi / sqrt(kappa).
    """

    points: np.ndarray
    kappa: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid needs a one-dimensional, non-empty point list")
        if not np.all(np.diff(pts) > 0.0):
            raise DomainError("grid points must be strictly increasing")
        if not self.kappa > 0.0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, kappa: float, xi_max: float = 8.0, n: int = 801) -> "PositionGrid":
        return cls(points=np.linspace(-xi_max, xi_max, n), kappa=kappa)

    @property
    def x(self) -> np.ndarray:
        """Physical positions [m]."""
        return self.points / math.sqrt(self.kappa)

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class TruncationPolicy:
    """Hilbert-space truncation budget for the brute-force route."""

    dim_system: int
    dim_per_env_mode: int
    tail_epsilon: float = 1e-9

    def __post_init__(self):
        if self.dim_system < 2 or self.dim_per_env_mode < 2:
            raise DomainError("truncation dimensions must be >= 2")
        if not (0.0 < self.tail_epsilon <= 1e-3):
            raise DomainError(
                f"tail_epsilon must lie in (0, 1e-3], got {self.tail_epsilon}"
            )


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------

def ladder(dim: int) -> tuple[FockOperator, FockOperator, FockOperator]:
    """Annihilation, creation and number operators on a dim-level space.

    a|n> = sqrt(n)|n-1>; the truncated commutator [a, a^dag] equals the
    identity on the first dim-1 levels with 1 - dim in the last diagonal
    entry, the standard truncation artifact.
    """
    if dim < 2:
        raise DomainError(f"truncation dimension must be >= 2, got {dim}")
    a = np.zeros((dim, dim), dtype=complex)
    rng = np.arange(1, dim)
    a[rng - 1, rng] = np.sqrt(rng)
    adag = a.conj().T
    n = adag @ a
    return (
        FockOperator(dim, a, label="a"),
        FockOperator(dim, adag, label="a_dag"),
        FockOperator(dim, n, label="n"),
    )


def expi_hermitian(h: np.ndarray, tau: float = 1.0) -> np.ndarray:
    """exp(-i tau H) for Hermitian H, by eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * tau * w)) @ v.conj().T


def displacement(alpha: complex, dim: int) -> FockOperator:
    """Displacement operator exp(alpha a^dag - conj(alpha) a), truncated.

    Computed as exp(-iH) with the Hermitian generator
    H = i(alpha a^dag - conj(alpha) a), so the result is unitary on the
    retained subspace up to diagonalization error. Displacements with
    |alpha|^2 > dim/4 are not rejected but flagged in `warnings`.
    """
    alpha = complex(alpha)
    a, adag, _ = ladder(dim)
    gen = 1j * (alpha * adag.data - alpha.conjugate() * a.data)
    d = expi_hermitian(gen)
    warnings: tuple[str, ...] = ()
    if abs(alpha) ** 2 > dim / 4.0:
        warnings = (
            f"displacement guard: |alpha|^2 = {abs(alpha)**2:.4g} exceeds dim/4 = {dim / 4.0:.4g}",
        )
    return FockOperator(dim, d, label=f"D({alpha!r})", warnings=warnings)


# --------------------------------------------------------------------------
# position representation
# --------------------------------------------------------------------------

def position_wavefunctions(grid: PositionGrid, dim: int) -> np.ndarray:
    """Oscillator eigenfunctions psi_n(xi) on the grid, shape (len(grid), dim).

    psi_n(xi) = (2 kappa / pi)^(1/4) H_n(sqrt(2) xi) exp(-xi^2) / sqrt(2^n n!),
    evaluated with the stable three-term recurrence on the normalized
    Hermite polynomials. The normalization carries the physical
    kappa^(1/4), so sums against these functions produce matrix elements
    in 1/m units and the coherent-state resummation reproduces
    <x|alpha> = (2 kappa/pi)^(1/4) exp[-(xi - a1)^2 + 2i a2 xi - i a1 a2].
    """
    if dim < 1:
        raise DomainError("need at least one level")
    xi = grid.points
    y = math.sqrt(2.0) * xi
    h = np.empty((xi.size, dim), dtype=float)
    h[:, 0] = 1.0
    if dim > 1:
        h[:, 1] = y * math.sqrt(2.0)
    for n in range(1, dim - 1):
        # normalized recurrence: h_{n+1} = y sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}
        h[:, n + 1] = y * math.sqrt(2.0 / (n + 1)) * h[:, n] - math.sqrt(n / (n + 1)) * h[:, n - 1]
    envelope = np.exp(-(xi**2))
    prefactor = (2.0 * grid.kappa / math.pi) ** 0.25
    return prefactor * envelope[:, None] * h


def fock_to_position(rho: DensityMatrix, grid: PositionGrid) -> np.ndarray:
    """Position matrix elements rho(x_i, x_j) = sum_mn psi_m(x_i) rho_mn psi_n(x_j)*."""
    psi = position_wavefunctions(grid, rho.dim)
    return psi @ rho.data @ psi.conj().T


# --------------------------------------------------------------------------
# partial trace
# --------------------------------------------------------------------------

def matrix_to_csv(matrix) -> str:
    """Debug export of any operator or state matrix: rows (row, col, re, im)."""
    data = matrix.data if isinstance(matrix, (FockOperator, DensityMatrix)) else np.asarray(matrix)
    lines = ["row,col,re,im"]
    for i in range(data.shape[0]):
        for j in range(data.shape[1]):
            v = complex(data[i, j])
            lines.append(f"{i},{j},{v.real:.16e},{v.imag:.16e}")
    return "\n".join(lines) + "\n"


def partial_trace(rho_joint, dims: list[int] | tuple[int, ...], keep: int) -> DensityMatrix:
    """Trace out all tensor factors except `keep`.

    `rho_joint` may be a DensityMatrix or a raw matrix whose dimension is
    the product of `dims`; the trace is preserved to machine precision.
    """
    data = rho_joint.data if isinstance(rho_joint, DensityMatrix) else np.asarray(rho_joint, dtype=complex)
    tail = rho_joint.tail_mass if isinstance(rho_joint, DensityMatrix) else 0.0
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if data.shape != (total, total):
        raise DomainError(
            f"joint dimension {data.shape} does not match product of dims {dims}"
        )
    if not 0 <= keep < len(dims):
        raise DomainError(f"keep index {keep} out of range for {len(dims)} factors")
    nfac = len(dims)
    tensor = data.reshape(dims + dims)
    # contract every factor except `keep` against its primed partner
    for axis in reversed([i for i in range(nfac) if i != keep]):
        tensor = np.trace(tensor, axis1=axis, axis2=axis + nfac)
        nfac -= 1
    return DensityMatrix(dims[keep], tensor, tail_mass=tail)
