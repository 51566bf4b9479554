"""Exact dynamics of the mass-light system, two independent ways.

Route 1 (brute force): assemble the total Hamiltonian

    H = Omega b^dag b x 1 + 1 x H_E - g0 (b^dag + b) x H_E

on a truncated joint space, eigendecompose once, and evolve the full
product state unitarily. This route knows nothing about the closed-form
solution and serves as the oracle.

Route 2 (conditional displacement): the interaction commutes with H_E, so
tracing out energy-diagonal light gives

    rho_S(t) = sum_E p(E) e^{-i H_S t} D(E lambda(t)) rho_S D^dag(E lambda(t)) e^{i H_S t}

with lambda(t) = (g0/Omega)(e^{i Omega t} - 1) and p(E) the initial energy
population of the light. Agreement of the two routes validates the whole
analytic solution chain at once.

All frequencies here are angular (rad/s); energies are frequencies
(natural units hbar = 1). Temperatures enter through beta_nat = hbar/(k_B T)
in seconds, so beta_nat * omega is the dimensionless thermal exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .constants import CODATA2018, PhysicalConstants
from .errors import DomainError
from .fockspace import (
    DensityMatrix,
    FockOperator,
    TruncationPolicy,
    displacement,
    expi_hermitian,
    ladder,
    partial_trace,
)
from .physmodel import (
    CoherentSingleMode,
    EnvironmentSpec,
    ExperimentSpec,
    FockProduct,
    ThermalMultimode,
    ThermalSingleMode,
    coupling_g0,
    environment_mode_freqs,
    lambda_t,
)

__all__ = [
    "TotalHamiltonian",
    "EnergyDistribution",
    "build_total_hamiltonian",
    "brute_force_joint_state",
    "environment_state",
    "energy_distribution",
    "energy_distribution_from_matrix",
    "environment_initial_state",
    "conditional_displacement_reduced",
    "phase_operator_diag",
    "JOINT_DIM_CAP",
]

JOINT_DIM_CAP = 4096

DEGENERACY_RTOL = 1e-9


# --------------------------------------------------------------------------
# total Hamiltonian
# --------------------------------------------------------------------------

@dataclass(eq=False)
class TotalHamiltonian:
    """Joint-space Hamiltonian with its truncation bookkeeping.

    `dims` is (dim_system, dim_mode_1, ..., dim_mode_K); `h_env_diag` is
    the diagonal of H_E on the flattened environment factor (energies in
    rad/s), used both for the interaction term and for reading off p(E).
    """

    dims: tuple[int, ...]
    matrix: FockOperator
    g0: float
    Omega: float
    mode_freqs: tuple[float, ...]
    h_env_diag: np.ndarray
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def dim_system(self) -> int:
        return self.dims[0]

    @property
    def dim_env(self) -> int:
        return int(np.prod(self.dims[1:]))

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigendecomposition, computed once and shared across time samples."""
        if self._eig is None:
            w, v = np.linalg.eigh(self.matrix.data)
            self._eig = (w, v)
        return self._eig

    def propagator(self, t: float) -> np.ndarray:
        w, v = self.eig()
        return (v * np.exp(-1j * w * t)) @ v.conj().T


def _env_mode_dims(env: EnvironmentSpec, policy: TruncationPolicy) -> tuple[int, ...]:
    n_modes = len(environment_mode_freqs(env))
    return (policy.dim_per_env_mode,) * n_modes


def build_total_hamiltonian(
    spec: ExperimentSpec,
    policy: TruncationPolicy,
    g0: float | None = None,
    constants: PhysicalConstants = CODATA2018,
    dim_cap: int = JOINT_DIM_CAP,
) -> TotalHamiltonian:
    """Assemble H on system x (one factor per environment mode).

    `g0` defaults to the coupling computed from the experiment geometry;
    tests and toy scenarios pass an explicit override.
    """
    if g0 is None:
        g0 = coupling_g0(spec, constants).g0
    mode_freqs = environment_mode_freqs(spec.environment)
    env_dims = _env_mode_dims(spec.environment, policy)
    dims = (policy.dim_system,) + env_dims
    joint_dim = int(np.prod(dims))
    if joint_dim > dim_cap:
        raise DomainError(
            f"joint dimension {joint_dim} exceeds cap {dim_cap} for dims {dims}"
        )

    # H_E diagonal on the flattened environment factor
    h_env = np.zeros(int(np.prod(env_dims)))
    for idx, occ in enumerate(iter_product(*[range(d) for d in env_dims])):
        h_env[idx] = sum(w * n for w, n in zip(mode_freqs, occ))

    dim_s = policy.dim_system
    a, adag, n_op = ladder(dim_s)
    h_s = spec.Omega * n_op.data
    x_op = adag.data + a.data

    eye_env = np.eye(h_env.size)
    h = (
        np.kron(h_s, eye_env)
        + np.kron(np.eye(dim_s), np.diag(h_env))
        - g0 * np.kron(x_op, np.diag(h_env))
    )
    return TotalHamiltonian(
        dims=dims,
        matrix=FockOperator(joint_dim, h, label="H_total"),
        g0=g0,
        Omega=spec.Omega,
        mode_freqs=mode_freqs,
        h_env_diag=h_env,
    )


# --------------------------------------------------------------------------
# brute-force evolution
# --------------------------------------------------------------------------

def brute_force_joint_state(
    h: TotalHamiltonian,
    rho_s0: DensityMatrix,
    rho_e0: DensityMatrix,
    t: float,
) -> DensityMatrix:
    """e^{-iHt} (rho_S x rho_E) e^{iHt} by exact exponentials."""
    if rho_s0.dim != h.dim_system or rho_e0.dim != h.dim_env:
        raise DomainError(
            f"initial state dims ({rho_s0.dim}, {rho_e0.dim}) do not match "
            f"Hamiltonian dims ({h.dim_system}, {h.dim_env})"
        )
    joint0 = np.kron(rho_s0.data, rho_e0.data)
    u = h.propagator(t)
    joint_t = u @ joint0 @ u.conj().T
    tail = 1.0 - float(np.trace(joint0).real)
    return DensityMatrix(h.dim_system * h.dim_env, joint_t, tail_mass=tail)


def environment_state(
    h: TotalHamiltonian,
    rho_s0: DensityMatrix,
    rho_e0: DensityMatrix,
    t: float,
) -> DensityMatrix:
    """Reduced state of the light after evolving the joint state."""
    joint_t = brute_force_joint_state(h, rho_s0, rho_e0, t)
    return partial_trace(joint_t, (h.dim_system, h.dim_env), keep=1)


def phase_operator_diag(
    h_env_diag: np.ndarray, g0: float, Omega: float, t: float
) -> np.ndarray:
    """Diagonal of the pure-light phase factor
    exp{-i g0^2 [Omega t - sin(Omega t)] (H_E/Omega)^2}; it commutes with
    H_E and cancels from every reduced system state."""
    phase = g0**2 * (Omega * t - math.sin(Omega * t))
    return np.exp(-1j * phase * (np.asarray(h_env_diag) / Omega) ** 2)


# --------------------------------------------------------------------------
# environment energy distribution
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyDistribution:
    """Finite table of (E, p(E)) with the discarded probability recorded.

    Entries are sorted by energy and degenerate energies are merged; the
    retained probabilities plus `tail_mass` sum to 1.
    """

    energies: np.ndarray   # [rad/s]
    probs: np.ndarray
    tail_mass: float

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if e.shape != p.shape or e.ndim != 1:
            raise DomainError("energies and probs must be 1-d arrays of equal length")
        if np.any(p < 0.0):
            raise DomainError("probabilities must be non-negative")
        if np.any(np.diff(e) < 0.0):
            raise DomainError("energies must be sorted ascending")
        total = p.sum() + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"probabilities + tail_mass = {total!r}, expected 1")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "probs", p)

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])


def _merge_degenerate(energies: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(energies, kind="stable")
    e = energies[order]
    p = probs[order]
    scale = max(abs(e[-1]), 1.0) if e.size else 1.0
    merged_e: list[float] = []
    merged_p: list[float] = []
    for ei, pi in zip(e, p):
        if merged_e and abs(ei - merged_e[-1]) <= DEGENERACY_RTOL * scale:
            merged_p[-1] += pi
        else:
            merged_e.append(float(ei))
            merged_p.append(float(pi))
    return np.asarray(merged_e), np.asarray(merged_p)


def _geometric_cutoff(beta_omega: float, tail: float) -> int:
    """Smallest n_max with discarded mass of the geometric distribution <= tail."""
    # discarded mass above n_max is exp(-beta_omega (n_max + 1))
    n = max(0, math.ceil(-math.log(tail) / beta_omega - 1.0))
    return int(n)


def energy_distribution(
    env: EnvironmentSpec,
    tail_epsilon: float,
    constants: PhysicalConstants = CODATA2018,
) -> EnergyDistribution:
    """p(E) = <E| rho_E |E> as a finite table with discarded mass <= tail_epsilon.

    Thermal environments use per-mode geometric weights with per-mode
    cutoffs splitting the tail budget evenly; occupation tuples are then
    enumerated and degenerate total energies merged (valid because the
    conditional displacement depends on E only). Coherent light gives the
    Poisson distribution p(n) = e^{-|alpha|^2} |alpha|^{2n} / n!; a Fock
    product is a single certain energy.
    """
    if not (0.0 < tail_epsilon <= 1e-3):
        raise DomainError(f"tail_epsilon must lie in (0, 1e-3], got {tail_epsilon}")

    if isinstance(env, FockProduct):
        e = sum(w * n for w, n in zip(env.mode_freqs, env.occupations))
        return EnergyDistribution(np.array([e]), np.array([1.0]), tail_mass=0.0)

    if isinstance(env, CoherentSingleMode):
        nbar = abs(env.alpha) ** 2
        if nbar == 0.0:
            return EnergyDistribution(np.array([0.0]), np.array([1.0]), tail_mass=0.0)
        probs = []
        cum = 0.0
        n = 0
        p = math.exp(-nbar)
        while 1.0 - cum > tail_epsilon:
            probs.append(p)
            cum += p
            n += 1
            p *= nbar / n
            if n > 100000:
                raise DomainError("coherent distribution cutoff did not converge")
        energies = env.omega * np.arange(len(probs), dtype=float)
        return EnergyDistribution(energies, np.asarray(probs), tail_mass=1.0 - cum)

    if isinstance(env, (ThermalSingleMode, ThermalMultimode)):
        freqs = environment_mode_freqs(env)
        beta_nat = constants.hbar / (constants.k_B * env.T)  # [s]
        per_mode_tail = tail_epsilon / len(freqs)
        per_mode: list[tuple[np.ndarray, np.ndarray]] = []
        for w in freqs:
            bw = beta_nat * w
            n_max = _geometric_cutoff(bw, per_mode_tail)
            ns = np.arange(n_max + 1)
            p = np.exp(-bw * ns) * (1.0 - math.exp(-bw))
            per_mode.append((w * ns, p))
        # enumerate occupation tuples; merge degenerate total energies
        energies = per_mode[0][0]
        probs = per_mode[0][1]
        for e_k, p_k in per_mode[1:]:
            energies = (energies[:, None] + e_k[None, :]).ravel()
            probs = (probs[:, None] * p_k[None, :]).ravel()
            energies, probs = _merge_degenerate(energies, probs)
        energies, probs = _merge_degenerate(energies, probs)
        return EnergyDistribution(energies, probs, tail_mass=1.0 - probs.sum())

    raise DomainError(f"unknown environment spec {type(env).__name__}")


def energy_distribution_from_matrix(
    rho_e: DensityMatrix | np.ndarray, h_env_diag: np.ndarray
) -> EnergyDistribution:
    """p(E) read off a concrete (truncated) environment matrix.

    Guarantees that the conditional-displacement route sees exactly the
    same truncated environment as the brute-force route it is compared to.
    """
    data = rho_e.data if isinstance(rho_e, DensityMatrix) else np.asarray(rho_e)
    p = np.diag(data).real.copy()
    p[np.abs(p) < 1e-300] = 0.0
    if np.any(p < -1e-12):
        raise DomainError("environment matrix has negative diagonal entries")
    p = np.clip(p, 0.0, None)
    e, p = _merge_degenerate(np.asarray(h_env_diag, dtype=float), p)
    return EnergyDistribution(e, p, tail_mass=1.0 - p.sum())


def environment_initial_state(
    env: EnvironmentSpec,
    policy: TruncationPolicy,
    constants: PhysicalConstants = CODATA2018,
) -> DensityMatrix:
    """Truncated initial light state on the flattened environment factor.

    The matrix is *not* renormalized after truncation; the discarded
    probability is recorded in `tail_mass` so both dynamics routes carry
    identical weights.
    """
    freqs = environment_mode_freqs(env)
    d = policy.dim_per_env_mode

    if isinstance(env, FockProduct):
        if any(n >= d for n in env.occupations):
            raise DomainError(
                f"occupations {env.occupations} do not fit dim_per_env_mode {d}"
            )
        rho = np.array([[1.0 + 0j]])
        for n in env.occupations:
            m = np.zeros((d, d), dtype=complex)
            m[n, n] = 1.0
            rho = np.kron(rho, m)
        return DensityMatrix(d ** len(freqs), rho, tail_mass=0.0)

    if isinstance(env, CoherentSingleMode):
        if env.alpha == 0:
            vec = np.zeros(d, dtype=complex)
            vec[0] = 1.0
        else:
            from scipy.special import gammaln

            ns = np.arange(d)
            vec = np.exp(
                -0.5 * abs(env.alpha) ** 2
                + ns * np.log(complex(env.alpha))
                - 0.5 * gammaln(ns + 1.0)
            )
        rho = np.outer(vec, vec.conj())
        return DensityMatrix(d, rho, tail_mass=1.0 - float(np.vdot(vec, vec).real))

    if isinstance(env, (ThermalSingleMode, ThermalMultimode)):
        beta_nat = constants.hbar / (constants.k_B * env.T)
        rho = np.array([[1.0 + 0j]])
        for w in freqs:
            bw = beta_nat * w
            ns = np.arange(d)
            diag = np.exp(-bw * ns) * (1.0 - math.exp(-bw))
            rho = np.kron(rho, np.diag(diag.astype(complex)))
        tail = 1.0 - float(np.trace(rho).real)
        return DensityMatrix(d ** len(freqs), rho, tail_mass=tail)

    raise DomainError(f"unknown environment spec {type(env).__name__}")


# --------------------------------------------------------------------------
# conditional-displacement reduced dynamics
# --------------------------------------------------------------------------

def conditional_displacement_reduced(
    rho_s0: DensityMatrix,
    dist: EnergyDistribution,
    g0: float,
    Omega: float,
    t: float,
) -> DensityMatrix:
    """Closed-form reduced state of the oscillator.

    Evaluates sum_E p(E) e^{-iH_S t} D(E lambda(t)) rho_S D^dag e^{iH_S t}
    exactly on the truncated space. The environment's truncation tail is
    propagated into the result's `tail_mass`; a displacement-guard
    violation for the largest energy is recorded as a warning, not an
    error.
    """
    dim = rho_s0.dim
    lam = lambda_t(g0, Omega, t)
    warnings: tuple[str, ...] = ()
    alpha_max = dist.e_max * abs(lam)
    if alpha_max**2 > dim / 4.0:
        warnings = (
            f"displacement guard: max |E lambda|^2 = {alpha_max**2:.4g} exceeds dim/4 = {dim / 4.0:.4g}",
        )

    free_phases = np.exp(-1j * Omega * t * np.arange(dim))
    out = np.zeros((dim, dim), dtype=complex)
    for e, p in zip(dist.energies, dist.probs):
        if p == 0.0:
            continue
        d_op = displacement(e * lam, dim)
        out += p * (d_op.data @ rho_s0.data @ d_op.dag)
    out = (free_phases[:, None] * out) * free_phases.conj()[None, :]
    tail = 1.0 - (1.0 - dist.tail_mass) * (1.0 - rho_s0.tail_mass)
    return DensityMatrix(dim, out, tail_mass=tail, warnings=warnings)
