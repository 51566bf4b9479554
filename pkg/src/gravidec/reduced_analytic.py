"""Characteristic-function route to the position matrix elements.

The reduced state factorizes under the p-integral into a free part and an
influence function:

    rho_t(x, x') = sqrt(kappa) / pi * Int dp  chi_t(-Delta + i p)
                   * exp(-i xi_plus p) * F_t(p; Delta),

with Delta = xi - xi', xi_plus = xi + xi' (dimensionless positions),
chi_t(beta) = chi(e^{+i Omega t} beta) the rotated symmetric
characteristic function of the initial oscillator state, and

    F_t(p; Delta) = sum_E p(E) exp{ 2 i E [gamma1(t) p + gamma2(t) Delta] }

the discrete Fourier transform of the light's initial energy
distribution. F carries both the mechanical kick (the gamma1 p term) and
the decoherence in the separation Delta.

Note the rotation direction in chi_t: forward free evolution of the
oscillator requires chi(e^{+i Omega t} beta); this is fixed here once and
validated against the Fock-basis free evolution in the test suite.

The closed influence-function forms implemented below:

    thermal, exact:    prod_{k,nu} (e^{b w} - 1) / (e^{b w} - e^{2 i w u})
    thermal, high-T:   1 + (4iN/b) u - (4N(N+1)/b^2) u^2
    single mode:       1 + 2 i w u/(e^{b w}-1) - 2 w^2 (1+e^{b w})/(e^{b w}-1)^2 u^2
    coherent:          exp{-|alpha|^2 [1 - e^{2 i w u}]}

with u = gamma1(t) p + gamma2(t) Delta and b the inverse temperature in
natural units (hbar / k_B T, seconds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import eval_laguerre

from .errors import DomainError, QuadratureError
from .fockspace import PositionGrid
from .physmodel import gamma12

__all__ = [
    "CharacteristicFunction",
    "InfluenceFunction",
    "chi_of_state",
    "influence_thermal_exact",
    "influence_thermal_highT",
    "influence_single_thermal_mode",
    "influence_coherent",
    "thermal_exact_influence",
    "thermal_highT_influence",
    "single_thermal_mode_influence",
    "coherent_influence",
    "unit_influence",
    "matrix_elements_general",
    "matrix_elements_grid",
]


# --------------------------------------------------------------------------
# characteristic functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacteristicFunction:
    """Evaluatable symmetric characteristic function chi(beta) = Tr[D(beta) rho].

    `evaluator` must accept complex scalars or ndarrays. chi(0) = 1 and
    chi(-beta) = conj(chi(beta)) for any physical state.
    `gaussian_decay_scale` is the standard deviation sigma of the Gaussian
    envelope along the imaginary axis, |chi(ip)| <= exp(-p^2/(2 sigma^2))
    up to bounded factors; the quadrature window starts at 8 sigma.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    gaussian_decay_scale: float
    label: str = ""

    def __call__(self, beta):
        return self.evaluator(beta)


def chi_of_state(kind: str, **params) -> CharacteristicFunction:
    """Closed-form chi for the supported initial oscillator states.

    kinds: "ground"; "coherent" (mu); "thermal" (nbar); "fock" (n);
    "cat" (mu, phase=0.0) for the normalized superposition of |mu> and
    e^{i phase}|-mu>. The cat state is an extension beyond Gaussian
    inputs; its evaluator assembles each overlap's full complex exponent
    before exponentiating, so widely separated branches stay finite.
    """
    if kind == "ground":
        def ev(beta):
            beta = np.asarray(beta, dtype=complex)
            return np.exp(-0.5 * np.abs(beta) ** 2)

        return CharacteristicFunction(ev, 1.0, "ground")

    if kind == "coherent":
        mu = complex(params["mu"])

        def ev(beta):
            beta = np.asarray(beta, dtype=complex)
            return np.exp(-0.5 * np.abs(beta) ** 2 + beta * mu.conjugate() - beta.conjugate() * mu)

        return CharacteristicFunction(ev, 1.0, f"coherent(mu={mu!r})")

    if kind == "thermal":
        nbar = float(params["nbar"])
        if nbar < 0.0:
            raise DomainError(f"thermal occupation must be >= 0, got {nbar}")

        def ev(beta):
            beta = np.asarray(beta, dtype=complex)
            return np.exp(-(nbar + 0.5) * np.abs(beta) ** 2)

        return CharacteristicFunction(ev, 1.0 / math.sqrt(2.0 * nbar + 1.0), f"thermal(nbar={nbar})")

    if kind == "fock":
        n = int(params["n"])
        if n < 0:
            raise DomainError(f"Fock level must be >= 0, got {n}")

        def ev(beta):
            beta = np.asarray(beta, dtype=complex)
            mag2 = np.abs(beta) ** 2
            return np.exp(-0.5 * mag2) * eval_laguerre(n, mag2)

        return CharacteristicFunction(ev, 1.0, f"fock({n})")

    if kind == "cat":
        mu = complex(params["mu"])
        phase = float(params.get("phase", 0.0))
        norm2 = 2.0 * (1.0 + math.cos(phase) * math.exp(-2.0 * abs(mu) ** 2))
        if norm2 <= 0.0:
            raise DomainError("cat state normalization vanishes for these parameters")
        eip = complex(math.cos(phase), math.sin(phase))

        def overlap_exponent(g: complex, d: complex, beta):
            # log <g| D(beta) |d> = (beta conj(d) - conj(beta) d)/2
            #                       + conj(g)(d + beta) - |g|^2/2 - |d + beta|^2/2
            shifted = d + beta
            return (
                0.5 * (beta * np.conjugate(d) - np.conjugate(beta) * d)
                + np.conjugate(g) * shifted
                - 0.5 * abs(g) ** 2
                - 0.5 * shifted * np.conjugate(shifted)
            )

        def ev(beta):
            beta = np.asarray(beta, dtype=complex)
            total = (
                np.exp(overlap_exponent(mu, mu, beta))
                + np.exp(overlap_exponent(-mu, -mu, beta))
                + eip * np.exp(overlap_exponent(mu, -mu, beta))
                + np.conjugate(eip) * np.exp(overlap_exponent(-mu, mu, beta))
            )
            return total / norm2

        return CharacteristicFunction(ev, 1.0, f"cat(mu={mu!r}, phase={phase})")

    raise DomainError(f"unknown state descriptor {kind!r}")


# --------------------------------------------------------------------------
# influence functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InfluenceFunction:
    """Evaluatable F_t(p; Delta) with its model tag and validity notes."""

    evaluator: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    model: str
    validity_flags: tuple[str, ...] = ()

    def __call__(self, p, delta, t):
        return self.evaluator(p, delta, t)


def _kick_argument(p, delta, t, g0: float, Omega: float):
    g1, g2 = gamma12(g0, Omega, t)
    return g1 * np.asarray(p) + g2 * np.asarray(delta)


def influence_thermal_exact(
    p, delta, t, mode_freqs: Sequence[float], beta: float, g0: float, Omega: float
):
    """Exact thermal influence: geometric-series product over all (k, nu)
    factors. `beta` is hbar/(k_B T) in seconds, so beta * omega_k is the
    dimensionless thermal exponent and must be positive."""
    u = _kick_argument(p, delta, t, g0, Omega)
    out = np.ones_like(np.asarray(u, dtype=complex))
    for w in mode_freqs:
        bw = beta * w
        if not bw > 0.0:
            raise DomainError(f"beta * omega must be positive, got {bw}")
        # (e^bw - 1)/(e^bw - z) written with e^{-bw} so large bw never overflows
        embw = math.exp(-bw)
        denom = 1.0 - embw * np.exp(2j * w * u)
        if np.any(np.abs(denom) < 1e-14):
            raise DomainError("thermal influence denominator vanished")
        out = out * (1.0 - embw) / denom
    return out if out.shape else complex(out)


def influence_thermal_highT(
    p, delta, t, n_modes: int, beta: float, g0: float, Omega: float
):
    """Quadratic high-temperature expansion for N k-modes (2N polarization
    factors): 1 + (4iN/beta) u - (4N(N+1)/beta^2) u^2."""
    if n_modes < 1:
        raise DomainError(f"mode count must be >= 1, got {n_modes}")
    u = _kick_argument(p, delta, t, g0, Omega)
    out = 1.0 + (4j * n_modes / beta) * u - (4.0 * n_modes * (n_modes + 1) / beta**2) * u**2
    return out if np.asarray(out).shape else complex(out)


def influence_single_thermal_mode(
    p, delta, t, omega: float, beta: float, g0: float, Omega: float
):
    """Quadratic weak-coupling expansion for one thermal (k, nu) factor."""
    bw = beta * omega
    if not bw > 0.0:
        raise DomainError(f"beta * omega must be positive, got {bw}")
    u = _kick_argument(p, delta, t, g0, Omega)
    if bw > 700.0:
        # occupation underflow: both correction coefficients vanish
        out = np.ones_like(np.asarray(u, dtype=complex))
        return out if out.shape else complex(out)
    em1 = math.expm1(bw)
    out = (
        1.0
        + (2j * omega / em1) * u
        - (2.0 * omega**2 * (1.0 + math.exp(bw)) / em1**2) * u**2
    )
    return out if np.asarray(out).shape else complex(out)


def influence_coherent(p, delta, t, alpha: complex, omega: float, g0: float, Omega: float):
    """Single-mode coherent light, the resummed Poisson series:
    exp{-|alpha|^2 [1 - e^{2 i omega u}]}."""
    u = _kick_argument(p, delta, t, g0, Omega)
    out = np.exp(-abs(alpha) ** 2 * (1.0 - np.exp(2j * omega * u)))
    return out if np.asarray(out).shape else complex(out)


def _flags_thermal(
    beta: float, omega_ref: float | None, g0: float, Omega: float
) -> tuple[str, ...]:
    flags = []
    if omega_ref is not None and beta * omega_ref > 0.1:
        flags.append(f"hbar*omega*beta = {beta * omega_ref:.3g} > 0.1: outside high-T regime")
    if g0 / (beta * Omega) > 0.01:
        flags.append(
            f"g0*k_B*T/(hbar*Omega) = {g0 / (beta * Omega):.3g} > 0.01: expansion parameter not small"
        )
    return tuple(flags)


def thermal_exact_influence(
    mode_freqs: Sequence[float], beta: float, g0: float, Omega: float
) -> InfluenceFunction:
    freqs = tuple(float(w) for w in mode_freqs)
    return InfluenceFunction(
        lambda p, d, t: influence_thermal_exact(p, d, t, freqs, beta, g0, Omega),
        model="thermal-exact",
    )


def thermal_highT_influence(
    n_modes: int, beta: float, g0: float, Omega: float, omega_ref: float | None = None
) -> InfluenceFunction:
    return InfluenceFunction(
        lambda p, d, t: influence_thermal_highT(p, d, t, n_modes, beta, g0, Omega),
        model="thermal-highT",
        validity_flags=_flags_thermal(beta, omega_ref, g0, Omega),
    )


def single_thermal_mode_influence(
    omega: float, beta: float, g0: float, Omega: float
) -> InfluenceFunction:
    return InfluenceFunction(
        lambda p, d, t: influence_single_thermal_mode(p, d, t, omega, beta, g0, Omega),
        model="thermal-single-mode",
        validity_flags=_flags_thermal(beta, omega, g0, Omega),
    )


def coherent_influence(alpha: complex, omega: float, g0: float, Omega: float) -> InfluenceFunction:
    return InfluenceFunction(
        lambda p, d, t: influence_coherent(p, d, t, alpha, omega, g0, Omega),
        model="coherent",
    )


def unit_influence() -> InfluenceFunction:
    """F = 1: a decoupled environment (free evolution)."""
    return InfluenceFunction(
        lambda p, d, t: np.ones_like(np.asarray(p, dtype=complex)), model="free"
    )


# --------------------------------------------------------------------------
# quadrature of the general formula
# --------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _p_nodes(p_half: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [-P, P] with ~n nodes total."""
    panels = max(4, int(math.ceil(p_half / 2.0)))
    per_panel = max(8, int(math.ceil(n / panels)))
    base_x, base_w = _gauss_legendre(per_panel)
    edges = np.linspace(-p_half, p_half, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


def _resolve_window(chi: CharacteristicFunction, f: InfluenceFunction, delta, t: float) -> float:
    """Start at P = 8 sigma and double until the integrand envelope at the
    boundary falls below 1e-12."""
    p_half = 8.0 * chi.gaussian_decay_scale
    dmax = float(np.max(np.abs(delta)))
    for _ in range(16):
        edge = np.array([-p_half, p_half])
        mag = np.abs(chi(-dmax + 1j * edge) * f(edge, dmax, t))
        if float(np.max(mag)) < 1e-12:
            return p_half
        p_half *= 2.0
    raise QuadratureError("integration window did not close (integrand tail too heavy)", math.inf)


def matrix_elements_general(
    chi: CharacteristicFunction,
    influence: InfluenceFunction,
    x: float,
    x_prime: float,
    t: float,
    kappa: float,
    Omega: float,
    return_error: bool = False,
):
    """Position matrix element rho_t(x, x') by adaptive quadrature [1/m].

    x and x' are physical positions; Delta and xi_plus are formed with
    xi = sqrt(kappa) x. The integrand's characteristic-function argument
    is beta = -Delta + i p rotated forward, chi(e^{+i Omega t} beta).
    Node counts double until two successive refinements agree; the
    returned error estimate is that last refinement difference (times the
    physical prefactor).
    """
    xi = math.sqrt(kappa) * x
    xi_p = math.sqrt(kappa) * x_prime
    delta = xi - xi_p
    xi_plus = xi + xi_p
    rot = complex(math.cos(Omega * t), math.sin(Omega * t))

    p_half = _resolve_window(chi, influence, delta, t)

    def integral(n_nodes: int) -> complex:
        p, w = _p_nodes(p_half, n_nodes)
        vals = (
            chi(rot * (-delta + 1j * p))
            * influence(p, delta, t)
            * np.exp(-1j * xi_plus * p)
        )
        return complex(np.sum(w * vals))

    scale = math.sqrt(2.0 * math.pi)  # magnitude of the free diagonal integral
    prev = integral(64)
    err = math.inf
    n = 128
    while n <= 8192:
        cur = integral(n)
        err = abs(cur - prev)
        if err <= 1e-10 * scale:
            prev = cur
            break
        prev = cur
        n *= 2
    else:
        raise QuadratureError(
            f"p-quadrature did not converge: last refinement changed by {err:.3e}",
            err,
        )

    prefactor = math.sqrt(kappa) / math.pi
    value = prefactor * prev
    if return_error:
        return value, prefactor * err
    return value


def matrix_elements_grid(
    chi: CharacteristicFunction,
    influence: InfluenceFunction,
    grid: PositionGrid,
    t: float,
    Omega: float,
    n_nodes: int = 256,
    xiplus_abs_max: float | None = None,
) -> tuple[np.ndarray, float]:
    """Full rho_t(x_i, x_j) matrix on a grid, vectorized [1/m].

    The integrand depends on (i, j) only through Delta_ij and xi_plus_ij,
    so the p-dependent factor is evaluated once per distinct Delta and the
    Fourier phase is applied as a matrix product. Returns the matrix and a
    global error estimate from one node-count doubling.

    `xiplus_abs_max` restricts the computation to the anti-diagonal band
    |xi + xi'| <= bound; entries outside the band are returned as exact
    zeros. Wide grids with far-separated state branches need this: the
    excluded entries pair a fast Fourier phase with node counts sized for
    the band, and would otherwise dominate the error estimate while being
    irrelevant to coherence-decay analysis.
    """
    xi = grid.points
    delta_mat = xi[:, None] - xi[None, :]
    xiplus_mat = xi[:, None] + xi[None, :]
    if xiplus_abs_max is None:
        band = np.ones(delta_mat.shape, dtype=bool)
    else:
        band = np.abs(xiplus_mat) <= xiplus_abs_max

    def _dedup(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        scale = max(1.0, float(np.max(np.abs(values))))
        keys = np.round(values / (1e-9 * scale)).astype(np.int64)
        uniq_keys, inverse = np.unique(keys, return_inverse=True)
        uniq = np.empty(uniq_keys.size)
        uniq[inverse] = values
        return uniq, inverse

    uniq_delta, d_inv = _dedup(delta_mat[band])
    uniq_xp, xp_inv = _dedup(xiplus_mat[band])

    rot = complex(math.cos(Omega * t), math.sin(Omega * t))
    p_half = _resolve_window(chi, influence, np.abs(uniq_delta), t)

    def transform(n: int) -> np.ndarray:
        p, w = _p_nodes(p_half, n)
        # (n_delta, n_p) integrand without the Fourier phase
        f_vals = influence(p[None, :], uniq_delta[:, None], t)
        chi_vals = chi(rot * (-uniq_delta[:, None] + 1j * p[None, :]))
        kernel = chi_vals * f_vals * w[None, :]
        phases = np.exp(-1j * np.outer(p, uniq_xp))  # (n_p, n_xp)
        return kernel @ phases  # (n_delta, n_xp)

    coarse = transform(n_nodes)
    fine = transform(2 * n_nodes)
    err = float(np.max(np.abs(fine - coarse)))
    prefactor = math.sqrt(grid.kappa) / math.pi
    scale = math.sqrt(2.0 * math.pi)
    if err > 1e-8 * scale:
        raise QuadratureError(
            f"grid quadrature did not converge: refinement changed by {err:.3e}", err
        )
    rho = np.zeros(delta_mat.shape, dtype=complex)
    rho[band] = prefactor * fine[d_inv, xp_inv]
    return rho, prefactor * err
