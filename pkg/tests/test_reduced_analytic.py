import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravidec import (
    CODATA2018,
    DensityMatrix,
    DomainError,
    PositionGrid,
    ThermalSingleMode,
    chi_of_state,
    coherent_influence,
    conditional_displacement_reduced,
    displacement,
    energy_distribution,
    fock_to_position,
    influence_coherent,
    influence_single_thermal_mode,
    influence_thermal_exact,
    influence_thermal_highT,
    matrix_elements_general,
    matrix_elements_grid,
    single_thermal_mode_influence,
    thermal_exact_influence,
    unit_influence,
)
from gravidec.config import initial_density
from gravidec.physmodel import gamma12

from conftest import natural_grid, temperature_for

OMEGA = 1.0  # natural units throughout this module


# --------------------------------------------------------------------------
# characteristic functions
# --------------------------------------------------------------------------

def chi_from_fock(rho: DensityMatrix, beta: complex) -> complex:
    """Independent oracle: chi(beta) = Tr[D(beta) rho] in a truncated space."""
    d = displacement(beta, rho.dim)
    return complex(np.trace(d.data @ rho.data))


class TestChiOfState:
    def test_ground_values(self):
        chi = chi_of_state("ground")
        assert chi(0.0) == pytest.approx(1.0)
        assert chi(1.0) == pytest.approx(math.exp(-0.5), rel=1e-14)
        assert chi(1j) == pytest.approx(math.exp(-0.5), rel=1e-14)

    def test_fock1_zero_crossing(self):
        chi = chi_of_state("fock", n=1)
        # e^{-1/2} L_1(1) = 0 at |eta|^2 = 1
        assert abs(chi(1.0)) < 1e-14
        rho = initial_density({"kind": "fock", "n": 1}, 30)
        assert abs(chi_from_fock(rho, 1.0 + 0.0j)) < 1e-10

    @pytest.mark.parametrize(
        "state",
        [
            {"kind": "ground"},
            {"kind": "coherent", "mu_re": 0.7, "mu_im": -0.3},
            {"kind": "thermal", "nbar": 0.8},
            {"kind": "fock", "n": 2},
            {"kind": "cat", "mu_re": 1.1, "mu_im": 0.0, "phase": 0.4},
        ],
    )
    def test_matches_truncated_fock_trace(self, state, rng):
        kind = state["kind"]
        kwargs = {}
        if kind == "coherent" or kind == "cat":
            kwargs["mu"] = complex(state.get("mu_re", 0.0), state.get("mu_im", 0.0))
        if kind == "cat":
            kwargs["phase"] = state.get("phase", 0.0)
        if kind == "thermal":
            kwargs["nbar"] = state["nbar"]
        if kind == "fock":
            kwargs["n"] = state["n"]
        chi = chi_of_state(kind, **kwargs)
        rho = initial_density(state, 45)
        for _ in range(6):
            beta = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            assert chi(beta) == pytest.approx(chi_from_fock(rho, beta), abs=2e-8)

    @pytest.mark.parametrize(
        "kind,kwargs",
        [
            ("ground", {}),
            ("coherent", {"mu": 0.5 - 0.2j}),
            ("thermal", {"nbar": 1.3}),
            ("fock", {"n": 3}),
            ("cat", {"mu": 0.9j, "phase": 1.1}),
        ],
    )
    def test_hermiticity_property(self, kind, kwargs, rng):
        chi = chi_of_state(kind, **kwargs)
        assert chi(0.0) == pytest.approx(1.0, abs=1e-12)
        for _ in range(10):
            beta = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            assert chi(-beta) == pytest.approx(np.conj(chi(beta)), abs=1e-12)

    def test_unknown_descriptor(self):
        with pytest.raises(DomainError):
            chi_of_state("squeezed")

    def test_cat_far_branches_stay_finite(self):
        chi = chi_of_state("cat", mu=200.0j)
        vals = chi(np.array([-400.0 + 1j, 0.0 + 0.0j, 400.0 - 2j]))
        assert np.all(np.isfinite(vals))


# --------------------------------------------------------------------------
# influence functions vs direct-sum oracles
# --------------------------------------------------------------------------

def direct_sum_oracle(ps, es, p, delta, t, g0, Omega):
    """F = sum_E p(E) exp{2iE[gamma1 p + gamma2 delta]} summed directly."""
    g1, g2 = gamma12(g0, Omega, t)
    u = g1 * p + g2 * delta
    return complex(np.sum(ps * np.exp(2j * es * u)))


class TestThermalExact:
    def test_unity_at_origin(self):
        assert influence_thermal_exact(0.0, 0.0, 0.7, [1.0, 2.0], 1.0, 0.1, OMEGA) == pytest.approx(1.0)

    def test_unity_at_zero_coupling(self, rng):
        for _ in range(5):
            p, d, t = rng.uniform(-3, 3, size=3)
            val = influence_thermal_exact(p, d, t, [1.0, 1.0], 0.8, 0.0, OMEGA)
            assert val == pytest.approx(1.0)

    def test_direct_summation_oracle(self, rng):
        beta, omega, g0 = 1.0, 1.0, 0.02
        # geometric weights truncated at tail 1e-14
        n_max = int(math.ceil(-math.log(1e-14) / (beta * omega)))
        ns = np.arange(n_max + 1)
        ps = np.exp(-beta * omega * ns) * (1.0 - math.exp(-beta * omega))
        es = omega * ns
        for _ in range(10):
            p, d = rng.uniform(-3, 3, size=2)
            t = rng.uniform(0, 2 * math.pi)
            val = influence_thermal_exact(p, d, t, [omega], beta, g0, OMEGA)
            oracle = direct_sum_oracle(ps, es, p, d, t, g0, OMEGA)
            assert val == pytest.approx(oracle, abs=1e-10)

    def test_modulus_bounded_by_one(self, rng):
        for _ in range(50):
            p, d = rng.uniform(-20, 20, size=2)
            t = rng.uniform(0, 10)
            val = influence_thermal_exact(p, d, t, [1.0, 2.0, 3.3], 0.5, 0.3, OMEGA)
            assert abs(val) <= 1.0 + 1e-12

    def test_multimode_is_product_of_factors(self, rng):
        p, d, t = 0.7, -1.1, 0.9
        one = influence_thermal_exact(p, d, t, [1.3], 0.7, 0.05, OMEGA)
        two = influence_thermal_exact(p, d, t, [2.1], 0.7, 0.05, OMEGA)
        both = influence_thermal_exact(p, d, t, [1.3, 2.1], 0.7, 0.05, OMEGA)
        assert both == pytest.approx(one * two, rel=1e-12)

    def test_deep_quantum_limit_is_unity(self):
        # beta*omega ~ 1000: the mode is frozen in its ground state
        val = influence_thermal_exact(1.2, -0.4, 0.8, [1.0], 1000.0, 0.05, OMEGA)
        assert val == pytest.approx(1.0, abs=1e-12)
        approx = influence_single_thermal_mode(1.2, -0.4, 0.8, 1.0, 1000.0, 0.05, OMEGA)
        assert approx == pytest.approx(1.0, abs=1e-12)


class TestThermalHighT:
    def test_unity_at_origin(self):
        assert influence_thermal_highT(0.0, 0.0, 0.3, 2, 1.0, 0.1, OMEGA) == pytest.approx(1.0)

    def test_against_exact_product_small_arguments(self, rng):
        # one k-mode (2 polarization factors), beta*omega = 1e-3
        beta_omega, omega = 1e-3, 1.0
        beta = beta_omega / omega
        g0 = 2e-7  # keeps |u|/beta ~ 1e-3
        for _ in range(10):
            p, d = rng.uniform(-2, 2, size=2)
            t = rng.uniform(0, 2 * math.pi)
            approx = influence_thermal_highT(p, d, t, 1, beta, g0, OMEGA)
            exact = influence_thermal_exact(p, d, t, [omega, omega], beta, g0, OMEGA)
            assert approx == pytest.approx(exact, rel=1e-4)

    def test_real_part_is_second_order(self, rng):
        n, beta, g0 = 3, 0.7, 0.05
        for _ in range(20):
            p, d = rng.uniform(-2, 2, size=2)
            t = rng.uniform(0, 5)
            g1, g2 = gamma12(g0, OMEGA, t)
            u = g1 * p + g2 * d
            f = influence_thermal_highT(p, d, t, n, beta, g0, OMEGA)
            bound = (4.0 * n * (n + 1) / beta**2) * u**2 * (1.0 + 1e-12)
            assert abs((f - 1.0).real) <= bound


class TestSingleThermalMode:
    def test_unity_at_origin(self):
        assert influence_single_thermal_mode(0.0, 0.0, 0.4, 2.0, 0.9, 0.1, OMEGA) == pytest.approx(1.0)

    def test_coefficients_approach_highT_per_factor_limit(self):
        # beta*omega -> 0: 2 i omega/(e^{b w}-1) -> 2i/beta and the quadratic
        # coefficient -> 4/beta^2, each within relative 1e-3 at b w = 1e-3
        omega, bw = 1.0, 1e-3
        beta = bw / omega
        c1 = 2.0 * omega / math.expm1(bw)
        assert c1 == pytest.approx(2.0 / beta, rel=1e-3)
        c2 = 2.0 * omega**2 * (1.0 + math.exp(bw)) / math.expm1(bw) ** 2
        assert c2 == pytest.approx(4.0 / beta**2, rel=1e-3)

    def test_against_exact_single_factor(self, rng):
        # g0 * omega / Omega <= 1e-3
        omega, beta, g0 = 1.0, 1.0, 1e-3
        for _ in range(10):
            p, d = rng.uniform(-3, 3, size=2)
            t = rng.uniform(0, 2 * math.pi)
            approx = influence_single_thermal_mode(p, d, t, omega, beta, g0, OMEGA)
            exact = influence_thermal_exact(p, d, t, [omega], beta, g0, OMEGA)
            assert approx == pytest.approx(exact, rel=1e-4)


class TestCoherentInfluence:
    def test_vacuum_environment(self, rng):
        for _ in range(5):
            p, d, t = rng.uniform(-2, 2, size=3)
            assert influence_coherent(p, d, t, 0.0, 1.0, 0.1, OMEGA) == pytest.approx(1.0)

    def test_unity_at_origin(self):
        assert influence_coherent(0.0, 0.0, 0.8, 1.5, 2.0, 0.1, OMEGA) == pytest.approx(1.0)

    def test_direct_poisson_sum_oracle(self, rng):
        alpha, omega, g0 = 1.4, 1.0, 0.05
        nbar = abs(alpha) ** 2
        # Poisson weights truncated at tail 1e-14
        probs, cum, n, term = [], 0.0, 0, math.exp(-nbar)
        while 1.0 - cum > 1e-14:
            probs.append(term)
            cum += term
            n += 1
            term *= nbar / n
        ps = np.asarray(probs)
        es = omega * np.arange(ps.size)
        for _ in range(10):
            p, d = rng.uniform(-3, 3, size=2)
            t = rng.uniform(0, 2 * math.pi)
            val = influence_coherent(p, d, t, alpha, omega, g0, OMEGA)
            oracle = direct_sum_oracle(ps, es, p, d, t, g0, OMEGA)
            assert val == pytest.approx(oracle, abs=1e-10)


# --------------------------------------------------------------------------
# position matrix elements: quadrature vs Fock-route oracles
# --------------------------------------------------------------------------

class TestMatrixElementsFreeEvolution:
    def test_ground_state_t0_pointwise(self):
        chi = chi_of_state("ground")
        grid = natural_grid(xi_max=4.0, n=17)
        rho = initial_density({"kind": "ground"}, 30)
        oracle = fock_to_position(rho, grid)
        for i in (0, 5, 8, 12):
            for j in (3, 8, 16):
                val = matrix_elements_general(
                    chi, unit_influence(), grid.points[i], grid.points[j], 0.0, 1.0, OMEGA
                )
                assert val == pytest.approx(oracle[i, j], abs=1e-8)

    @pytest.mark.parametrize("t", [0.0, 0.4, 1.7, 3.9])
    def test_coherent_free_evolution(self, t):
        mu = 0.8 - 0.5j
        chi = chi_of_state("coherent", mu=mu)
        grid = natural_grid(xi_max=6.0, n=31)
        rho_q, err = matrix_elements_grid(chi, unit_influence(), grid, t, OMEGA)
        rho0 = initial_density({"kind": "coherent", "mu_re": mu.real, "mu_im": mu.imag}, 40)
        phases = np.exp(-1j * OMEGA * t * np.arange(40))
        rho_t = DensityMatrix(40, (phases[:, None] * rho0.data) * phases.conj()[None, :],
                              tail_mass=rho0.tail_mass)
        oracle = fock_to_position(rho_t, grid)
        assert np.abs(rho_q - oracle).max() < 1e-8

    def test_thermal_state_free_evolution(self):
        chi = chi_of_state("thermal", nbar=0.6)
        grid = natural_grid(xi_max=6.0, n=21)
        rho_q, _ = matrix_elements_grid(chi, unit_influence(), grid, 0.8, OMEGA)
        rho0 = initial_density({"kind": "thermal", "nbar": 0.6}, 50)
        phases = np.exp(-1j * OMEGA * 0.8 * np.arange(50))
        rho_t = DensityMatrix(50, (phases[:, None] * rho0.data) * phases.conj()[None, :],
                              tail_mass=rho0.tail_mass)
        oracle = fock_to_position(rho_t, grid)
        assert np.abs(rho_q - oracle).max() < 1e-8


class TestMatrixElementsPipeline:
    @pytest.mark.parametrize("state", [{"kind": "ground"}, {"kind": "coherent", "mu_re": 0.5}])
    def test_thermal_environment_vs_fock_route(self, state):
        """Quadrature route (exact thermal product influence) against the
        conditional-displacement route mapped to position space."""
        g0, bw = 1e-2, 1.0
        t = math.pi / (2.0 * OMEGA)
        grid = natural_grid(xi_max=6.0, n=25)
        chi = initial_chi_for(state)
        infl = thermal_exact_influence([OMEGA], beta=bw / OMEGA, g0=g0, Omega=OMEGA)
        rho_q, _ = matrix_elements_grid(chi, infl, grid, t, OMEGA)

        env = ThermalSingleMode(T=temperature_for(bw, OMEGA), omega=OMEGA)
        dist = energy_distribution(env, 1e-9)
        rho_s = initial_density(state, 60)
        rho_t = conditional_displacement_reduced(rho_s, dist, g0, OMEGA, t)
        oracle = fock_to_position(rho_t, grid)
        assert np.abs(rho_q - oracle).max() < 1e-6

    def test_coherent_environment_vs_fock_route(self):
        from gravidec import CoherentSingleMode

        g0, alpha = 1e-2, 1.2
        t = 0.7 * math.pi / OMEGA
        grid = natural_grid(xi_max=6.0, n=25)
        chi = chi_of_state("ground")
        infl = coherent_influence(alpha, OMEGA, g0=g0, Omega=OMEGA)
        rho_q, _ = matrix_elements_grid(chi, infl, grid, t, OMEGA)

        env = CoherentSingleMode(alpha=alpha, omega=OMEGA)
        dist = energy_distribution(env, 1e-12)
        rho_s = initial_density({"kind": "ground"}, 60)
        rho_t = conditional_displacement_reduced(rho_s, dist, g0, OMEGA, t)
        oracle = fock_to_position(rho_t, grid)
        assert np.abs(rho_q - oracle).max() < 1e-6

    def test_hermiticity(self):
        chi = chi_of_state("coherent", mu=0.4 + 0.3j)
        infl = thermal_exact_influence([OMEGA], beta=1.0, g0=0.05, Omega=OMEGA)
        t = 1.1
        for (x, xp) in ((0.3, -0.8), (1.2, 0.1), (-0.4, -1.5)):
            a = matrix_elements_general(chi, infl, x, xp, t, 1.0, OMEGA)
            b = matrix_elements_general(chi, infl, xp, x, t, 1.0, OMEGA)
            assert a == pytest.approx(np.conj(b), abs=1e-10)

    def test_diagonal_positive_and_normalized(self):
        chi = chi_of_state("ground")
        infl = thermal_exact_influence([OMEGA], beta=1.0, g0=0.05, Omega=OMEGA)
        grid = natural_grid(xi_max=8.0, n=161)
        rho, _ = matrix_elements_grid(chi, infl, grid, 0.9, OMEGA)
        diag = np.diag(rho)
        assert np.abs(diag.imag).max() < 1e-10
        assert diag.real.min() > -1e-8
        dx = grid.points[1] - grid.points[0]
        assert np.sum(diag.real) * dx == pytest.approx(1.0, abs=1e-4)

    def test_refinement_below_reported_estimate(self):
        """Halving the quadrature step changes the result by less than the
        reported error estimate."""
        chi = chi_of_state("coherent", mu=0.6)
        infl = coherent_influence(1.0, OMEGA, g0=0.02, Omega=OMEGA)
        grid = natural_grid(xi_max=5.0, n=15)
        # n = 96 sits where the truncation error (the reported estimate)
        # still dominates roundoff; larger n are at the roundoff floor
        cases = [(1.3, 96), (0.6, 128), (2.2, 256)]
        for t, n in cases:
            rho_n, err_n = matrix_elements_grid(chi, infl, grid, t, OMEGA, n_nodes=n)
            rho_2n, _ = matrix_elements_grid(chi, infl, grid, t, OMEGA, n_nodes=2 * n)
            # rho_n is the 2n-node transform, rho_2n the 4n-node one
            assert np.abs(rho_2n - rho_n).max() < max(err_n, 5e-14)

    def test_scalar_error_estimate(self):
        chi = chi_of_state("ground")
        val, err = matrix_elements_general(
            chi, unit_influence(), 0.2, -0.1, 0.5, 1.0, OMEGA, return_error=True
        )
        assert err >= 0.0
        assert abs(val) > 0.1


def initial_chi_for(state: dict):
    from gravidec.config import initial_chi

    return initial_chi(state)
