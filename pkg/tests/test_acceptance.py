"""Acceptance gate: every criterion at its stated tolerance, one printed
pass/fail line per criterion. Run with `pytest -s tests/test_acceptance.py`
to see the lines as they execute."""

import json
import math
import time

import numpy as np
import pytest

from gravidec import (
    CODATA2018,
    CoherentSingleMode,
    FockProduct,
    ThermalSingleMode,
    TruncationPolicy,
    brute_force_joint_state,
    build_total_hamiltonian,
    chi_of_state,
    coherent_influence,
    conditional_displacement_reduced,
    energy_distribution,
    energy_distribution_from_matrix,
    environment_initial_state,
    environment_state,
    fock_to_position,
    gamma_coherent,
    gamma_highT,
    gamma_single_thermal_mode,
    matrix_elements_grid,
    partial_trace,
    thermal_exact_influence,
)
from gravidec.cli import main
from gravidec.config import initial_density
from gravidec.dynamics_exact import phase_operator_diag

from conftest import (
    G0_REF,
    LCOH_REF_1E20K,
    REF_OMEGA,
    natural_grid,
    reference_spec,
    temperature_for,
)
from test_decoherence import _extraction_case

PERIOD = 2.0 * math.pi / REF_OMEGA


def report(name: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"{name}: {detail}"


def test_coupling_reproduction(tmp_path, capsys):
    cfg = tmp_path / "ref.json"
    cfg.write_text(
        json.dumps(
            {
                "experiment": {
                    "mass_kg": 10.0,
                    "omega_rad_s": REF_OMEGA,
                    "r_m": 0.25,
                    "environment": {
                        "type": "thermal_multimode",
                        "T_K": 1e20,
                        "mode_freqs_rad_s": [REF_OMEGA],
                    },
                }
            }
        )
    )
    start = time.perf_counter()
    code = main(["coupling", "--config", str(cfg)])
    elapsed = time.perf_counter() - start
    record = json.loads(capsys.readouterr().out)
    rel = abs(record["g0"] / 3.55e-44 - 1.0)
    with capsys.disabled():
        report(
            "coupling-reproduction",
            code == 0 and rel <= 0.01 and elapsed < 1.0,
            f"g0 = {record['g0']:.6e}, vs 3.55e-44 rel {rel:.2e}, {elapsed:.2f} s",
        )


def test_coherence_length_headline(tmp_path, capsys):
    cfg = tmp_path / "ref.json"
    cfg.write_text(
        json.dumps(
            {
                "experiment": {
                    "mass_kg": 10.0,
                    "omega_rad_s": REF_OMEGA,
                    "r_m": 0.25,
                    "environment": {
                        "type": "thermal_multimode",
                        "T_K": 1e20,
                        "mode_freqs_rad_s": [REF_OMEGA],
                    },
                }
            }
        )
    )
    start = time.perf_counter()
    code = main(["lcoh", "--config", str(cfg)])
    elapsed = time.perf_counter() - start
    record = json.loads(capsys.readouterr().out)
    lam = record["lambda_coh_m"]
    rel = abs(lam / 1.52e-4 - 1.0)
    quoted_ratio = max(215e-6 / lam, lam / 215e-6)
    flagged = any("sqrt2" in f for f in record["validity_flags"])
    ok = (
        code == 0
        and rel <= 0.01
        and quoted_ratio <= 1.5
        and flagged
        and elapsed < 1.0
        and lam == pytest.approx(LCOH_REF_1E20K, rel=1e-10)
    )
    with capsys.disabled():
        report(
            "coherence-length-headline",
            ok,
            f"lambda = {lam:.6e} m, vs 1.52e-4 rel {rel:.2e}, "
            f"vs quoted 215 um factor {quoted_ratio:.3f}, sqrt2 flagged: {flagged}, {elapsed:.2f} s",
        )


def test_exact_solution_oracle(capsys):
    """Conditional-displacement route vs brute-force joint evolution across
    the fixture grid: g0 up to 0.1, thermal / coherent / Fock environments,
    dims (20, 8), 8 time points per period, Frobenius <= 1e-8."""
    start = time.perf_counter()
    policy = TruncationPolicy(20, 8)
    spec = reference_spec()
    envs = {
        "thermal": ThermalSingleMode(T=temperature_for(1.0, REF_OMEGA), omega=REF_OMEGA),
        "coherent": CoherentSingleMode(alpha=1.0, omega=REF_OMEGA),
        "fock": FockProduct(occupations=(3,), mode_freqs=(REF_OMEGA,)),
    }
    worst = 0.0
    cases = 0
    for env in envs.values():
        rho_e = environment_initial_state(env, policy)
        for g0 in (0.0, 1e-3, 5e-2, 1e-1):
            h = build_total_hamiltonian(spec, policy, g0=g0)
            dist = energy_distribution_from_matrix(rho_e, h.h_env_diag)
            for state in ({"kind": "ground"}, {"kind": "thermal", "nbar": 0.3}):
                rho_s = initial_density(state, 20)
                for k in range(1, 9):
                    t = k * PERIOD / 8.0
                    joint = brute_force_joint_state(h, rho_s, rho_e, t)
                    bf = partial_trace(joint, (20, 8), keep=0)
                    cf = conditional_displacement_reduced(rho_s, dist, g0, REF_OMEGA, t)
                    worst = max(worst, float(np.linalg.norm(bf.data - cf.data)))
                    cases += 1
    elapsed = time.perf_counter() - start
    with capsys.disabled():
        report(
            "exact-solution-oracle",
            worst <= 1e-8 and elapsed < 60.0,
            f"{cases} cases, worst Frobenius {worst:.3e}, {elapsed:.1f} s",
        )


def test_position_matrix_element_pipeline(capsys):
    """Quadrature route vs Fock route, pointwise 1e-6, toy thermal and
    coherent fixtures (natural units, omega = Omega = 1)."""
    omega = 1.0
    t = math.pi / (2.0 * omega)
    grid = natural_grid(xi_max=6.0, n=25)
    worst = 0.0

    # thermal fixture
    g0, bw = 1e-2, 1.0
    chi = chi_of_state("ground")
    infl = thermal_exact_influence([omega], beta=bw / omega, g0=g0, Omega=omega)
    rho_q, _ = matrix_elements_grid(chi, infl, grid, t, omega)
    env = ThermalSingleMode(T=temperature_for(bw, omega), omega=omega)
    dist = energy_distribution(env, 1e-9)
    rho_s = initial_density({"kind": "ground"}, 60)
    oracle = fock_to_position(
        conditional_displacement_reduced(rho_s, dist, g0, omega, t), grid
    )
    worst = max(worst, float(np.abs(rho_q - oracle).max()))

    # coherent fixture
    alpha = 1.2
    infl_c = coherent_influence(alpha, omega, g0=g0, Omega=omega)
    rho_qc, _ = matrix_elements_grid(chi, infl_c, grid, t, omega)
    dist_c = energy_distribution(CoherentSingleMode(alpha=alpha, omega=omega), 1e-12)
    oracle_c = fock_to_position(
        conditional_displacement_reduced(rho_s, dist_c, g0, omega, t), grid
    )
    worst = max(worst, float(np.abs(rho_qc - oracle_c).max()))

    with capsys.disabled():
        report(
            "position-matrix-element-pipeline",
            worst <= 1e-6,
            f"worst pointwise deviation {worst:.3e}",
        )


def test_decoherence_factor_validation(capsys):
    results = []
    for env_kind in ("highT", "single-mode", "coherent"):
        for g0 in (1e-3, 1e-2):
            res, analytic = _extraction_case(env_kind, g0)
            rel = abs(res.lambda_coh / analytic.lambda_coh - 1.0)
            results.append((env_kind, g0, rel))
    worst = max(r[2] for r in results)
    detail = ", ".join(f"{k}@g0={g:g}: {r:.3f}" for k, g, r in results)
    with capsys.disabled():
        report("decoherence-factor-validation", worst <= 0.05, detail)


def test_recoherence_and_invariance(capsys):
    policy = TruncationPolicy(20, 8)
    spec = reference_spec()
    env = ThermalSingleMode(T=temperature_for(1.0, REF_OMEGA), omega=REF_OMEGA)
    rho_e = environment_initial_state(env, policy)
    h = build_total_hamiltonian(spec, policy, g0=5e-2)
    dist = energy_distribution_from_matrix(rho_e, h.h_env_diag)
    rho_s = initial_density({"kind": "ground"}, 20)

    p0 = conditional_displacement_reduced(rho_s, dist, 5e-2, REF_OMEGA, 0.0).purity()
    p_end = conditional_displacement_reduced(rho_s, dist, 5e-2, REF_OMEGA, PERIOD).purity()
    purity_err = abs(p_end - p0)

    env_err = 0.0
    for k in range(1, 9):
        out = environment_state(h, rho_s, rho_e, k * PERIOD / 8.0)
        env_err = max(env_err, float(np.linalg.norm(out.data - rho_e.data)))

    rng = np.random.default_rng(11)
    t = 0.37 * PERIOD
    phi = phase_operator_diag(h.h_env_diag, 5e-2, REF_OMEGA, t)
    dressed = np.exp(-1j * h.h_env_diag * t) * phi
    delta_err = 0.0
    dim = h.h_env_diag.size
    for _ in range(64):
        i, j = rng.integers(0, dim, size=2)
        outer = np.zeros((dim, dim), dtype=complex)
        outer[i, j] = 1.0
        value = complex(np.trace(dressed[:, None] * outer * dressed.conj()[None, :]))
        delta_err = max(delta_err, abs(value - (1.0 if i == j else 0.0)))

    ok = purity_err <= 1e-10 and env_err <= 1e-10 and delta_err <= 1e-12
    with capsys.disabled():
        report(
            "recoherence-and-invariance",
            ok,
            f"purity return {purity_err:.2e}, environment invariance {env_err:.2e}, "
            f"delta identity {delta_err:.2e}",
        )


def test_regime_limits(capsys):
    spec = reference_spec()
    worst_margin = 0.0
    for bw in (1e-3, 3e-3, 9e-3):
        T = temperature_for(bw, REF_OMEGA)
        single = gamma_single_thermal_mode(spec, REF_OMEGA, T)
        high = gamma_highT(spec, N=1, T=T)
        rel = abs(single.lambda_coh / high.lambda_coh - 1.0)
        worst_margin = max(worst_margin, rel / (10.0 * bw))
    single_ok = worst_margin < 1.0

    r1 = gamma_coherent(spec, alpha=1.0, omega=REF_OMEGA)
    r2 = gamma_coherent(spec, alpha=2.0, omega=REF_OMEGA)
    halving = r2.lambda_coh / r1.lambda_coh
    coherent_ok = abs(halving - 0.5) < 1e-12

    with capsys.disabled():
        report(
            "regime-limits",
            single_ok and coherent_ok,
            f"single-mode vs high-T margin {worst_margin:.3f} of bound, "
            f"lambda(2a)/lambda(a) = {halving:.15f}",
        )
