"""Command-line interface.

Subcommands: coupling | lcoh | gamma | evolve | verify | sweep.
Common flags: --config PATH (scenario JSON), --out DIR. `gamma` takes
--t SECONDS, `sweep` takes --sweep PATH. The environment variable
GRAVIDEC_THREADS bounds sweep parallelism (default: all cores).

Exit codes: 0 success, 1 verification failure, 2 configuration/schema
error, 3 regime or domain error.

All outputs are pure functions of (config, flags): JSON is emitted with
sorted keys, CSV with a header row, '.' decimals and 17-significant-digit
scientific notation, and every record embeds the params_hash of the
configuration, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dynamics_exact as dyn
from .config import ScenarioConfig, initial_density, load_config, parse_config
from .constants import CODATA2018
from .decoherence import (
    DecoherenceResult,
    gamma_coherent,
    gamma_highT,
    gamma_single_thermal_mode,
)
from .errors import ConfigError, DomainError, RegimeError
from .fockspace import DensityMatrix, TruncationPolicy, fock_to_position, partial_trace
from .physmodel import (
    CoherentSingleMode,
    FockProduct,
    ThermalMultimode,
    ThermalSingleMode,
    coupling_g0,
)

SCHEMA_VERSION = 1


def _fmt(value: float) -> str:
    return f"{value:.16e}"


def _write_csv(path_or_none, header: list[str], rows: list[list], out_name: str) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path_or_none is None:
        sys.stdout.write(text)
    else:
        target = Path(path_or_none) / out_name
        target.write_text(text)


def _emit_json(record: dict, out_dir, name: str) -> None:
    text = json.dumps(record, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if out_dir is not None:
        (Path(out_dir) / name).write_text(text)


def _worker_count() -> int:
    raw = os.environ.get("GRAVIDEC_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n >= 1:
            return n
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_coupling(cfg: ScenarioConfig, out_dir) -> int:
    params = coupling_g0(cfg.experiment)
    record = {
        "schema_version": SCHEMA_VERSION,
        "params_hash": cfg.params_hash(),
        "delta_phi_rad": params.delta_phi,
        "x_zpf_m": params.x_zpf,
        "g0": params.g0,
        "kappa_m2": params.kappa,
    }
    _emit_json(record, out_dir, "coupling.json")
    return 0


def _decoherence_result(cfg: ScenarioConfig) -> DecoherenceResult:
    env = cfg.experiment.environment
    if isinstance(env, ThermalMultimode):
        return gamma_highT(
            cfg.experiment, N=len(env.mode_freqs), T=env.T, g0_override=cfg.g0_override
        )
    if isinstance(env, ThermalSingleMode):
        return gamma_single_thermal_mode(
            cfg.experiment, omega=env.omega, T=env.T, g0_override=cfg.g0_override
        )
    if isinstance(env, CoherentSingleMode):
        if env.alpha == 0:
            raise RegimeError("no decoherence: |alpha| = 0")
        return gamma_coherent(
            cfg.experiment, alpha=env.alpha, omega=env.omega, g0_override=cfg.g0_override
        )
    if isinstance(env, FockProduct):
        raise RegimeError("no closed-form coherence length for a Fock-product environment")
    raise DomainError(f"unknown environment {type(env).__name__}")


def cmd_lcoh(cfg: ScenarioConfig, out_dir) -> int:
    result = _decoherence_result(cfg)
    record = {
        "schema_version": SCHEMA_VERSION,
        "params_hash": cfg.params_hash(),
        **result.to_json_dict(),
    }
    _emit_json(record, out_dir, "lcoh.json")
    return 0


def cmd_gamma(cfg: ScenarioConfig, t_flag: float | None, out_dir) -> int:
    t = t_flag if t_flag is not None else cfg.gamma_t
    if t is None:
        raise ConfigError("gamma needs --t or a gamma.t_s config entry")
    if not cfg.gamma_delta_x:
        raise ConfigError("gamma needs a non-empty gamma.delta_x_m list in the config")
    result = _decoherence_result(cfg)
    rows = [[dx, float(t), result.gamma_abs2(dx, t)] for dx in cfg.gamma_delta_x]
    _write_csv(out_dir, ["delta_x_m", "t_s", "gamma_abs2"], rows, "gamma.csv")
    return 0


def _evolved_states(cfg: ScenarioConfig) -> tuple[list[DensityMatrix], float]:
    spec = cfg.experiment
    g0 = cfg.g0_override if cfg.g0_override is not None else coupling_g0(spec).g0
    dist = dyn.energy_distribution(spec.environment, cfg.truncation.tail_epsilon)
    rho0 = initial_density(cfg.initial_state, cfg.truncation.dim_system)
    states = [
        dyn.conditional_displacement_reduced(rho0, dist, g0, spec.Omega, t)
        for t in cfg.time_samples
    ]
    return states, g0


def cmd_evolve(cfg: ScenarioConfig, out_dir) -> int:
    if out_dir is None:
        raise ConfigError("evolve needs --out DIR for its per-time matrix dumps")
    if not cfg.time_samples:
        raise ConfigError("evolve needs a non-empty time_samples_s list")
    spec = cfg.experiment
    kappa = coupling_g0(spec).kappa
    grid = cfg.position_grid(kappa)
    phash = cfg.params_hash()
    model = type(spec.environment).__name__
    states, _ = _evolved_states(cfg)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    purity_rows = []
    x = grid.x
    for idx, (t, rho_t) in enumerate(zip(cfg.time_samples, states)):
        rho_x = fock_to_position(rho_t, grid)
        rows = []
        for i in range(len(grid)):
            for j in range(len(grid)):
                v = rho_x[i, j]
                rows.append(
                    [float(x[i]), float(x[j]), float(v.real), float(v.imag),
                     float(abs(v) ** 2), float(t), model, phash]
                )
        _write_csv(out, ["x", "x_prime", "re", "im", "abs2", "t", "model", "params_hash"],
                   rows, f"rho_t{idx:03d}.csv")
        purity_rows.append([float(t), rho_t.purity(), rho_t.tail_mass])
    _write_csv(out, ["t_s", "purity", "tail_mass"], purity_rows, "purity.csv")
    return 0


# --------------------------------------------------------------------------
# verify: the oracle-equivalence and invariant suite
# --------------------------------------------------------------------------

VERIFY_G0_VALUES = (0.0, 1e-3, 5e-2, 1e-1)
VERIFY_TOL_FROBENIUS = 1e-8
VERIFY_TOL_PURITY = 1e-10
VERIFY_TOL_ENV = 1e-10
VERIFY_TOL_DELTA = 1e-12


def _verify_environments(cfg: ScenarioConfig):
    """Thermal / coherent / Fock toy environments at the trap frequency."""
    omega = cfg.experiment.Omega
    t_for_bw1 = CODATA2018.hbar * omega / CODATA2018.k_B  # beta*omega = 1
    return (
        ("thermal", ThermalSingleMode(T=t_for_bw1, omega=omega)),
        ("coherent", CoherentSingleMode(alpha=1.0, omega=omega)),
        ("fock", FockProduct(occupations=(3,), mode_freqs=(omega,))),
    )


def run_verification(cfg: ScenarioConfig) -> dict:
    """Brute-force vs closed-form equivalence plus the structural identities.

    The two routes share one truncated environment matrix, so the
    comparison isolates the solution itself from truncation choices.
    `verify.corrupt = "g0_sign"` flips the coupling sign in the
    closed-form route only; the suite must then fail, which is the
    negative control demonstrating its sensitivity.
    """
    spec = cfg.experiment
    omega_trap = spec.Omega
    dim_s = min(cfg.truncation.dim_system, 20)
    dim_e = min(cfg.truncation.dim_per_env_mode, 8)
    policy = TruncationPolicy(dim_s, dim_e, cfg.truncation.tail_epsilon)
    period = 2.0 * math.pi / omega_trap
    times = [period * k / 8.0 for k in range(1, 9)]
    corrupt = -1.0 if cfg.verify_corrupt == "g0_sign" else 1.0

    rho_s = initial_density({"kind": "ground"}, dim_s)
    cases = []

    for env_name, env in _verify_environments(cfg):
        rho_e = dyn.environment_initial_state(env, policy)
        for g0 in VERIFY_G0_VALUES:
            h = dyn.build_total_hamiltonian(spec, policy, g0=g0)
            dist = dyn.energy_distribution_from_matrix(rho_e, h.h_env_diag)
            worst = 0.0
            for t in times:
                joint = dyn.brute_force_joint_state(h, rho_s, rho_e, t)
                reduced_bf = partial_trace(joint, (h.dim_system, h.dim_env), keep=0)
                reduced_cf = dyn.conditional_displacement_reduced(
                    rho_s, dist, corrupt * g0, omega_trap, t
                )
                worst = max(
                    worst, float(np.linalg.norm(reduced_bf.data - reduced_cf.data))
                )
            cases.append(
                {
                    "name": f"oracle-equivalence/{env_name}/g0={g0:g}",
                    "error": worst,
                    "tolerance": VERIFY_TOL_FROBENIUS,
                    "pass": worst <= VERIFY_TOL_FROBENIUS,
                }
            )

    # purity recoherence at one full period (both ends through the same route,
    # so the recorded truncation tail scales out)
    env = _verify_environments(cfg)[0][1]
    rho_e = dyn.environment_initial_state(env, policy)
    h = dyn.build_total_hamiltonian(spec, policy, g0=0.05)
    dist = dyn.energy_distribution_from_matrix(rho_e, h.h_env_diag)
    p0 = dyn.conditional_displacement_reduced(rho_s, dist, 0.05, omega_trap, 0.0).purity()
    p_period = dyn.conditional_displacement_reduced(
        rho_s, dist, 0.05, omega_trap, period
    ).purity()
    err = abs(p_period - p0)
    cases.append(
        {
            "name": "purity-recoherence",
            "error": err,
            "tolerance": VERIFY_TOL_PURITY,
            "pass": err <= VERIFY_TOL_PURITY,
        }
    )

    # energy-diagonal environment invariance
    worst_env = 0.0
    for t in times:
        rho_e_t = dyn.environment_state(h, rho_s, rho_e, t)
        worst_env = max(worst_env, float(np.linalg.norm(rho_e_t.data - rho_e.data)))
    cases.append(
        {
            "name": "environment-invariance/thermal",
            "error": worst_env,
            "tolerance": VERIFY_TOL_ENV,
            "pass": worst_env <= VERIFY_TOL_ENV,
        }
    )

    # trace identity: Tr{e^{-iH_E t} Phi |E><E'| Phi^dag e^{iH_E t}} = delta_EE'
    rng = np.random.default_rng(7)
    h_diag = h.h_env_diag
    phi = dyn.phase_operator_diag(h_diag, 0.05, omega_trap, times[2])
    free = np.exp(-1j * h_diag * times[2])
    dressed = free * phi
    worst_delta = 0.0
    for _ in range(32):
        i, j = rng.integers(0, h_diag.size, size=2)
        outer = np.zeros((h_diag.size, h_diag.size), dtype=complex)
        outer[i, j] = 1.0
        sandwich = dressed[:, None] * outer * dressed.conj()[None, :]
        value = complex(np.trace(sandwich))
        expected = 1.0 if i == j else 0.0
        worst_delta = max(worst_delta, abs(value - expected))
    cases.append(
        {
            "name": "phase-operator-delta-identity",
            "error": worst_delta,
            "tolerance": VERIFY_TOL_DELTA,
            "pass": worst_delta <= VERIFY_TOL_DELTA,
        }
    )

    return {
        "schema_version": SCHEMA_VERSION,
        "params_hash": cfg.params_hash(),
        "cases": cases,
        "all_pass": all(c["pass"] for c in cases),
    }


def cmd_verify(cfg: ScenarioConfig, out_dir) -> int:
    report = run_verification(cfg)
    _emit_json(report, out_dir, "verify.json")
    return 0 if report["all_pass"] else 1


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

def _resolve_axis(raw: dict, axis: str):
    node = raw
    parts = axis.split(".")
    for key in parts[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"sweep axis {axis!r} does not exist in the configuration")
        node = node[key]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"sweep axis {axis!r} does not exist in the configuration")
    if not isinstance(node[leaf], (int, float)) or isinstance(node[leaf], bool):
        raise ConfigError(f"sweep axis {axis!r} is not a numeric leaf")
    return node, leaf


SWEEP_OUTPUTS = ("lambda_coh_m", "gamma_abs2", "purity_min")


def _sweep_point(raw: dict, axis: str, value: float, outputs, gamma_dx, gamma_t) -> list:
    raw_point = copy.deepcopy(raw)
    node, leaf = _resolve_axis(raw_point, axis)
    node[leaf] = value
    cfg = parse_config(raw_point)
    row: list = [axis, float(value)]
    for name in outputs:
        if name == "lambda_coh_m":
            row.append(_decoherence_result(cfg).lambda_coh)
        elif name == "gamma_abs2":
            dx = gamma_dx if gamma_dx is not None else (
                cfg.gamma_delta_x[0] if cfg.gamma_delta_x else None
            )
            t = gamma_t if gamma_t is not None else cfg.gamma_t
            if dx is None or t is None:
                raise ConfigError(
                    "sweep output gamma_abs2 needs gamma_delta_x_m and gamma_t_s "
                    "(in the sweep spec or the configuration)"
                )
            row.append(_decoherence_result(cfg).gamma_abs2(dx, t))
        elif name == "purity_min":
            if not cfg.time_samples:
                raise ConfigError("sweep output purity_min needs time_samples_s in the config")
            states, _ = _evolved_states(cfg)
            row.append(min(s.purity() for s in states))
        else:
            raise ConfigError(f"unknown sweep output {name!r}; expected one of {SWEEP_OUTPUTS}")
    return row


def cmd_sweep(cfg: ScenarioConfig, sweep_path: str, out_dir) -> int:
    try:
        sweep = json.loads(Path(sweep_path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"sweep file not found: {sweep_path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep file is not valid JSON: {exc}") from None
    if not isinstance(sweep, dict) or "axis" not in sweep or "values" not in sweep:
        raise ConfigError("sweep spec needs 'axis' and 'values'")
    axis = str(sweep["axis"])
    _resolve_axis(cfg.raw, axis)  # validate before spawning workers
    values = sorted(float(v) for v in sweep["values"])
    outputs = list(sweep.get("outputs", ["lambda_coh_m"]))
    gamma_dx = sweep.get("gamma_delta_x_m")
    gamma_t = sweep.get("gamma_t_s")

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        rows = list(
            pool.map(
                lambda v: _sweep_point(cfg.raw, axis, v, outputs, gamma_dx, gamma_t),
                values,
            )
        )
    _write_csv(out_dir, ["axis", "value", *outputs], rows, "sweep.csv")
    return 0


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravidec",
        description="Gravitational light-bending decoherence simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("coupling", "lcoh", "gamma", "evolve", "verify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory")
        if name == "gamma":
            p.add_argument("--t", type=float, default=None, help="evaluation time [s]")
        if name == "sweep":
            p.add_argument("--sweep", required=True, help="sweep spec JSON file")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "coupling":
            return cmd_coupling(cfg, args.out)
        if args.command == "lcoh":
            return cmd_lcoh(cfg, args.out)
        if args.command == "gamma":
            return cmd_gamma(cfg, args.t, args.out)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.sweep, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RegimeError, DomainError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
