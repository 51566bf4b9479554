"""Scenario configuration: JSON schema, validation, initial states, hashing.

A scenario is a single JSON file (no includes):

    {
      "schema_version": 1,
      "experiment": {"mass_kg": ..., "omega_rad_s": ..., "r_m": ...,
                     "environment": {"type": ..., ...}},
      "initial_state": {"kind": "ground" | "coherent" | "thermal" | "fock" | "cat",
                        ... per-kind parameters ...},
      "truncation": {"dim_system": 20, "dim_per_env_mode": 8,
                     "tail_epsilon": 1e-9},
      "grid": {"xi_max": 8.0, "points": 801},
      "time_samples_s": [...],
      "coupling_override": {"g0": ...},          # optional, toy couplings
      "gamma": {"delta_x_m": [...], "t_s": ...}, # optional, cmd_gamma inputs
      "verify": {"corrupt": "g0_sign"}           # optional, negative control
    }

The params_hash embedded in every output is the SHA-256 of the canonical
(sorted-keys, compact) JSON of the configuration, truncated to 12 hex
digits, so byte-identical outputs certify identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError
from .fockspace import DensityMatrix, PositionGrid, TruncationPolicy
from .physmodel import ExperimentSpec, experiment_from_dict
from .reduced_analytic import CharacteristicFunction, chi_of_state

SCHEMA_VERSION = 1

STATE_KINDS = ("ground", "coherent", "thermal", "fock", "cat")


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: ExperimentSpec
    initial_state: dict
    truncation: TruncationPolicy
    grid_xi_max: float
    grid_points: int
    time_samples: tuple[float, ...]
    g0_override: float | None
    gamma_delta_x: tuple[float, ...]
    gamma_t: float | None
    verify_corrupt: str | None
    raw: dict = field(repr=False)

    def params_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]

    def position_grid(self, kappa: float) -> PositionGrid:
        return PositionGrid.uniform(kappa, xi_max=self.grid_xi_max, n=self.grid_points)


def _validate_state(d: dict) -> dict:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("initial_state must be an object with a 'kind' field")
    kind = d["kind"]
    if kind not in STATE_KINDS:
        raise ConfigError(f"unknown initial_state kind {kind!r}; expected one of {STATE_KINDS}")
    if kind == "coherent" and "mu_re" not in d and "mu_im" not in d:
        raise ConfigError("coherent initial_state needs mu_re and/or mu_im")
    if kind == "thermal" and float(d.get("nbar", -1.0)) < 0.0:
        raise ConfigError("thermal initial_state needs nbar >= 0")
    if kind == "fock" and int(d.get("n", -1)) < 0:
        raise ConfigError("fock initial_state needs n >= 0")
    if kind == "cat" and "mu_re" not in d and "mu_im" not in d:
        raise ConfigError("cat initial_state needs mu_re and/or mu_im")
    return d


def parse_config(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    if "experiment" not in raw:
        raise ConfigError("configuration is missing 'experiment'")
    experiment = experiment_from_dict(raw["experiment"])

    state = _validate_state(raw.get("initial_state", {"kind": "ground"}))

    tr = raw.get("truncation", {})
    try:
        truncation = TruncationPolicy(
            dim_system=int(tr.get("dim_system", 20)),
            dim_per_env_mode=int(tr.get("dim_per_env_mode", 8)),
            tail_epsilon=float(tr.get("tail_epsilon", 1e-9)),
        )
    except DomainError as exc:
        raise ConfigError(f"invalid truncation: {exc}") from None

    gr = raw.get("grid", {})
    xi_max = float(gr.get("xi_max", 8.0))
    points = int(gr.get("points", 801))
    if not (xi_max > 0.0 and points >= 2):
        raise ConfigError("grid needs xi_max > 0 and points >= 2")

    times = tuple(float(t) for t in raw.get("time_samples_s", []))
    if any(t < 0.0 for t in times):
        raise ConfigError("time samples must be non-negative")

    override = raw.get("coupling_override")
    g0_override = None
    if override is not None:
        if not isinstance(override, dict) or "g0" not in override:
            raise ConfigError("coupling_override must be an object with field 'g0'")
        g0_override = float(override["g0"])

    gamma = raw.get("gamma", {})
    gamma_dx = tuple(float(v) for v in gamma.get("delta_x_m", []))
    gamma_t = float(gamma["t_s"]) if "t_s" in gamma else None

    verify = raw.get("verify", {})
    corrupt = verify.get("corrupt") if isinstance(verify, dict) else None
    if corrupt not in (None, "g0_sign"):
        raise ConfigError(f"unknown verify.corrupt value {corrupt!r}")

    return ScenarioConfig(
        experiment=experiment,
        initial_state=state,
        truncation=truncation,
        grid_xi_max=xi_max,
        grid_points=points,
        time_samples=times,
        g0_override=g0_override,
        gamma_delta_x=gamma_dx,
        gamma_t=gamma_t,
        verify_corrupt=corrupt,
        raw=raw,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from None
    return parse_config(raw)


# --------------------------------------------------------------------------
# initial oscillator states
# --------------------------------------------------------------------------

def _state_mu(state: dict) -> complex:
    return complex(float(state.get("mu_re", 0.0)), float(state.get("mu_im", 0.0)))


def initial_chi(state: dict) -> CharacteristicFunction:
    """Characteristic function of the configured initial oscillator state."""
    kind = state["kind"]
    if kind == "ground":
        return chi_of_state("ground")
    if kind == "coherent":
        return chi_of_state("coherent", mu=_state_mu(state))
    if kind == "thermal":
        return chi_of_state("thermal", nbar=float(state["nbar"]))
    if kind == "fock":
        return chi_of_state("fock", n=int(state["n"]))
    if kind == "cat":
        return chi_of_state("cat", mu=_state_mu(state), phase=float(state.get("phase", 0.0)))
    raise ConfigError(f"unknown initial_state kind {kind!r}")


def initial_density(state: dict, dim: int) -> DensityMatrix:
    """Truncated Fock-basis density matrix of the configured initial state."""
    from scipy.special import gammaln

    kind = state["kind"]
    if kind == "ground":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return DensityMatrix(dim, rho)
    if kind in ("coherent", "cat"):
        mu = _state_mu(state)
        ns = np.arange(dim)
        if mu == 0:
            vec = np.zeros(dim, dtype=complex)
            vec[0] = 1.0
        else:
            vec = np.exp(-0.5 * abs(mu) ** 2 + ns * np.log(complex(mu)) - 0.5 * gammaln(ns + 1.0))
        if kind == "coherent":
            rho = np.outer(vec, vec.conj())
            return DensityMatrix(dim, rho, tail_mass=1.0 - float(np.vdot(vec, vec).real))
        phase = float(state.get("phase", 0.0))
        if mu == 0:
            vec_m = vec
        else:
            vec_m = np.exp(
                -0.5 * abs(mu) ** 2 + ns * np.log(complex(-mu)) - 0.5 * gammaln(ns + 1.0)
            )
        eip = complex(math.cos(phase), math.sin(phase))
        cat = vec + eip * vec_m
        norm2 = 2.0 * (1.0 + math.cos(phase) * math.exp(-2.0 * abs(mu) ** 2))
        rho = np.outer(cat, cat.conj()) / norm2
        return DensityMatrix(dim, rho, tail_mass=1.0 - float(np.trace(rho).real))
    if kind == "thermal":
        nbar = float(state["nbar"])
        if nbar == 0.0:
            rho = np.zeros((dim, dim), dtype=complex)
            rho[0, 0] = 1.0
            return DensityMatrix(dim, rho)
        ratio = nbar / (1.0 + nbar)
        diag = (1.0 - ratio) * ratio ** np.arange(dim)
        return DensityMatrix(dim, np.diag(diag.astype(complex)), tail_mass=1.0 - float(diag.sum()))
    if kind == "fock":
        n = int(state["n"])
        if n >= dim:
            raise ConfigError(f"fock level {n} does not fit truncation dimension {dim}")
        rho = np.zeros((dim, dim), dtype=complex)
        rho[n, n] = 1.0
        return DensityMatrix(dim, rho)
    raise ConfigError(f"unknown initial_state kind {kind!r}")
