"""Light-bending coupling between a trapped mass and quantized light.

A mass M, harmonically trapped at angular frequency Omega, sits at a mean
distance r from guided light. Bending of the light in the gravitational
field of the mass, linearized in the mass displacement and quantized,
couples the oscillator position to the field energy with the dimensionless
strength

    g0 = (4 G M / r^2 c^2) * sqrt(hbar / (2 M Omega))
       = delta_phi * x_zpf / r,

the product of the classical deflection angle delta_phi = 4GM/(r c^2) and
the zero-point length referenced to r. This module holds the experiment
and environment descriptions plus the handful of closed-form coupling
quantities everything else is built from.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

from .constants import CODATA2018, PhysicalConstants
from .errors import ConfigError, DomainError

__all__ = [
    "ThermalMultimode",
    "ThermalSingleMode",
    "CoherentSingleMode",
    "FockProduct",
    "EnvironmentSpec",
    "ExperimentSpec",
    "CouplingParams",
    "deflection_angle",
    "coupling_g0",
    "lambda_t",
    "gamma12",
    "environment_mode_freqs",
    "experiment_to_dict",
    "experiment_from_dict",
]


# --------------------------------------------------------------------------
# environment descriptions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThermalMultimode:
    """Thermal light in N field modes, each carrying `polarizations_per_mode`
    independent polarization factors (2 for free-space light)."""

    T: float                       # temperature [K]
    mode_freqs: tuple[float, ...]  # omega_k [rad/s]
    polarizations_per_mode: int = 2

    def __post_init__(self):
        if not self.T > 0.0:
            raise DomainError(f"temperature must be positive, got {self.T}")
        if len(self.mode_freqs) == 0:
            raise DomainError("at least one mode frequency required")
        if any(not w > 0.0 for w in self.mode_freqs):
            raise DomainError("all mode frequencies must be positive")
        if self.polarizations_per_mode < 1:
            raise DomainError("polarizations_per_mode must be >= 1")
        object.__setattr__(self, "mode_freqs", tuple(float(w) for w in self.mode_freqs))


@dataclass(frozen=True)
class ThermalSingleMode:
    """A single thermal (k, nu) factor."""

    T: float       # temperature [K]
    omega: float   # mode frequency [rad/s]

    def __post_init__(self):
        if not self.T > 0.0:
            raise DomainError(f"temperature must be positive, got {self.T}")
        if not self.omega > 0.0:
            raise DomainError(f"mode frequency must be positive, got {self.omega}")


@dataclass(frozen=True)
class CoherentSingleMode:
    """Single-mode coherent light of complex amplitude alpha."""

    alpha: complex
    omega: float   # mode frequency [rad/s]

    def __post_init__(self):
        if not self.omega > 0.0:
            raise DomainError(f"mode frequency must be positive, got {self.omega}")
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class FockProduct:
    """Definite occupation numbers per mode; used by the brute-force oracle."""

    occupations: tuple[int, ...]
    mode_freqs: tuple[float, ...]  # [rad/s], one per occupation entry

    def __post_init__(self):
        if len(self.occupations) != len(self.mode_freqs):
            raise DomainError("occupations and mode_freqs must have equal length")
        if any(n < 0 for n in self.occupations):
            raise DomainError("occupation numbers must be >= 0")
        if any(not w > 0.0 for w in self.mode_freqs):
            raise DomainError("all mode frequencies must be positive")
        object.__setattr__(self, "occupations", tuple(int(n) for n in self.occupations))
        object.__setattr__(self, "mode_freqs", tuple(float(w) for w in self.mode_freqs))


EnvironmentSpec = Union[ThermalMultimode, ThermalSingleMode, CoherentSingleMode, FockProduct]


def environment_mode_freqs(env: EnvironmentSpec) -> tuple[float, ...]:
    """Expand an environment into its flat list of (k, nu) factor frequencies."""
    if isinstance(env, ThermalMultimode):
        return tuple(w for w in env.mode_freqs for _ in range(env.polarizations_per_mode))
    if isinstance(env, ThermalSingleMode):
        return (env.omega,)
    if isinstance(env, CoherentSingleMode):
        return (env.omega,)
    if isinstance(env, FockProduct):
        return env.mode_freqs
    raise DomainError(f"unknown environment spec {type(env).__name__}")


# --------------------------------------------------------------------------
# experiment description
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    """Trapped mass and light geometry, SI units."""

    M: float                      # mass [kg]
    Omega: float                  # trap angular frequency [rad/s]
    r: float                      # mass-to-light mean distance [m]
    environment: EnvironmentSpec

    def __post_init__(self):
        if not self.M > 0.0:
            raise DomainError(f"mass must be positive, got {self.M}")
        if not self.Omega > 0.0:
            raise DomainError(f"trap frequency must be positive, got {self.Omega}")
        if not self.r > 0.0:
            raise DomainError(f"distance must be positive, got {self.r}")


@dataclass(frozen=True)
class CouplingParams:
    """Derived coupling quantities for an :class:`ExperimentSpec`."""

    delta_phi: float  # deflection angle [rad]
    x_zpf: float      # zero-point length [m]
    g0: float         # dimensionless coupling
    kappa: float      # M Omega / (2 hbar) [m^-2]; xi = sqrt(kappa) x


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def deflection_angle(M: float, r: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Classical light deflection angle 4GM/(r c^2) at distance r [rad].

    M = 0 is allowed and gives zero bending; negative masses and
    non-positive distances are rejected.
    """
    if M < 0.0:
        raise DomainError(f"mass must be non-negative, got {M}")
    if not r > 0.0:
        raise DomainError(f"distance must be positive, got {r}")
    return 4.0 * constants.G * M / (r * constants.c**2)


def coupling_g0(spec: ExperimentSpec, constants: PhysicalConstants = CODATA2018) -> CouplingParams:
    """Coupling parameters for an experiment.

    Evaluates the coupling through both algebraically equal forms,
    (4GM/r^2c^2) * x_zpf and delta_phi * x_zpf / r, and checks they agree
    to a relative 1e-12 as a guard against unit mistakes.
    """
    delta_phi = deflection_angle(spec.M, spec.r, constants)
    x_zpf = math.sqrt(constants.hbar / (2.0 * spec.M * spec.Omega))
    g0_direct = (4.0 * constants.G * spec.M / (spec.r**2 * constants.c**2)) * x_zpf
    g0 = delta_phi * x_zpf / spec.r
    if g0 != 0.0 and abs(g0 - g0_direct) > 1e-12 * abs(g0):
        raise AssertionError(
            f"the two forms of g0 disagree: {g0!r} vs {g0_direct!r}"
        )
    kappa = spec.M * spec.Omega / (2.0 * constants.hbar)
    return CouplingParams(delta_phi=delta_phi, x_zpf=x_zpf, g0=g0, kappa=kappa)


def lambda_t(g0: float, Omega: float, t: float) -> complex:
    """Conditional-displacement amplitude per unit environment energy,
    (g0/Omega)(e^{i Omega t} - 1). Returns to 0 at every full trap period."""
    if not Omega > 0.0:
        raise DomainError(f"trap frequency must be positive, got {Omega}")
    return (g0 / Omega) * (cmath.exp(1j * Omega * t) - 1.0)


def gamma12(g0: float, Omega: float, t: float) -> tuple[float, float]:
    """Real decomposition of the displacement amplitude:
    gamma1 = (g0/Omega)(1 - cos Omega t), gamma2 = (g0/Omega) sin Omega t,
    so that lambda(t) = -gamma1 + i gamma2."""
    if not Omega > 0.0:
        raise DomainError(f"trap frequency must be positive, got {Omega}")
    return (
        (g0 / Omega) * (1.0 - math.cos(Omega * t)),
        (g0 / Omega) * math.sin(Omega * t),
    )


# --------------------------------------------------------------------------
# JSON serialization (schema documented in the README)
# --------------------------------------------------------------------------

def _env_to_dict(env: EnvironmentSpec) -> dict:
    if isinstance(env, ThermalMultimode):
        return {
            "type": "thermal_multimode",
            "T_K": env.T,
            "mode_freqs_rad_s": list(env.mode_freqs),
            "polarizations_per_mode": env.polarizations_per_mode,
        }
    if isinstance(env, ThermalSingleMode):
        return {"type": "thermal_single_mode", "T_K": env.T, "omega_rad_s": env.omega}
    if isinstance(env, CoherentSingleMode):
        return {
            "type": "coherent",
            "alpha_re": env.alpha.real,
            "alpha_im": env.alpha.imag,
            "omega_rad_s": env.omega,
        }
    if isinstance(env, FockProduct):
        return {
            "type": "fock_product",
            "occupations": list(env.occupations),
            "mode_freqs_rad_s": list(env.mode_freqs),
        }
    raise DomainError(f"unknown environment spec {type(env).__name__}")


def _env_from_dict(d: dict) -> EnvironmentSpec:
    try:
        kind = d["type"]
    except (KeyError, TypeError):
        raise ConfigError("environment object must carry a 'type' field") from None
    try:
        if kind == "thermal_multimode":
            if "mode_freqs_rad_s" in d:
                freqs = tuple(float(w) for w in d["mode_freqs_rad_s"])
            else:
                # shorthand: n_modes copies of one frequency (sweepable)
                freqs = (float(d["omega_rad_s"]),) * int(d["n_modes"])
            return ThermalMultimode(
                T=float(d["T_K"]),
                mode_freqs=freqs,
                polarizations_per_mode=int(d.get("polarizations_per_mode", 2)),
            )
        if kind == "thermal_single_mode":
            return ThermalSingleMode(T=float(d["T_K"]), omega=float(d["omega_rad_s"]))
        if kind == "coherent":
            return CoherentSingleMode(
                alpha=complex(float(d.get("alpha_re", 0.0)), float(d.get("alpha_im", 0.0))),
                omega=float(d["omega_rad_s"]),
            )
        if kind == "fock_product":
            return FockProduct(
                occupations=tuple(int(n) for n in d["occupations"]),
                mode_freqs=tuple(float(w) for w in d["mode_freqs_rad_s"]),
            )
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"environment '{kind}' is missing required field {exc}") from None
    except (TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"invalid environment '{kind}': {exc}") from None
    raise ConfigError(f"unknown environment type {kind!r}")


def experiment_to_dict(spec: ExperimentSpec) -> dict:
    """Serialize to the documented JSON object
    {mass_kg, omega_rad_s, r_m, environment{type, ...}}."""
    return {
        "mass_kg": spec.M,
        "omega_rad_s": spec.Omega,
        "r_m": spec.r,
        "environment": _env_to_dict(spec.environment),
    }


def experiment_from_dict(d: dict) -> ExperimentSpec:
    """Parse the documented JSON object; raises :class:`ConfigError` on
    missing fields or domain violations."""
    if not isinstance(d, dict):
        raise ConfigError("experiment must be a JSON object")
    for key in ("mass_kg", "omega_rad_s", "r_m", "environment"):
        if key not in d:
            raise ConfigError(f"experiment is missing required field '{key}'")
    try:
        return ExperimentSpec(
            M=float(d["mass_kg"]),
            Omega=float(d["omega_rad_s"]),
            r=float(d["r_m"]),
            environment=_env_from_dict(d["environment"]),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid experiment: {exc}") from None
