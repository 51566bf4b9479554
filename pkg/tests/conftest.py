import math

import numpy as np
import pytest

from gravidec import (
    CODATA2018,
    ExperimentSpec,
    PositionGrid,
    ThermalSingleMode,
)

# Reference experiment geometry used across the suite: a 10 kg mass in a
# 150 Hz trap, light guided at 25 cm.
REF_M = 10.0
REF_OMEGA = 2.0 * math.pi * 150.0
REF_R = 0.25

# frozen pre-build oracle values (50-digit arithmetic, CODATA 2018)
DEFLECTION_REF = 1.1881856430589865e-25        # 4GM/(rc^2) at (10 kg, 0.25 m)
DEFLECTION_SUN = 8.4925299843478659e-6         # solar-limb bending [rad]
XZPF_REF = 7.4797575165899521e-20              # sqrt(hbar/(2 M Omega)) [m]
G0_REF = 3.554936197909888e-44                 # coupling for the reference geometry
LCOH_REF_1E20K = 1.5146758942283121e-4         # high-T coherence length at 1e20 K [m]
KAPPA_REF = 4.4685330144610624e37              # M Omega/(2 hbar) [m^-2]


def temperature_for(beta_omega: float, omega: float) -> float:
    """Temperature making hbar*omega/(k_B T) equal beta_omega."""
    return CODATA2018.hbar * omega / (CODATA2018.k_B * beta_omega)


def reference_spec(environment=None) -> ExperimentSpec:
    env = environment or ThermalSingleMode(T=temperature_for(1.0, REF_OMEGA), omega=REF_OMEGA)
    return ExperimentSpec(M=REF_M, Omega=REF_OMEGA, r=REF_R, environment=env)


def natural_grid(xi_max=8.0, n=401) -> PositionGrid:
    """Grid in natural units (kappa = 1, so xi coincides with x)."""
    return PositionGrid.uniform(1.0, xi_max=xi_max, n=n)


def cluster_grid(mu0: float, kappa: float, step: float = 0.05) -> PositionGrid:
    """Two symmetric point clusters around +-mu0, for states whose position
    coherences live at separations near 2 mu0."""
    half = min(3.0, 0.7 * mu0)
    right = np.arange(mu0 - half, mu0 + half + 1e-9, step)
    left = -right[::-1]
    return PositionGrid(np.concatenate([left, right]), kappa)


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
