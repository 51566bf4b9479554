"""gravidec: decoherence of a trapped mass from its light-bending coupling
to quantized light.

The package evaluates the exact conditional-displacement reduced dynamics
of the oscillator, cross-validates it against brute-force unitary
evolution on a truncated joint Fock space, computes position-basis matrix
elements through the characteristic-function quadrature, and provides
closed-form decoherence factors and coherence lengths for thermal and
coherent light together with their numerical extraction.
"""

from .constants import CODATA2018, PhysicalConstants
from .decoherence import (
    DecoherenceResult,
    ExtractionResult,
    extract_lambda_coh,
    gamma_coherent,
    gamma_highT,
    gamma_single_thermal_mode,
)
from .dynamics_exact import (
    EnergyDistribution,
    TotalHamiltonian,
    brute_force_joint_state,
    build_total_hamiltonian,
    conditional_displacement_reduced,
    energy_distribution,
    energy_distribution_from_matrix,
    environment_initial_state,
    environment_state,
)
from .errors import (
    ConfigError,
    DomainError,
    ExtractionError,
    QuadratureError,
    RegimeError,
)
from .fockspace import (
    DensityMatrix,
    FockOperator,
    PositionGrid,
    TruncationPolicy,
    displacement,
    fock_to_position,
    ladder,
    partial_trace,
    position_wavefunctions,
)
from .physmodel import (
    CoherentSingleMode,
    CouplingParams,
    EnvironmentSpec,
    ExperimentSpec,
    FockProduct,
    ThermalMultimode,
    ThermalSingleMode,
    coupling_g0,
    deflection_angle,
    gamma12,
    lambda_t,
)
from .reduced_analytic import (
    CharacteristicFunction,
    InfluenceFunction,
    chi_of_state,
    coherent_influence,
    influence_coherent,
    influence_single_thermal_mode,
    influence_thermal_exact,
    influence_thermal_highT,
    matrix_elements_general,
    matrix_elements_grid,
    single_thermal_mode_influence,
    thermal_exact_influence,
    thermal_highT_influence,
    unit_influence,
)

__version__ = "0.1.0"
