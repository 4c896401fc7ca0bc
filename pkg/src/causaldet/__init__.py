"""Causal-structure discrimination for qubit pairs via the determinant of the
3x3 Pauli correlation matrix.

Core layers: exact correlation matrices of direct-cause / common-cause /
mixture scenarios, shot-based simulation with bootstrap uncertainties,
optimized boundary curves over the mixing probability, and the inverse map
from a measured determinant back to structure claims.  An HTTP service
(`causaldet.service`) exposes every operation; the command line client
(`causaldet.cli`) drives it in-process or against a remote server.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundaryTable,
    RangeInterval,
    boundary_table,
    boundary_tables,
    empirical_range,
    optimize_boundary,
    theoretical_range,
)
from .channels import (
    MixedUnitaryChannel,
    Unitary2,
    apply_channel,
    axis_angle_unitary,
    channel_correlation,
    haar_random_unitary,
    rotation_of,
)
from .inference import InferenceReport, classify, p_range, report
from .linalg import det3, hermitian_eigenvalues, is_so3, kron, pauli
from .rng import derive_rng, make_rng
from .sampling import (
    ExperimentData,
    ShotCounts,
    bootstrap_delta,
    estimate_correlation,
    run_experiment,
    simulate_setting,
)
from .scenarios import (
    CausalScenario,
    CommonCause,
    CorrelationMatrix,
    DirectCause,
    Mixture,
    causal_determinant,
    exact_correlation,
)
from .states import (
    BlochForm,
    TwoQubitState,
    UnphysicalStateError,
    bell_state,
    bloch_compose,
    bloch_decompose,
    depolarize,
    diagonalize_correlation,
    fidelity_pure,
    random_state,
    werner_state,
)

__all__ = [
    "__version__",
    "BoundaryTable",
    "RangeInterval",
    "boundary_table",
    "boundary_tables",
    "empirical_range",
    "optimize_boundary",
    "theoretical_range",
    "MixedUnitaryChannel",
    "Unitary2",
    "apply_channel",
    "axis_angle_unitary",
    "channel_correlation",
    "haar_random_unitary",
    "rotation_of",
    "InferenceReport",
    "classify",
    "p_range",
    "report",
    "det3",
    "hermitian_eigenvalues",
    "is_so3",
    "kron",
    "pauli",
    "derive_rng",
    "make_rng",
    "ExperimentData",
    "ShotCounts",
    "bootstrap_delta",
    "estimate_correlation",
    "run_experiment",
    "simulate_setting",
    "CausalScenario",
    "CommonCause",
    "CorrelationMatrix",
    "DirectCause",
    "Mixture",
    "causal_determinant",
    "exact_correlation",
    "BlochForm",
    "TwoQubitState",
    "UnphysicalStateError",
    "bell_state",
    "bloch_compose",
    "bloch_decompose",
    "depolarize",
    "diagonalize_correlation",
    "fidelity_pure",
    "random_state",
    "werner_state",
]
