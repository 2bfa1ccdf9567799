"""Compressed-sensing quantum state tomography toolkit.

Simulate Pauli-basis count data for few-qubit states, reconstruct low-rank
density matrices by trace minimization inside a data-fit ball, select the
data-fit parameter from noise statistics or cross-validation, and quantify
results via bootstrapping and direct fidelity estimation.
"""

from .tolerances import Tolerances, DEFAULT
from .states import (
    DensityMatrix,
    HermitianMatrix,
    ghz_state,
    dephased_ghz,
    maximally_mixed,
    fidelity,
    purity,
    project_psd,
)
from .pauli import (
    SettingsPlan,
    ProjectorSet,
    eigenprojectors,
    enumerate_settings,
    born_probabilities,
    apply_sensing,
    apply_sensing_adjoint,
)
from .data import (
    Dataset,
    RandomSource,
    sample_counts,
    expected_counts,
    draw_settings,
    restrict_dataset,
    split_folds,
)
from .solver import (
    SolverConfig,
    ReconstructionResult,
    reconstruct,
    check_feasible,
    mle_estimate,
)
from .model_selection import (
    epsilon_hat,
    expected_noise,
    prediction_error,
    cross_validate,
    CrossValReport,
)
from .dfe import (
    PauliCoefficients,
    FidelityEstimate,
    estimable_labels,
    pauli_coefficients,
    ghz_pauli_decomposition,
    required_settings,
    direct_fidelity,
)
from .analysis import (
    BootstrapReport,
    SweepReport,
    bootstrap_fidelity,
    sweep_settings,
    sweep_grid,
)
from .estimators import CompressedSensingEstimator, MaximumLikelihoodEstimator
from . import exceptions

__version__ = "0.1.0"
