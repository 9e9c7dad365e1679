"""Concentration of number-operator coherence from two copies of a state into one subsystem."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    bound_kyfan_global,
    bound_kyfan_lrd,
    bound_report,
    correlation_witness,
    kyfan_diagonal_lemma_check,
    marginal_product_distance,
    nogo_check,
)
from .errors import StateValidationError, UnsupportedParameterError
from .modes import (
    LrdOperator,
    ModeOperator,
    VinProjector,
    bipartite_mode,
    bipartite_mode_set,
    local_mode_of_global,
    lrd_decompose,
    mode_component,
    mode_measure,
    mode_set,
    vin_projector,
)
from .optimizer import (
    SearchOutcome,
    UnitarySearchConfig,
    maximize_delta_m,
    parameterize_block,
    random_allowed_unitary,
)
from .qubit_protocol import (
    ConcatTrace,
    ConcentrationResult,
    amplification_state,
    optimal_concentration,
    optimal_unitary,
    purity_ceiling,
    recurrence_step,
    run_concatenation,
    vector_field,
)
from .sampling import haar_unitary, random_bloch, random_density_matrix
from .states import (
    AllowedUnitary,
    BipartiteGenerator,
    BlochState,
    DensityMatrix,
    NumberOperator,
    assemble_allowed_unitary,
    bell_phi_plus,
    bloch_from_json,
    bloch_to_density,
    bloch_to_json,
    density_from_json,
    density_to_bloch,
    density_to_json,
    is_incoherent,
    isotropic_state,
)

__all__ = [
    "__version__",
    "AllowedUnitary",
    "BipartiteGenerator",
    "BlochState",
    "BoundReport",
    "ConcatTrace",
    "ConcentrationResult",
    "DensityMatrix",
    "LrdOperator",
    "ModeOperator",
    "NumberOperator",
    "SearchOutcome",
    "StateValidationError",
    "UnitarySearchConfig",
    "UnsupportedParameterError",
    "VinProjector",
    "amplification_state",
    "assemble_allowed_unitary",
    "bell_phi_plus",
    "bipartite_mode",
    "bipartite_mode_set",
    "bloch_from_json",
    "bloch_to_density",
    "bloch_to_json",
    "bound_kyfan_global",
    "bound_kyfan_lrd",
    "bound_report",
    "correlation_witness",
    "density_from_json",
    "density_to_bloch",
    "density_to_json",
    "haar_unitary",
    "is_incoherent",
    "isotropic_state",
    "kyfan_diagonal_lemma_check",
    "local_mode_of_global",
    "lrd_decompose",
    "marginal_product_distance",
    "maximize_delta_m",
    "mode_component",
    "mode_measure",
    "mode_set",
    "nogo_check",
    "optimal_concentration",
    "optimal_unitary",
    "parameterize_block",
    "purity_ceiling",
    "random_allowed_unitary",
    "random_bloch",
    "random_density_matrix",
    "recurrence_step",
    "run_concatenation",
    "vector_field",
    "vin_projector",
]
