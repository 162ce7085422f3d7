"""Nonbilocality and measurement-induced nonlocality quantifiers.

Numerical toolkit for the two-source entanglement-swapping network: density
operator primitives, orthonormal Hermitian operator bases and correlation
matrices, admissible projective measurements, the nonbilocality measure with
its closed forms, bound, and seeded optimizer, related MIN/discord
quantifiers, and the binary-input bilocality inequality.
"""

__version__ = "0.1.0"

from .bilocality import (
    BsmAssignment,
    DichotomicObservable,
    bsm_assignment,
    correlator_I,
    correlator_J,
    dichotomic,
    s_value,
    standard_bsm,
    sweep_settings,
)
from .errors import (
    BadParameter,
    DegenerateMarginal,
    DimensionMismatch,
    InadmissibleMeasurement,
    NonbilocError,
    NotBipartite,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NotQubitSide,
    NotSquare,
    NotUnitary,
    PreconditionViolated,
    TraceNotOne,
)
from .linalg import (
    Spectrum,
    eig_hermitian,
    hs_inner,
    hs_norm_sq,
    partial_trace,
    permute_systems,
    psd_sqrt,
    tensor,
)
from .measurements import (
    EigenspaceBlocks,
    ProjectiveMeasurement,
    admissible_from_unitaries,
    apply_measurement,
    eigenspace_blocks,
    g_matrix,
    is_admissible,
    measurement_from_vectors,
    random_admissible,
    spectral_measurement,
)
from .opbasis import (
    HermitianBasis,
    build_basis,
    correlation_matrix,
    gamma_bcad,
    split_first_row,
)
from .quantifiers import (
    OptimizerConfig,
    QuantifierResult,
    discord_geometric,
    min_modified,
    min_original,
    nb_both_nondegenerate,
    nb_bound,
    nb_bound_for_states,
    nb_closed_form,
    nb_optimize,
    nb_pure,
    nb_qubit_free_side,
    objective,
)
from .states import (
    DensityOperator,
    PureState,
    SchmidtDecomposition,
    bell_diagonal,
    bell_state,
    bell_vector,
    classical_correlated,
    pure_state,
    random_density,
    random_pure,
    schmidt_decompose,
    schmidt_reconstruct,
    validate_density,
    werner,
)
