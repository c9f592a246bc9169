"""Product states, separability classes and geometry of small Hilbert subspaces.

Find every pure product state in a Hilbert subspace of dimension up to
three, classify the subspace into the complete taxonomy of separability
geometries (bipartite and multipartite), describe the resulting set of
separable states, and verify each verdict against the partial-transpose
criterion, which is exact in this rank regime.
"""

from .api import classify_state_support, classify_subspace
from .classify import (
    ClassTag,
    ClassificationResult,
    classify_bipartite,
    classify_dim2,
    classify_dim3,
    describe_separable_set,
    general_position,
)
from .descriptions import (
    AllStates,
    Cone,
    FactorPairMap,
    LocalBall,
    NoSeparable,
    ProductCurve,
    Segment,
    SinglePoint,
    Triangle,
    TwoBalls,
    build_factor_pair_map,
)
from .errors import (
    DegenerateCoefficientsError,
    InconsistentPatternError,
    InconsistentProbesError,
    NotIsolatedError,
    PreconditionUnmetError,
    SolverInconsistencyError,
    SubsepError,
    SupportMismatchError,
    UnsupportedRankError,
)
from .estimator import SubspaceClassifier
from .linalg import (
    DensityMatrix,
    DimensionProfile,
    StateVector,
    SubspaceBasis,
    numeric_rank,
    partial_trace,
    partial_transpose,
    schmidt_decompose,
    support_basis,
    tensor,
)
from .multipartite import (
    ConeData,
    EqualityPattern,
    MultiClassResult,
    MultipartiteInstance,
    classify_multipartite,
    classify_multipartite_subspace,
    equality_pattern,
    paired_factors_independent,
    reduce_trivial_subsystems,
)
from .oracle import (
    VerificationReport,
    brute_force_product_search,
    monte_carlo_class_check,
    sample_separable,
)
from .products import (
    ComponentReport,
    ProductStateSet,
    ProjectivePoint,
    QuadricSystem,
    detect_positive_dimensional,
    find_product_states,
    minor_system,
    solve_isolated,
)
from .separability import (
    SeparabilityVerdict,
    is_ppt,
    is_separable_rank3,
    membership,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__version__ = "0.1.0"
