"""Analysis of bipartite pure states at finite dimension.

Schmidt forms, the antiunitary correlation operator, twin observables,
distant measurement and steering, each checked against brute-force routes.
"""

from .bipartite import (
    BipartiteState,
    ExpansionInBasis,
    SubsystemBasis,
    expand_in_basis,
    make_state,
    partial_scalar_product,
    partial_trace_a,
    partial_trace_b,
    product_state,
    purify,
    reduced_rho_a,
    reduced_rho_b,
)
from .correlation import (
    AntilinearOperator,
    apply,
    apply_inverse,
    correlated_decomposition,
    correlation_operator,
    expansion_coefficient_via_ua,
    generalized_decomposition,
    operator_image,
    operator_preimage,
)
from .errors import EntangleError
from .numeric import DEFAULT_TOL, SpectralDecomposition, TolerancePolicy
from .schmidt import (
    SchmidtDecomposition,
    SubsystemPicture,
    is_entangled,
    range_projectors,
    reconstruct,
    schmidt,
    subsystem_picture,
)
from .steering import (
    distant_decomposition_general,
    distant_measurement,
    hadjisavvas_check,
    orthogonal_mixture,
    reachable,
    realize_orthogonal_decomposition,
    steer,
)
from .twins import (
    Observable,
    TwinPair,
    construct_twin,
    has_twin,
    is_epr,
    is_twin_pair,
    minimal_part,
    twin_correlated_schmidt,
)

__version__ = "0.1.0"
