"""Equivariant projector kernels on sphere bundles over projective space.

Exact kernel evaluation for joint torus isotypes, the geometric invariants
controlling their concentration asymptotics, predicted leading terms, and
Berezin-Toeplitz compressions, together with the independent oracles and the
experiment runner used to verify the scaling laws.
"""

from .actions import (
    MomentData,
    StabilizerElement,
    WeightSystem,
    act,
    eta_vector,
    infinitesimal_action,
    locus_center,
    locus_distance,
    locus_sample,
    moment,
    moment_kernel_basis,
    script_D,
    stabilizer,
    tangent_split,
)
from .asymptotics import (
    LeadingTerm,
    amplitude_diagnostic,
    diagonal_leading,
    dim_prediction,
    fit_exponent,
    h_exponent,
    lambda_nu,
    locus_data,
    near_diagonal_leading,
)
from .errors import (
    AssumptionViolation,
    ConfigError,
    DomainError,
    EquiSzegoError,
    InfeasibleLocusError,
    TransversalityError,
)
from .geometry import (
    AdaptedFrame,
    SpherePoint,
    TangentVectorX,
    apply_J,
    dist_proj,
    dist_sphere,
    frame_at,
    hlc_point,
    tangent_pairing,
)
from .hardy import (
    ExponentVector,
    IsotypeBasis,
    build_basis,
    dim_isotype,
    enumerate_isotype,
    eval_section,
    log_coefficient,
)
from .kernel import (
    level_kernel_closed,
    log_szego_diag,
    szego_diag,
    szego_eval,
    szego_rescaled,
)
from .toeplitz import (
    QuadratureSpec,
    RadialPolynomial,
    toeplitz_kernel,
    toeplitz_matrix,
    toeplitz_near_diagonal_leading,
    toeplitz_trace,
    trace_prediction,
)

__version__ = "0.1.0"
