"""Asymptotic expansions of slowly varying linear recurrences.

Given an l-step recurrence sum_j a_j(k*eps, eps) y_{k+j} = 0 with smooth
coefficients, this package constructs exponential expansions
exp(eps^-1 * sum_t Phi_t(x) eps^t) branch by branch and order by order,
handles Airy-type behavior where two characteristic roots cross, solves the
power-series regime of ODE difference schemes, and validates everything
against exact (extended-precision) iteration of the recurrence.
"""

from .errors import (
    BranchAmbiguity,
    BranchJumpDetected,
    CoefficientVanishes,
    CoincidentNodes,
    DegeneracyMismatch,
    DegenerateTheta,
    DenominatorTooSmall,
    IllConditionedFit,
    InsufficientDecades,
    LeadingCoefficientVanishes,
    NearZeroDivisor,
    NonGenericCrossing,
    NonsingularityViolation,
    OrderOverflow,
    OutOfRange,
    ParseError,
    RecwkbError,
    SeparationFailure,
    WindowEmpty,
)
from .exact import (
    LogScaledTrajectory,
    TransferMatrix,
    ValidationReport,
    asymptoticity_fit,
    fitted_shift,
    fundamental_fit,
    iterate,
    rescaled_iterate,
    shift_needed,
    stability_norm_scan,
    transfer_matrix,
    validate_wkb,
    vandermonde_ratio,
)
from .fields import ScalarField, field_algebra
from .jets import Jet, jet_compose_exponent
from .recurrence import (
    EpsSeriesField,
    RecurrenceSpec,
    parse_spec,
    preset,
    serialize,
)
from .roots import (
    CrossingCandidate,
    RegionPartition,
    RootBranch,
    char_roots_at,
    detect_crossings,
    partition_by_modulus,
    region_branch,
    track_branches,
)
from .schemes import (
    SchemeSeries,
    check_degeneracy,
    local_condition_residual,
    richardson_eps2_coefficient,
    scheme_error_order,
    xi_series,
)
from .series import TaylorSeries
from .turning import (
    ConnectionData,
    TurningPointExpansion,
    airy_eval,
    airy_particular_solution,
    inhom_airy_solve,
    interior_expansion,
    match_connection,
    overlap_window_ks,
    theta,
)
from .wkb import (
    PhiExpansion,
    eikonal,
    expand_branch,
    formal_residual,
    residual_order_fit,
    transport_next,
)

__version__ = "0.1.0"
