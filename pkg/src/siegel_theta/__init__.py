"""Siegel theta constants, the quotient family Theta_v, and exhaustive checks
of its level-N properties."""

from .characteristics import (
    DimensionError,
    FracVector,
    HalfChar,
    IndexClass,
    canonical,
    count_I_N,
    enumerate_half_chars,
    enumerate_I_N,
    frac_part,
    n_counts,
    split,
)
from .genus1 import diag_restrict_check, genus1_identity_residual, numeric_order, ord_q, siegel_g
from .orders import (
    order_signature,
    primitivity_precondition,
    signature_collision_classes,
    special_fiber_candidates,
)
from .points import SiegelPoint
from .symplectic import (
    GroupTable,
    SymplecticMatrix,
    act_on_H,
    act_on_index,
    bfs_group,
    congruence_tests,
    elementary,
    is_gsp,
    stabilizer,
)
from .theta import (
    DegenerateFamilyError,
    LogValue,
    TruncationError,
    big_theta,
    big_theta_log,
    check_sp_action,
    is_vanishing_char,
    theta,
)

__version__ = "0.1.0"

__all__ = [
    "diag_restrict_check",
    "genus1_identity_residual",
    "numeric_order",
    "ord_q",
    "siegel_g",
    "DegenerateFamilyError",
    "DimensionError",
    "FracVector",
    "GroupTable",
    "HalfChar",
    "IndexClass",
    "LogValue",
    "SiegelPoint",
    "SymplecticMatrix",
    "TruncationError",
    "act_on_H",
    "act_on_index",
    "bfs_group",
    "big_theta",
    "big_theta_log",
    "canonical",
    "check_sp_action",
    "congruence_tests",
    "count_I_N",
    "elementary",
    "enumerate_I_N",
    "enumerate_half_chars",
    "frac_part",
    "is_gsp",
    "is_vanishing_char",
    "n_counts",
    "order_signature",
    "primitivity_precondition",
    "signature_collision_classes",
    "special_fiber_candidates",
    "split",
    "stabilizer",
    "theta",
]
