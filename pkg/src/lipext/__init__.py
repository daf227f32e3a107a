"""Slope-preserving Lipschitz extension on finite metric spaces."""

from .epsseq import EpsilonSequence, check_hypotheses, new_sequence
from .extension import (
    ExtensionResult,
    clamp_bounded,
    extend,
    extend_ascending,
    extend_descending,
    extend_mcshane,
    extend_slope,
    phi_eval,
    psi_eval,
)
from .lipconst import ScaledProfile, auto_radii, lip_at, lip_global, profile
from .metric import FiniteMetricSpace, SubsetFunction, ball, from_graph, from_matrix, from_points, subset_function
from .penalization import LocalConstantTable, Penalty, local_constants, pen_eval
from .verification import ClaimReport, check_claims, make_instance, slope_consistency

__version__ = "0.1.0"
