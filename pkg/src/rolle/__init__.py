"""Midpoints, critical points and the L+/-R+/- cases of hyperbolic polynomials."""

from .classifier import CaseLabel, TildeStats, analyse, classify, riesz_andrews_report, tilde_stats
from .errors import *  # noqa: F401,F403
from .poly_core import (
    GapStats,
    HyperbolicPoly,
    ParamPoint,
    affine_map,
    coefficients,
    derivative_coefficients,
    from_param,
    from_roots,
    gap_stats,
    normalize_unit,
    shift_root,
)
from .root_finder import (
    CriticalPoints,
    SolverConfig,
    critical_points,
    cubic_family_critical,
    hyperbolic_roots,
    logderiv_eval,
)

__version__ = "0.1.0"
