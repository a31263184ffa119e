"""Fractional Green functions on intervals: boundary-integral identities,
shape derivatives, the s-harmonic reproducing kernel and s-point vortices."""

from .constants import ConstantSet, FracParams, constants_for, gamma
from .errors import (AccuracyError, CollisionError, DomainError, FraxError, SingularityError, SolverError,
                     StepSizeError, UnsupportedOrderError)
from .green1d import (GreenEval, IntervalDomain, RobinProfile, boundary_ratios, check_green_bounds,
                      green_interval, robin, robin_profile, torsion)
from .quadrature import QuadSpec, boundary_sum_1d, integrate, integrate_pv
from .report import IdentityReport, load_schema, reports_to_json

__version__ = "0.1.0"

__all__ = [
    "ConstantSet", "FracParams", "constants_for", "gamma",
    "AccuracyError", "CollisionError", "DomainError", "FraxError", "SingularityError", "SolverError",
    "StepSizeError", "UnsupportedOrderError",
    "GreenEval", "IntervalDomain", "RobinProfile", "boundary_ratios", "check_green_bounds",
    "green_interval", "robin", "robin_profile", "torsion",
    "QuadSpec", "boundary_sum_1d", "integrate", "integrate_pv",
    "IdentityReport", "load_schema", "reports_to_json",
]
