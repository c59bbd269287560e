"""Ligon-Schaaf regularization of the Kepler problem and convexity checks
for the planar circular restricted three-body problem."""
from .curvature import closed_form_CK, closed_form_CRt, tangential_curvature
from .errors import DomainError
from .hamiltonians import eval_HC, eval_HK, eval_HR, eval_HX, locate_L1
from .identities import verify_identities
from .kepler_equation import kepler_function_grid, solve_elliptic, solve_hyperbolic
from .lsmap import forward, inverse
from .orbit import elements, period, propagate
from .phase import CartesianState, SphereState
from .projections import ComplexPair, PlanarCotangent
from .scan import constrained_minimize, grid_scan, threshold_estimate

__version__ = "0.1.0"
