"""Numerical conformal maps of bounded multiply connected regions onto the
five canonical slit domains, through one boundary integral equation with the
adjoint generalized Neumann kernel."""

from .canonical import CanonicalKind, MapSolution, solve_map
from .errors import DomainError, GeometryError, NumericalError, SlitMapError
from .evaluate import image_grid, inverse_point, inverse_points, map_derivative, map_point, map_points
from .geometry import CurveSpec, Region, build_region, load_region, locate_point, sample_boundary, seven_ellipse_region

__all__ = [
    "CanonicalKind",
    "CurveSpec",
    "DomainError",
    "GeometryError",
    "MapSolution",
    "NumericalError",
    "Region",
    "SlitMapError",
    "build_region",
    "image_grid",
    "inverse_point",
    "inverse_points",
    "load_region",
    "locate_point",
    "map_derivative",
    "map_point",
    "map_points",
    "sample_boundary",
    "solve_map",
    "seven_ellipse_region",
]
