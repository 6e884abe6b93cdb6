"""Wang-equation solver in coordinate gauge with comparison estimates."""

from .grid import Grid2D, square_window, unit_torus_grid
from .cubic import CubicDifferentialField
from .solver import BlaschkeSolution, solve_tzitzeica, solve_wang
from .estimates import (
    AreaBounds,
    area_and_bounds,
    check_subsolution,
    curvature_field,
    discrete_laplacian,
    gap_upper_bound,
    largest_root,
    log_density_curvature,
    minimal_surface_metric,
)
from .decay import DecayCertificate, decay_experiment, flat_metric_path_length

__all__ = [
    "Grid2D", "square_window", "unit_torus_grid",
    "CubicDifferentialField",
    "BlaschkeSolution", "solve_tzitzeica", "solve_wang",
    "AreaBounds", "area_and_bounds", "check_subsolution", "curvature_field",
    "discrete_laplacian", "gap_upper_bound", "largest_root",
    "log_density_curvature", "minimal_surface_metric",
    "DecayCertificate", "decay_experiment", "flat_metric_path_length",
]
