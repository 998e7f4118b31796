"""Builtin metric families: space forms, GRW spacetimes and conformal deformations."""

from .conformal import (
    ConformalData,
    build_conformal_metric,
    conformal_radial_ricci,
    conformal_radial_sectional,
    radial_hessian_term,
)
from .grw import (
    GRWData,
    Parabola,
    WarpingFunction,
    build_grw_metric,
    find_bound_violation,
    grw_from_params,
    grw_ricci_conditions,
    grw_ricci_timelike,
    grw_sectional_conditions,
    grw_timelike_plane_curvature,
    ricci_parabola,
    sectional_parabola,
)
from .space_forms import (
    ball_volume,
    euclidean,
    lorentzian_space_form,
    minkowski,
    riemannian_space_form,
)

__all__ = [
    "ConformalData",
    "GRWData",
    "Parabola",
    "WarpingFunction",
    "ball_volume",
    "build_conformal_metric",
    "build_grw_metric",
    "conformal_radial_ricci",
    "conformal_radial_sectional",
    "euclidean",
    "find_bound_violation",
    "grw_from_params",
    "grw_ricci_conditions",
    "grw_ricci_timelike",
    "grw_sectional_conditions",
    "grw_timelike_plane_curvature",
    "lorentzian_space_form",
    "minkowski",
    "radial_hessian_term",
    "ricci_parabola",
    "riemannian_space_form",
    "sectional_parabola",
]
