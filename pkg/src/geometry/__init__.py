"""Geometry core: model spaces, chart metrics, radial geodesics and Jacobi fields."""

from .geodesic import (
    ConstantProfile,
    RadialSystem,
    SplineProfile,
    TidalProfile,
    exp_map,
    integrate_radial,
    tidal_profile,
)
from .jacobi import (
    JacobiSolution,
    psi_bound_check,
    rauch_quotient,
    riccati_check,
    self_adjointness_defect,
    solve_jacobi,
)
from .metric import (
    ChartDomain,
    CoordinateMetric,
    PlaneSpec,
    christoffel,
    gram_schmidt,
    ricci,
    riemann,
    sectional,
)
from .model_space import ModelConstants, c_c, ctg_c, model_density, phi_c, s_c

__all__ = [
    "ChartDomain",
    "ConstantProfile",
    "CoordinateMetric",
    "JacobiSolution",
    "ModelConstants",
    "PlaneSpec",
    "RadialSystem",
    "SplineProfile",
    "TidalProfile",
    "c_c",
    "christoffel",
    "ctg_c",
    "exp_map",
    "gram_schmidt",
    "integrate_radial",
    "model_density",
    "phi_c",
    "psi_bound_check",
    "rauch_quotient",
    "ricci",
    "riccati_check",
    "riemann",
    "s_c",
    "sectional",
    "self_adjointness_defect",
    "solve_jacobi",
    "tidal_profile",
]
