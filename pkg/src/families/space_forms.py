"""Constant-curvature charts used as model spaces and test oracles."""

import logging
import math

import numpy as np
from scipy.integrate import quad

from ..exceptions import ModelDomainError, UnsupportedDimensionError
from ..geometry import ChartDomain, CoordinateMetric

logger = logging.getLogger(__name__)

# Area of the unit sphere S^(n-1) in R^n
SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi, 4: 2.0 * math.pi**2}


def _check_dim(n: int) -> None:
    if n < 2:
        raise UnsupportedDimensionError(f"charts need dimension at least 2, got {n}")


def minkowski(n: int) -> CoordinateMetric:
    """Flat Lorentzian chart -dt^2 + dx_1^2 + ... + dx_(n-1)^2."""
    _check_dim(n)
    eta = np.diag([-1.0] + [1.0] * (n - 1))
    return CoordinateMetric(n, lambda x: eta, name=f"minkowski-{n}", time_axis=0, constant=True)


def euclidean(n: int) -> CoordinateMetric:
    """Flat Riemannian chart."""
    _check_dim(n)
    delta = np.eye(n)
    return CoordinateMetric(n, lambda x: delta, name=f"euclidean-{n}", time_axis=None, constant=True)


def stereographic_factor(k: float, x: np.ndarray) -> float:
    """Conformal factor sigma(x) = (1 + k |x|^2 / 4)^-2 of the curvature-k stereographic chart."""
    return float((1.0 + 0.25 * k * float(x @ x)) ** -2)


def stereographic_gradient(k: float, x: np.ndarray) -> np.ndarray:
    """Gradient of ``stereographic_factor`` in x."""
    return -k * x * (1.0 + 0.25 * k * float(x @ x)) ** -3


def stereographic_domain(k: float, n: int) -> ChartDomain:
    """Whole R^n for k >= 0, the Poincare ball of radius 2/sqrt(-k) otherwise."""
    if k >= 0:
        return ChartDomain.unbounded(n)
    radius = 2.0 / math.sqrt(-k)
    return ChartDomain(
        np.full(n, -radius), np.full(n, radius), predicate=lambda x: float(x @ x) < radius**2
    )


def riemannian_space_form(k: float, n: int) -> CoordinateMetric:
    """Round sphere (k > 0), Euclidean space (k = 0) or hyperbolic space (k < 0).

    Uses stereographic coordinates centred at the origin, so the origin is the natural base
    point and geodesics through it are coordinate rays.
    """
    _check_dim(n)
    if k == 0:
        return euclidean(n)

    def components(x: np.ndarray) -> np.ndarray:
        return stereographic_factor(k, x) * np.eye(n)

    def derivatives(x: np.ndarray) -> np.ndarray:
        return np.einsum("k,ij->kij", stereographic_gradient(k, x), np.eye(n))

    return CoordinateMetric(
        n,
        components,
        derivatives,
        domain=stereographic_domain(k, n),
        name=f"space-form(k={k:g}, n={n})",
        time_axis=None,
    )


def lorentzian_space_form(c: float, n: int) -> CoordinateMetric:
    """Lorentzian chart of constant sectional curvature c around t = 0.

    c > 0 is de Sitter space as -dt^2 + (cosh(sqrt(c) t)/sqrt(c))^2 g_S, c < 0 is anti-de
    Sitter space as -dt^2 + (cos(sqrt(-c) t)/sqrt(-c))^2 g_H, c = 0 is Minkowski space.
    """
    from .grw import GRWData, WarpingFunction, build_grw_metric

    _check_dim(n)
    if c == 0:
        return minkowski(n)
    root = math.sqrt(abs(c))
    if c > 0:
        data = GRWData(WarpingFunction("cosh", (1.0 / root, root)), m=n - 1, k_F=1.0)
    else:
        half = 0.5 * math.pi / root
        data = GRWData(
            WarpingFunction("cos", (1.0 / root, root)),
            m=n - 1,
            k_F=-1.0,
            interval=(-0.95 * half, 0.95 * half),
        )
    metric = build_grw_metric(data)
    metric.name = f"lorentzian-space-form(c={c:g}, n={n})"
    return metric


def ball_volume(k: float, n: int, r: float) -> float:
    """Volume of a metric ball of radius r in the n-dimensional space form of curvature k.

    Raises:
        ModelDomainError: If r is negative or reaches the antipode of the sphere.
    """
    _check_dim(n)
    if r < 0:
        raise ModelDomainError(f"ball radius must be non-negative, got {r!r}")
    if k > 0 and r > math.pi / math.sqrt(k):
        raise ModelDomainError(f"radius {r!r} exceeds the diameter of the sphere of curvature {k!r}")

    if k == 0:
        return SPHERE_AREA[n] * r**n / n if n in SPHERE_AREA else _quad_ball(k, n, r)
    root = math.sqrt(abs(k))
    if n == 2:
        if k > 0:
            return 2.0 * math.pi * (1.0 - math.cos(root * r)) / k
        return 2.0 * math.pi * (math.cosh(root * r) - 1.0) / -k
    if n == 3:
        if k > 0:
            return 2.0 * math.pi / k * (r - math.sin(2.0 * root * r) / (2.0 * root))
        return 2.0 * math.pi / -k * (math.sinh(2.0 * root * r) / (2.0 * root) - r)
    return _quad_ball(k, n, r)


def _quad_ball(k: float, n: int, r: float) -> float:
    area = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)

    def density(t: float) -> float:
        if k > 0:
            s = math.sin(math.sqrt(k) * t) / math.sqrt(k)
        elif k < 0:
            s = math.sinh(math.sqrt(-k) * t) / math.sqrt(-k)
        else:
            s = t
        return s ** (n - 1)

    value, _ = quad(density, 0.0, r, epsabs=1e-14, epsrel=1e-13)
    return area * value
