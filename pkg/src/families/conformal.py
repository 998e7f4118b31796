"""Radial conformal deformations g* = exp(2 omega) g of Minkowski space.

With omega(r) = a r^2 the deformation is written off the timelike cone as
omega(x) = -a eta(x - p, x - p), which equals a r^2 along radial timelike geodesics and is
smooth everywhere. On a radial timelike plane Span{gamma', v2}:

    exp(2 omega) K* = K + omega'' - Hess omega(v2, v2)

and the flat Hessian term is the constant -omega'(r)/r = -2a.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exceptions import BaseNotSupportedError, ModelDomainError
from ..geometry import ChartDomain, CoordinateMetric

logger = logging.getLogger(__name__)

SUPPORTED_BASES = ("minkowski",)


@dataclass(frozen=True)
class ConformalData:
    """Quadratic radial conformal factor omega(r) = a r^2 over a base metric."""

    a: float
    dim: int
    base: str = "minkowski"
    center: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ModelDomainError(f"dimension must be at least 2, got {self.dim}")
        if not math.isfinite(self.a):
            raise ModelDomainError(f"conformal coefficient must be finite, got {self.a}")
        if not math.isfinite(self.omega_prime(0.0)):
            raise ModelDomainError("omega does not extend differentiably to r = 0")

    @property
    def base_point(self) -> np.ndarray:
        return np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=float)

    def omega(self, r: float) -> float:
        return self.a * r**2

    def omega_prime(self, r: float) -> float:
        return 2.0 * self.a * r

    def omega_second(self, r: float) -> float:
        return 2.0 * self.a


def _eta(n: int) -> np.ndarray:
    return np.diag([-1.0] + [1.0] * (n - 1))


def radial_hessian_term(conf: ConformalData, r: float) -> float:
    """Hess omega(v2, v2) for a unit v2 orthogonal to a radial timelike geodesic at radius r.

    Raises:
        ModelDomainError: At r = 0, where the radial direction is undefined.
    """
    if r <= 0:
        raise ModelDomainError(f"radial Hessian term needs r > 0, got {r!r}")
    return -conf.omega_prime(r) / r


def conformal_radial_sectional(
    conf: ConformalData, r: float, base_K: float, hess_term: float
) -> float:
    """K*(pi) = exp(-2 omega(r)) (K(pi) + omega''(r) - hess_term) on a radial plane."""
    return math.exp(-2.0 * conf.omega(r)) * (base_K + conf.omega_second(r) - hess_term)


def conformal_radial_ricci(
    conf: ConformalData, r: float, base_ric: float, laplacian: Optional[float] = None
) -> float:
    """Near-origin radial Ricci curvature Ric(d_r, d_r) - Laplacian(omega) - (n - 2) omega''.

    When no Laplacian is supplied it is approximated by omega'', which is only meaningful
    close to the base point.
    """
    lap = conf.omega_second(r) if laplacian is None else laplacian
    return base_ric - lap - (conf.dim - 2) * conf.omega_second(r)


def build_conformal_metric(conf: ConformalData) -> CoordinateMetric:
    """Componentwise scaling exp(2 omega(x)) eta of the Minkowski chart.

    Raises:
        BaseNotSupportedError: For any base other than Minkowski.
    """
    if conf.base not in SUPPORTED_BASES:
        raise BaseNotSupportedError(
            f"conformal deformation over '{conf.base}' is not supported; use one of {SUPPORTED_BASES}"
        )
    n = conf.dim
    eta = _eta(n)
    p = conf.base_point
    a = conf.a

    def omega_at(x: np.ndarray) -> float:
        y = x - p
        return -a * float(y @ eta @ y)

    def components(x: np.ndarray) -> np.ndarray:
        return math.exp(2.0 * omega_at(x)) * eta

    def derivatives(x: np.ndarray) -> np.ndarray:
        grad = -2.0 * a * (eta @ (x - p))
        return np.einsum("k,ij->kij", 2.0 * grad * math.exp(2.0 * omega_at(x)), eta)

    span = 5.0
    domain = ChartDomain.box(p - span, p + span)
    metric = CoordinateMetric(
        n,
        components,
        derivatives,
        domain=domain,
        name=f"conformal(a={a:g}, n={n})",
        time_axis=0,
        constant=a == 0.0,
    )
    logger.debug(f"Built {metric.name} over {conf.base}")
    return metric
