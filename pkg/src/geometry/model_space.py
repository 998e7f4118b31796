"""Generalized trigonometric functions of the model spaces.

The tables follow the Lorentzian timelike convention: for c > 0 the density grows like
sinh, for c < 0 it oscillates like sin. Riemannian and spacelike directions use the
substitution c -> -c, exposed as ``ModelConstants.effective_c``.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from ..exceptions import ModelDomainError
from ..models import SignatureMode

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Below |c| t^2 < SERIES_THRESHOLD the closed forms lose digits to cancellation.
SERIES_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ModelConstants:
    """Curvature constant, dimension and signature mode of a model space."""

    c: float
    n: int
    mode: SignatureMode = SignatureMode.LORENTZIAN_TIMELIKE

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ModelDomainError(f"dimension must be at least 2, got {self.n}")
        if not math.isfinite(self.c):
            raise ModelDomainError(f"curvature constant must be finite, got {self.c}")

    @property
    def m(self) -> int:
        return self.n - 1

    @property
    def k(self) -> float:
        return -self.c

    @property
    def effective_c(self) -> float:
        """Constant entering the s_c table for this mode."""
        if self.mode is SignatureMode.LORENTZIAN_TIMELIKE:
            return self.c
        return -self.c

    @property
    def effective_k(self) -> float:
        """Constant of the model Riccati equation for this mode."""
        return -self.effective_c

    @property
    def first_pole(self) -> float:
        """First positive zero of s_c, or infinity when there is none."""
        ce = self.effective_c
        if ce < 0:
            return math.pi / math.sqrt(-ce)
        return math.inf

    def with_c(self, c: float) -> "ModelConstants":
        return replace(self, c=c)


def _as_output(values: np.ndarray, t: ArrayLike) -> ArrayLike:
    if np.ndim(t) == 0:
        return float(values)
    return values


def _check_nonnegative(t: np.ndarray) -> None:
    if np.any(t < 0) or np.any(~np.isfinite(t)):
        raise ModelDomainError("model functions are defined for finite t >= 0 only")


def s_c(consts: ModelConstants, t: ArrayLike) -> ArrayLike:
    """Evaluate the generalized sine s_c(t).

    Args:
        consts: Model constants; the mode selects the sign convention.
        t: Non-negative time or array of times.

    Returns:
        sinh(sqrt(c) t)/sqrt(c), t, or sin(sqrt(-c) t)/sqrt(-c) by the sign of c.

    Raises:
        ModelDomainError: If t is negative.
    """
    tt = np.asarray(t, dtype=float)
    _check_nonnegative(tt)
    ce = consts.effective_c

    if ce == 0.0:
        out = tt.copy()
    else:
        root = math.sqrt(abs(ce))
        closed = np.sinh(root * tt) / root if ce > 0 else np.sin(root * tt) / root
        series = tt * (1.0 + ce * tt**2 / 6.0 + ce**2 * tt**4 / 120.0)
        out = np.where(abs(ce) * tt**2 < SERIES_THRESHOLD, series, closed)
    return _as_output(out, t)


def c_c(consts: ModelConstants, t: ArrayLike) -> ArrayLike:
    """Evaluate the generalized cosine c_c(t) = s_c'(t)."""
    tt = np.asarray(t, dtype=float)
    _check_nonnegative(tt)
    ce = consts.effective_c

    if ce == 0.0:
        out = np.ones_like(tt)
    else:
        root = math.sqrt(abs(ce))
        closed = np.cosh(root * tt) if ce > 0 else np.cos(root * tt)
        series = 1.0 + ce * tt**2 / 2.0 + ce**2 * tt**4 / 24.0
        out = np.where(abs(ce) * tt**2 < SERIES_THRESHOLD, series, closed)
    return _as_output(out, t)


def _pole_guard(consts: ModelConstants, t: np.ndarray, s: np.ndarray) -> None:
    scale = 1.0 + t
    if np.any(t == 0.0) or np.any(np.abs(s) <= 1e-14 * scale):
        raise ModelDomainError(f"s_c vanishes on the requested range (c={consts.c}, n={consts.n})")


def ctg_c(consts: ModelConstants, t: ArrayLike) -> ArrayLike:
    """Evaluate Ctg_c(t) = c_c(t)/s_c(t).

    Raises:
        ModelDomainError: At t = 0 and at the poles t = j*pi/sqrt(-c).
    """
    tt = np.asarray(t, dtype=float)
    s = np.asarray(s_c(consts, tt))
    _pole_guard(consts, tt, s)
    out = np.asarray(c_c(consts, tt)) / s
    return _as_output(out, t)


def model_density(consts: ModelConstants, t: ArrayLike) -> ArrayLike:
    """Model volume density s_c(t)^(n-1)."""
    s = np.asarray(s_c(consts, t))
    return _as_output(s ** consts.m, t)


def phi_c(consts: ModelConstants, t: ArrayLike) -> ArrayLike:
    """Model Riccati solution Phi_c(t) = (n-1) Ctg_c(t).

    Raises:
        ModelDomainError: Where s_c(t) <= 0, i.e. at or beyond the first model conjugate point.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt >= consts.first_pole):
        raise ModelDomainError(
            f"Phi_c undefined beyond the first model conjugate point {consts.first_pole!r}"
        )
    out = consts.m * np.asarray(ctg_c(consts, tt))
    return _as_output(out, t)
