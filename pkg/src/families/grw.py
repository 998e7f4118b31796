"""Generalized Robertson-Walker spacetimes -dt^2 + f(t)^2 g_F with constant-curvature fibers.

For unit g_F vectors Y, Z with g_F(Y, Z) = 0 and X = d_t + lam Z (lam^2 f^2 <= 1):

    Ric(X, X) = -m f''/f + lam^2 (Ric_F(Z, Z) + f f'' + (m - 1) f'^2)
    K(Span{d_t + lam Y, Z}) = (-f f'' + lam^2 f^2 (k_F + f'^2)) / ((-1 + lam^2 f^2) f^2)

Both curvature bounds reduce to a parabola H(lam) = a + b lam^2 on [0, 1/f], so checking the
endpoints lam = 0 and lam = 1/f decides the bound at each t.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numpy.polynomial import Polynomial

from ..exceptions import InputDomainError, ModelDomainError, UnsupportedDimensionError
from ..geometry import ChartDomain, CoordinateMetric
from ..models import BoundViolation, GRWConditionVerdict
from .space_forms import stereographic_domain, stereographic_factor, stereographic_gradient

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

WARPING_FORMS = ("cosh", "exp", "cos", "poly")
CONDITION_SAMPLES = 201
EQUALITY_TOL = 1e-10
CONSISTENCY_STEP = 1e-4
CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class WarpingFunction:
    """Analytic warping function with exact first and second derivatives.

    Forms: ``cosh`` a cosh(b t), ``exp`` a exp(b t), ``cos`` a cos(b t) with coeffs (a, b),
    and ``poly`` with coefficients in increasing degree.
    """

    form: str
    coeffs: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self) -> None:
        if self.form not in WARPING_FORMS:
            raise InputDomainError(
                f"unknown warping form '{self.form}', expected one of {WARPING_FORMS}"
            )
        if self.form != "poly" and len(self.coeffs) != 2:
            raise InputDomainError(f"warping form '{self.form}' takes coefficients (a, b)")
        if self.form == "poly" and not self.coeffs:
            raise InputDomainError("polynomial warping function needs at least one coefficient")

    def _derivative(self, t: ArrayLike, order: int) -> ArrayLike:
        tt = np.asarray(t, dtype=float)
        if self.form == "poly":
            out = Polynomial(self.coeffs).deriv(order)(tt)
        else:
            a, b = self.coeffs
            if self.form == "exp":
                out = a * b**order * np.exp(b * tt)
            elif self.form == "cosh":
                out = a * b**order * (np.sinh(b * tt) if order % 2 else np.cosh(b * tt))
            else:
                wave = np.cos(b * tt) if order % 2 == 0 else np.sin(b * tt)
                out = a * b**order * (1.0 if order == 0 else -1.0) * wave
        return float(out) if np.ndim(t) == 0 else np.asarray(out)

    def f(self, t: ArrayLike) -> ArrayLike:
        return self._derivative(t, 0)

    def df(self, t: ArrayLike) -> ArrayLike:
        return self._derivative(t, 1)

    def d2f(self, t: ArrayLike) -> ArrayLike:
        return self._derivative(t, 2)


@dataclass(frozen=True)
class GRWData:
    """Warping function, fiber dimension m and fiber curvature k_F on a time interval."""

    warping: WarpingFunction
    m: int
    k_F: float = 0.0
    interval: tuple[float, float] = (-3.0, 3.0)

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ModelDomainError(f"fiber dimension must be at least 1, got {self.m}")
        lo, hi = self.interval
        if not lo < hi:
            raise ModelDomainError(f"empty time interval {self.interval}")
        self._check_warping()

    @property
    def n(self) -> int:
        return self.m + 1

    @property
    def fiber_ricci(self) -> float:
        """Ric_F(Z, Z) for a unit fiber vector Z."""
        return (self.m - 1) * self.k_F

    def sample_times(self, samples: int = CONDITION_SAMPLES) -> np.ndarray:
        """Interior points of the time interval."""
        lo, hi = self.interval
        return np.linspace(lo, hi, samples + 2)[1:-1]

    def base_point(self) -> np.ndarray:
        """t = 0 when it lies in the interval, otherwise its midpoint; fiber origin."""
        lo, hi = self.interval
        t0 = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
        return np.concatenate([[t0], np.zeros(self.m)])

    def _check_warping(self) -> None:
        t = self.sample_times()
        f = np.asarray(self.warping.f(t))
        if np.any(f <= 0):
            raise ModelDomainError(f"warping function must be positive on {self.interval}")
        h = CONSISTENCY_STEP
        inner = t[(t - 2 * h > self.interval[0]) & (t + 2 * h < self.interval[1])]
        w = self.warping
        fd1 = (np.asarray(w.f(inner + h)) - np.asarray(w.f(inner - h))) / (2 * h)
        fd2 = (np.asarray(w.df(inner + h)) - np.asarray(w.df(inner - h))) / (2 * h)
        for label, fd, exact in (("f'", fd1, w.df(inner)), ("f''", fd2, w.d2f(inner))):
            exact = np.asarray(exact)
            if np.any(np.abs(fd - exact) > CONSISTENCY_TOL * (1.0 + np.abs(exact))):
                raise ModelDomainError(f"{label} is inconsistent with f for form '{w.form}'")


@dataclass(frozen=True)
class Parabola:
    """H(lam) = a + b lam^2 on [0, lam_max]; the curvature bound holds where H >= 0."""

    a: float
    b: float
    lam_max: float

    def __call__(self, lam: ArrayLike) -> ArrayLike:
        return self.a + self.b * np.asarray(lam) ** 2

    @property
    def endpoint(self) -> float:
        """H(lam_max), the null-limit value."""
        return self.a + self.b * self.lam_max**2

    @property
    def minimum(self) -> float:
        return min(self.a, self.endpoint)


def _values(data: GRWData, t: float) -> tuple[float, float, float]:
    lo, hi = data.interval
    if not lo < t < hi:
        raise ModelDomainError(f"t={t!r} outside the GRW interval {data.interval}")
    w = data.warping
    return float(w.f(t)), float(w.df(t)), float(w.d2f(t))


def grw_ricci_timelike(
    data: GRWData, t: float, lam: float = 0.0, fiber_ric_value: Optional[float] = None
) -> float:
    """Ric(X, X) for X = d_t + lam Z with Z a unit fiber vector.

    Raises:
        ModelDomainError: If lam^2 f(t)^2 > 1 (X spacelike) or t is outside the interval.
    """
    f, df, d2f = _values(data, t)
    if lam**2 * f**2 > 1.0 + 1e-12:
        raise ModelDomainError(f"X is spacelike: lam^2 f^2 = {lam**2 * f**2!r} > 1")
    ric_f = data.fiber_ricci if fiber_ric_value is None else fiber_ric_value
    m = data.m
    return -m * d2f / f + lam**2 * (ric_f + f * d2f + (m - 1) * df**2)


def grw_timelike_plane_curvature(data: GRWData, t: float, lam: float = 0.0) -> float:
    """Sectional curvature of the timelike plane Span{d_t + lam Y, Z}.

    Raises:
        ModelDomainError: If the plane is not timelike (lam^2 f^2 >= 1).
        UnsupportedDimensionError: If lam != 0 and the fiber has no second direction.
    """
    f, df, d2f = _values(data, t)
    if lam != 0.0 and data.m < 2:
        raise UnsupportedDimensionError("tilted timelike planes need a fiber of dimension >= 2")
    s = lam**2 * f**2
    if s >= 1.0:
        raise ModelDomainError(f"plane is not timelike: lam^2 f^2 = {s!r}")
    return (-f * d2f + s * (data.k_F + df**2)) / ((-1.0 + s) * f**2)


def ricci_parabola(
    data: GRWData, t: float, c: float, fiber_ric_value: Optional[float] = None
) -> Parabola:
    """H(lam) = Ric(X, X) - (n - 1) c g(X, X) along X = d_t + lam Z."""
    f, df, d2f = _values(data, t)
    m = data.m
    ric_f = data.fiber_ricci if fiber_ric_value is None else fiber_ric_value
    a = m * (c - d2f / f)
    b = ric_f + f * d2f + (m - 1) * df**2 - m * c * f**2
    return Parabola(a, b, 1.0 / f)


def sectional_parabola(data: GRWData, t: float, c: float) -> Parabola:
    """H(lam) = (K(pi_lam) - c)(1 - lam^2 f^2) for the planes of ``grw_timelike_plane_curvature``."""
    f, df, d2f = _values(data, t)
    a = d2f / f - c
    b = c * f**2 - data.k_F - df**2
    return Parabola(a, b, 1.0 / f)


def _condition_verdict(
    kind: str,
    c: float,
    t: np.ndarray,
    margin_a: np.ndarray,
    margin_b: np.ndarray,
    vacuous_b: bool,
    tol: float,
) -> GRWConditionVerdict:
    verdict = GRWConditionVerdict(
        kind=kind,
        c=c,
        condition_a_holds=bool(np.min(margin_a) >= -tol),
        condition_b_holds=bool(vacuous_b or np.min(margin_b) >= -tol),
        condition_a_equality=bool(np.max(np.abs(margin_a)) <= tol),
        condition_b_equality=bool(vacuous_b or np.max(np.abs(margin_b)) <= tol),
        condition_b_vacuous=vacuous_b,
        worst_a_margin=float(np.min(margin_a)),
        worst_b_margin=0.0 if vacuous_b else float(np.min(margin_b)),
        failures_a=[float(x) for x in t[margin_a < -tol]],
        failures_b=[] if vacuous_b else [float(x) for x in t[margin_b < -tol]],
    )
    logger.info(
        f"GRW {kind} conditions vs c={c:g}: (A) {verdict.condition_a_holds}, "
        f"(B) {verdict.condition_b_holds}{' (vacuous)' if vacuous_b else ''}"
    )
    return verdict


def grw_ricci_conditions(
    data: GRWData, c: float, samples: int = CONDITION_SAMPLES, tol: float = EQUALITY_TOL
) -> GRWConditionVerdict:
    """Conditions (A) f''/f <= c and (B) Ric_F >= (m - 1)(f f'' - f'^2) g_F on a t-grid.

    For m = 1 condition (B) holds automatically.
    """
    t = data.sample_times(samples)
    w = data.warping
    f, df, d2f = (np.asarray(v) for v in (w.f(t), w.df(t), w.d2f(t)))
    margin_a = c - d2f / f
    margin_b = data.fiber_ricci - (data.m - 1) * (f * d2f - df**2)
    return _condition_verdict("ricci", c, t, margin_a, margin_b, data.m == 1, tol)


def grw_sectional_conditions(
    data: GRWData, c: float, samples: int = CONDITION_SAMPLES, tol: float = EQUALITY_TOL
) -> GRWConditionVerdict:
    """Conditions (A) f''/f >= c and (B) K_F <= f f'' - f'^2 on a t-grid.

    A one-dimensional fiber has no planes, so (B) is vacuous for m = 1.
    """
    t = data.sample_times(samples)
    w = data.warping
    f, df, d2f = (np.asarray(v) for v in (w.f(t), w.df(t), w.d2f(t)))
    margin_a = d2f / f - c
    margin_b = (f * d2f - df**2) - data.k_F
    return _condition_verdict("sectional", c, t, margin_a, margin_b, data.m == 1, tol)


def build_grw_metric(data: GRWData) -> CoordinateMetric:
    """Assemble the chart (t, x_1, ..., x_m) with the fiber in stereographic coordinates.

    Raises:
        UnsupportedDimensionError: If m is not in {1, 2, 3}.
    """
    m = data.m
    if m not in (1, 2, 3):
        raise UnsupportedDimensionError(f"builtin GRW charts cover fiber dimension 1-3, got {m}")
    n = m + 1
    k = data.k_F if m >= 2 else 0.0
    w = data.warping

    def components(x: np.ndarray) -> np.ndarray:
        f = float(w.f(x[0]))
        g = np.zeros((n, n))
        g[0, 0] = -1.0
        g[1:, 1:] = f**2 * stereographic_factor(k, x[1:]) * np.eye(m)
        return g

    def derivatives(x: np.ndarray) -> np.ndarray:
        f, df = float(w.f(x[0])), float(w.df(x[0]))
        dg = np.zeros((n, n, n))
        dg[0, 1:, 1:] = 2.0 * f * df * stereographic_factor(k, x[1:]) * np.eye(m)
        grad = stereographic_gradient(k, x[1:])
        for j in range(m):
            dg[1 + j, 1:, 1:] = f**2 * grad[j] * np.eye(m)
        return dg

    fiber = stereographic_domain(k, m)
    lower = np.concatenate([[data.interval[0]], fiber.lower])
    upper = np.concatenate([[data.interval[1]], fiber.upper])
    predicate = None
    if fiber.predicate is not None:
        fiber_predicate = fiber.predicate

        def predicate(x: np.ndarray) -> bool:
            return fiber_predicate(x[1:])

    metric = CoordinateMetric(
        n,
        components,
        derivatives,
        domain=ChartDomain(lower, upper, predicate),
        name=f"grw({w.form}{list(w.coeffs)}, k_F={data.k_F:g}, m={m})",
        time_axis=0,
    )
    logger.debug(f"Built {metric.name} on t in {data.interval}")
    return metric


def find_bound_violation(
    data: GRWData,
    c: float,
    kind: str,
    metric: Optional[CoordinateMetric] = None,
    t_samples: int = 21,
    lam_samples: int = 11,
    slack: float = 1e-8,
) -> BoundViolation:
    """Sample timelike vectors (``ricci``) or planes (``sectional``) of the assembled chart.

    The margin is H(lam) evaluated from ``metric.ricci`` or ``metric.sectional`` at the fiber
    origin for lam in [0, 1/f]; the worst sample is returned.

    Raises:
        InputDomainError: If kind is not ``ricci`` or ``sectional``.
        UnsupportedDimensionError: For sectional sampling with m < 2.
    """
    if kind not in ("ricci", "sectional"):
        raise InputDomainError(f"unknown bound kind '{kind}'")
    if kind == "sectional" and data.m < 2:
        raise UnsupportedDimensionError("sectional sampling needs a fiber of dimension >= 2")
    metric = metric or build_grw_metric(data)
    n = data.n
    e = np.eye(n)
    worst: Optional[BoundViolation] = None

    for t in data.sample_times(t_samples):
        x = np.concatenate([[t], np.zeros(data.m)])
        f = float(data.warping.f(t))
        if kind == "ricci":
            ric = metric.ricci(x)
            g = metric.metric(x)
            lams = np.linspace(0.0, 1.0 / f, lam_samples)
            margins = []
            for lam in lams:
                X = e[0] + lam * e[1]
                margins.append(float(X @ ric @ X) - data.m * c * float(X @ g @ X))
        else:
            rlow = metric.lowered_riemann(x)
            g = metric.metric(x)
            lams = np.linspace(0.0, (1.0 - 1e-6) / f, lam_samples)
            margins = []
            for lam in lams:
                u, v = e[0] + lam * e[1], e[2]
                gram = float(u @ g @ u) * float(v @ g @ v) - float(u @ g @ v) ** 2
                curvature = float(np.einsum("abcd,a,b,c,d->", rlow, u, v, v, u)) / gram
                margins.append((curvature - c) * (1.0 - lam**2 * f**2))
        i = int(np.argmin(margins))
        if worst is None or margins[i] < worst.margin:
            worst = BoundViolation(
                kind=kind, t=float(t), lam=float(lams[i]), margin=margins[i], violated=False
            )

    assert worst is not None
    worst.violated = worst.margin < -slack
    if worst.violated:
        logger.info(f"{kind} bound c={c:g} violated at t={worst.t:.4g}, lam={worst.lam:.4g}")
    return worst


def grw_from_params(
    form: str,
    coeffs: tuple[float, ...],
    m: int,
    k_F: float = 0.0,
    interval: Optional[tuple[float, float]] = None,
) -> GRWData:
    """Convenience constructor used by the configuration layer."""
    warping = WarpingFunction(form, tuple(float(x) for x in coeffs))
    if interval is None:
        if form == "cos":
            half = 0.5 * math.pi / abs(warping.coeffs[1])
            interval = (-0.95 * half, 0.95 * half)
        else:
            interval = (-3.0, 3.0)
    return GRWData(warping, m, k_F, interval)
