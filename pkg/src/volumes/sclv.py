"""Star-shaped tangent subsets, polar quadrature and Bishop-Gromov ratio curves.

A subset is the set {t xi : 0 < t < cut(xi)} over a capped set of unit directions xi. The
directions are written in the orthonormal basis of ``CoordinateMetric.orthonormal_basis``
at the base point, so the same spec can be evaluated on different metrics.
"""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from ..exceptions import (
    ConjugatePointError,
    CutGridMismatchError,
    InputDomainError,
    ModelDomainError,
    UnsupportedDimensionError,
    UnsupportedModeError,
)
from ..geometry import (
    CoordinateMetric,
    JacobiSolution,
    ModelConstants,
    RadialSystem,
    integrate_radial,
    model_density,
    solve_jacobi,
    tidal_profile,
)
from ..models import DirectionIntegral, RatioCurve, RatioPoint, SignatureMode, VolumeReport

logger = logging.getLogger(__name__)

RADIAL_PANELS = 64
MONOTONE_SLACK = 1e-8


@dataclass(frozen=True)
class DirectionGrid:
    """Quadrature on a set of unit directions.

    ``coarse_weights`` live on the same nodes and integrate with half the resolution;
    their difference from ``weights`` estimates the direction quadrature error.
    """

    nodes: np.ndarray
    weights: np.ndarray
    coarse_weights: np.ndarray
    exact_measure: float

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


class CutFunction(ABC):
    """Cut function xi -> c_U(xi) > 0 on the direction set."""

    closed_form = True

    def values(self, grid: DirectionGrid) -> np.ndarray:
        return self.evaluate(grid.nodes)

    @abstractmethod
    def evaluate(self, directions: np.ndarray) -> np.ndarray:
        """Cut values at an array of unit directions, one per row."""

    @property
    @abstractmethod
    def max_value(self) -> float:
        """Upper bound of the cut over the direction set."""


@dataclass(frozen=True)
class ConstantCut(CutFunction):
    value: float

    def evaluate(self, directions: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(directions).shape[0], float(self.value))

    @property
    def max_value(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class TableCut(CutFunction):
    """Cut values supplied on the quadrature nodes, in node order."""

    table: tuple[float, ...]
    closed_form = False

    def values(self, grid: DirectionGrid) -> np.ndarray:
        if len(self.table) != grid.size:
            raise CutGridMismatchError(
                f"cut table has {len(self.table)} values, direction grid has {grid.size} nodes"
            )
        return np.asarray(self.table, dtype=float)

    def evaluate(self, directions: np.ndarray) -> np.ndarray:
        raise CutGridMismatchError("tabulated cut functions are only defined on their grid")

    @property
    def max_value(self) -> float:
        return float(max(self.table))


@dataclass(frozen=True)
class TwoLevelCut(CutFunction):
    """Smooth step between two levels across the hyperplane xi_1 = 0."""

    low: float
    high: float
    width: float = 0.1

    def evaluate(self, directions: np.ndarray) -> np.ndarray:
        x1 = np.atleast_2d(directions)[:, 1]
        return self.low + (self.high - self.low) * 0.5 * (1.0 + np.tanh(x1 / self.width))

    @property
    def max_value(self) -> float:
        return float(max(self.low, self.high))


@dataclass(frozen=True)
class SCLVSpec:
    """A star-shaped subset of the tangent space and its model constants."""

    consts: ModelConstants
    cut: CutFunction
    chi_max: Optional[float] = None
    scale_bound: float = 1.0
    rapidity_panels: int = 8
    azimuth_nodes: int = 8
    polar_nodes: int = 4
    grid: Optional[DirectionGrid] = None

    def __post_init__(self) -> None:
        if self.mode.is_lorentzian and (
            self.chi_max is None or not (0 < self.chi_max < math.inf)
        ):
            raise InputDomainError(
                "Lorentzian direction sets need a finite rapidity cap chi_max > 0"
            )
        if self.scale_bound < 1.0:
            raise InputDomainError(f"scale interval (0, b] needs b >= 1, got {self.scale_bound!r}")
        if self.rapidity_panels < 4 or self.rapidity_panels % 4:
            raise InputDomainError("rapidity_panels must be a positive multiple of 4")
        if self.azimuth_nodes < 2 or self.azimuth_nodes % 2:
            raise InputDomainError("azimuth_nodes must be a positive even number")

    @property
    def mode(self) -> SignatureMode:
        return self.consts.mode

    @property
    def dim(self) -> int:
        return self.consts.n

    def with_c(self, c: float) -> "SCLVSpec":
        return replace(self, consts=self.consts.with_c(c))

    def with_cut(self, cut: CutFunction) -> "SCLVSpec":
        return replace(self, cut=cut)


@dataclass
class DirectionRun:
    """Radial system and Jacobi solution for one quadrature direction."""

    index: int
    direction: np.ndarray
    weight: float
    coarse_weight: float
    cut: float
    system: Optional[RadialSystem] = None
    solution: Optional[JacobiSolution] = None


def _simpson_rule(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Simpson nodes and weights on [a, b] with the half-resolution weights."""
    x = np.linspace(a, b, panels + 1)
    w = simpson(np.eye(panels + 1), x=x, axis=0)
    coarse = np.zeros(panels + 1)
    coarse[::2] = simpson(np.eye(panels // 2 + 1), x=x[::2], axis=0)
    return x, w, coarse


def _circle(count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    phi = 2.0 * math.pi * np.arange(count) / count
    w = np.full(count, 2.0 * math.pi / count)
    coarse = np.zeros(count)
    coarse[::2] = 4.0 * math.pi / count
    return np.column_stack([np.cos(phi), np.sin(phi)]), w, coarse


def _sphere2(polar: int, azimuth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z, wz = np.polynomial.legendre.leggauss(polar)
    ring, wr, cr = _circle(azimuth)
    rho = np.sqrt(1.0 - z**2)
    nodes = np.array(
        [
            [rho[i] * ring[j, 0], rho[i] * ring[j, 1], z[i]]
            for i in range(polar)
            for j in range(azimuth)
        ]
    )
    weights = np.outer(wz, wr).ravel()
    coarse = np.outer(wz, cr).ravel()
    return nodes, weights, coarse


def _sphere3(polar: int, azimuth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u, wu = np.polynomial.legendre.leggauss(polar + 2)
    alpha = 0.5 * math.pi * (u + 1.0)
    wa = 0.5 * math.pi * wu * np.sin(alpha) ** 2
    s2, w2, c2 = _sphere2(polar, azimuth)
    nodes = np.array([[math.cos(a), *(math.sin(a) * s)] for a in alpha for s in s2])
    return nodes, np.outer(wa, w2).ravel(), np.outer(wa, c2).ravel()


def _unit_sphere(dim: int, polar: int, azimuth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature on S^dim embedded in R^(dim + 1)."""
    if dim == 0:
        nodes = np.array([[1.0], [-1.0]])
        return nodes, np.ones(2), np.ones(2)
    if dim == 1:
        return _circle(azimuth)
    if dim == 2:
        return _sphere2(polar, azimuth)
    if dim == 3:
        return _sphere3(polar, azimuth)
    raise UnsupportedDimensionError(f"no builtin quadrature on S^{dim}")


_SPHERE_AREA = {0: 2.0, 1: 2.0 * math.pi, 2: 4.0 * math.pi, 3: 2.0 * math.pi**2}


def _exact_measure(mode: SignatureMode, n: int, chi: float) -> float:
    if mode is SignatureMode.RIEMANNIAN:
        return _SPHERE_AREA[n - 1]
    area = _SPHERE_AREA[n - 2]
    if mode is SignatureMode.LORENTZIAN_TIMELIKE:
        radial = {2: chi, 3: math.cosh(chi) - 1.0, 4: 0.25 * math.sinh(2 * chi) - 0.5 * chi}[n]
    else:
        radial = {2: 2 * chi, 3: 2 * math.sinh(chi), 4: chi + 0.5 * math.sinh(2 * chi)}[n]
    return area * radial


def direction_measure(spec: SCLVSpec) -> DirectionGrid:
    """Quadrature nodes and weights on the unit direction set of a spec.

    Lorentzian timelike directions are cosh(chi) e0 + sinh(chi) w with 0 <= chi <= chi_max and
    w on S^(n-2), weighted by sinh(chi)^(n-2). Spacelike directions are
    sinh(chi) e0 + cosh(chi) w with |chi| <= chi_max, weighted by cosh(chi)^(n-2). Riemannian
    directions cover S^(n-1).

    Raises:
        UnsupportedDimensionError: If n is outside {2, 3, 4} and no grid was supplied.
    """
    if spec.grid is not None:
        return spec.grid
    n = spec.dim
    if n not in (2, 3, 4):
        raise UnsupportedDimensionError(f"builtin direction grids cover n in {{2, 3, 4}}, got {n}")

    if spec.mode is SignatureMode.RIEMANNIAN:
        nodes, w, cw = _unit_sphere(n - 1, spec.polar_nodes, spec.azimuth_nodes)
        return DirectionGrid(nodes, w, cw, _exact_measure(spec.mode, n, 0.0))

    chi_max = float(spec.chi_max)  # type: ignore[arg-type]
    sphere, ws, cs = _unit_sphere(n - 2, spec.polar_nodes, spec.azimuth_nodes)
    if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE:
        chi, wc, cc = _simpson_rule(0.0, chi_max, spec.rapidity_panels)
        density = np.sinh(chi) ** (n - 2)
    else:
        chi, wc, cc = _simpson_rule(-chi_max, chi_max, spec.rapidity_panels)
        density = np.cosh(chi) ** (n - 2)

    nodes, weights, coarse = [], [], []
    for i, x in enumerate(chi):
        for j, w in enumerate(sphere):
            if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE:
                nodes.append([math.cosh(x), *(math.sinh(x) * w)])
            else:
                nodes.append([math.sinh(x), *(math.cosh(x) * w)])
            weights.append(wc[i] * density[i] * ws[j])
            coarse.append(cc[i] * density[i] * cs[j])
    return DirectionGrid(
        np.asarray(nodes),
        np.asarray(weights),
        np.asarray(coarse),
        _exact_measure(spec.mode, n, chi_max),
    )


def check_compatible(spec: SCLVSpec, metric: CoordinateMetric) -> None:
    if spec.dim != metric.dim:
        raise UnsupportedDimensionError(
            f"spec has n={spec.dim}, metric {metric.name} has n={metric.dim}"
        )
    if spec.mode.is_lorentzian and not metric.is_lorentzian:
        raise UnsupportedModeError(f"{spec.mode.value} directions need a Lorentzian metric")
    if spec.mode is SignatureMode.RIEMANNIAN and -1 in metric.signature:
        raise UnsupportedModeError("riemannian mode needs a positive definite metric")


def _checked_cuts(spec: SCLVSpec, grid: DirectionGrid, r_max: float) -> np.ndarray:
    cuts = spec.cut.values(grid)
    if np.any(~np.isfinite(cuts)) or np.any(cuts <= 0):
        raise ModelDomainError("cut function must be finite and positive on every node")
    pole = spec.consts.first_pole
    if r_max * float(np.max(cuts)) >= pole:
        raise ModelDomainError(
            f"condition (2'): model diameter {r_max * float(np.max(cuts))!r} must stay below "
            f"pi/sqrt(-c) = {pole!r}"
        )
    return cuts


def solve_directions(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    r_max: float = 1.0,
    tol: float = 1e-10,
    threads: int = 1,
) -> list[DirectionRun]:
    """Integrate every quadrature direction out to r_max * cut(xi).

    Directions with zero weight are kept in the list but not solved.

    Raises:
        ConjugatePointError: If a conjugate point appears before r_max * cut(xi).
        ChartExitError: If a radial geodesic leaves the chart.
        ModelDomainError: If the model has a conjugate point inside the scaled set.
    """
    check_compatible(spec, metric)
    grid = direction_measure(spec)
    cuts = _checked_cuts(spec, grid, r_max)
    basis, _ = metric.orthonormal_basis(p)
    runs = [
        DirectionRun(
            k,
            grid.nodes[k],
            float(grid.weights[k]),
            float(grid.coarse_weights[k]),
            float(cuts[k]),
        )
        for k in range(grid.size)
    ]

    def solve(run: DirectionRun) -> DirectionRun:
        t_end = r_max * run.cut
        system = integrate_radial(metric, p, basis @ run.direction, t_end, tol, spec.mode)
        solution = solve_jacobi(tidal_profile(system), spec.consts, t_end, tol)
        if solution.first_conjugate is not None and solution.first_conjugate < t_end:
            raise ConjugatePointError(
                f"conjugate point at t={solution.first_conjugate!r} before cut {t_end!r} "
                f"in direction {run.direction.tolist()}",
                solution.first_conjugate,
                run.direction.tolist(),
            )
        run.system = system
        run.solution = solution
        return run

    active = [run for run in runs if run.weight != 0.0 or run.coarse_weight != 0.0]
    logger.info(
        f"Solving {len(active)} of {len(runs)} directions on {metric.name} ({threads} threads)"
    )
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        list(pool.map(solve, active))
    return runs


def _radial_integrals(
    solution: JacobiSolution, consts: ModelConstants, upper: float, panels: int
) -> tuple[float, float, float]:
    t = np.linspace(0.0, upper, 2 * panels + 1)
    det = np.asarray(solution.det_at(t))
    model = np.asarray(model_density(consts, t))
    fine = float(simpson(det, x=t))
    model_fine = float(simpson(model, x=t))
    err = abs(fine - float(simpson(det[::2], x=t[::2]))) / 15.0
    err += abs(model_fine - float(simpson(model[::2], x=t[::2]))) / 15.0
    return fine, model_fine, err


def summarize_volume(
    spec: SCLVSpec, runs: Sequence[DirectionRun], scale: float = 1.0, panels: int = RADIAL_PANELS
) -> VolumeReport:
    """Polar volumes of U^scale and U0^scale from solved directions."""
    rows: list[DirectionIntegral] = []
    vol = vol0 = coarse = coarse0 = radial_err = 0.0
    for run in runs:
        if run.solution is None:
            rows.append(
                DirectionIntegral(
                    direction=run.direction.tolist(), weight=run.weight, cut=run.cut,
                    detA_integral=0.0, model_integral=0.0,
                )
            )
            continue
        fine, model, err = _radial_integrals(run.solution, spec.consts, scale * run.cut, panels)
        rows.append(
            DirectionIntegral(
                direction=run.direction.tolist(),
                weight=run.weight,
                cut=run.cut,
                detA_integral=fine,
                model_integral=model,
                radial_error=err,
            )
        )
        vol += run.weight * fine
        vol0 += run.weight * model
        coarse += run.coarse_weight * fine
        coarse0 += run.coarse_weight * model
        radial_err += abs(run.weight) * err

    error = max(abs(vol - coarse), abs(vol0 - coarse0)) + radial_err
    return VolumeReport(
        dim=spec.dim,
        mode=spec.mode,
        c=spec.consts.c,
        scale=scale,
        vol_U=vol,
        vol_U0=vol0,
        quadrature_error_estimate=error,
        direction_count=len(runs),
        per_direction=rows,
    )


def volume(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    tol: float = 1e-10,
    threads: int = 1,
    scale: float = 1.0,
    panels: int = RADIAL_PANELS,
) -> VolumeReport:
    """Volume of exp_p(U) by polar quadrature of det A, and of the model set U0.

    Args:
        spec: Direction set, cut function and model constants.
        metric: Chart metric.
        p: Base point.
        tol: Integrator tolerance.
        threads: Worker threads for direction-wise integration.
        scale: Evaluate U^scale instead of U.
        panels: Radial Simpson panels (the error estimate uses half of them).

    Returns:
        VolumeReport with per-direction integrals.
    """
    runs = solve_directions(spec, metric, p, scale, tol, threads)
    report = summarize_volume(spec, runs, scale, panels)
    logger.info(f"vol(U)={report.vol_U:.12g}, vol(U0)={report.vol_U0:.12g}")
    return report


def _check_r_grid(spec: SCLVSpec, r_grid: Sequence[float]) -> np.ndarray:
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0 or np.any(r <= 0) or np.any(r > spec.scale_bound) or np.any(np.diff(r) <= 0):
        raise InputDomainError(
            f"r grid must be increasing inside (0, {spec.scale_bound!r}], got {r.tolist()}"
        )
    return r


def summarize_ratio(
    spec: SCLVSpec,
    runs: Sequence[DirectionRun],
    r_grid: Sequence[float],
    panels: int = RADIAL_PANELS,
) -> RatioCurve:
    """Ratio curve V(r) from directions solved up to max(r_grid) * cut."""
    points = []
    for r in _check_r_grid(spec, r_grid):
        report = summarize_volume(spec, runs, float(r), panels)
        points.append(
            RatioPoint(
                r=float(r),
                vol_Ur=report.vol_U,
                vol_U0r=report.vol_U0,
                V=report.vol_U / report.vol_U0,
            )
        )
    ratios = np.array([pt.V for pt in points])
    increase = float(np.max(np.diff(ratios))) if ratios.size > 1 else 0.0
    return RatioCurve(
        points=points, non_increasing=increase <= MONOTONE_SLACK, max_increase=increase
    )


def ratio_curve(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    r_grid: Sequence[float],
    tol: float = 1e-10,
    threads: int = 1,
    panels: int = RADIAL_PANELS,
) -> RatioCurve:
    """Bishop-Gromov ratio V(r) = vol(U^r) / vol(U0^r) with one solve per direction.

    Raises:
        InputDomainError: If the r grid is not increasing inside (0, b].
    """
    r = _check_r_grid(spec, r_grid)
    runs = solve_directions(spec, metric, p, float(r[-1]), tol, threads)
    curve = summarize_ratio(spec, runs, r, panels)
    logger.info(f"Ratio curve on {r.size} scales, max increase {curve.max_increase:.3e}")
    return curve


def flat_model_volume(spec: SCLVSpec, r: float = 1.0) -> float:
    """Closed-form vol(U0^r) for c = 0: (r^n / n) * integral of cut^n over directions."""
    grid = direction_measure(spec)
    cuts = spec.cut.values(grid)
    return float(r**spec.dim / spec.dim * np.sum(grid.weights * cuts**spec.dim))
