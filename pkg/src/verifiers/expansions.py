"""Small-t expansions of Jacobi fields and the local volume comparisons they imply.

Near the base point det A(t) = t^m - Ric(xi, xi) t^(m+2) / 6 + O(t^(m+3)) and the frame
components of A(t) e_i are t delta_ij - (tidal_ij / 6) t^3 + O(t^4). A strict Ricci
ordering at a point therefore orders det A, and with it the volumes of small subsets.
"""

import logging
import math
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ..exceptions import (
    ExpansionWindowError,
    HypothesisViolatedError,
    RicciEqualError,
    SearchWindowError,
    UnsupportedModeError,
)
from ..geometry import CoordinateMetric, JacobiSolution, ModelConstants
from ..models import (
    BallComparisonReport,
    ExpansionFit,
    JacobiExpansionReport,
    LocalComparisonReport,
    SignatureMode,
)
from ..volumes import (
    ConstantCut,
    DirectionRun,
    SCLVSpec,
    direction_measure,
    solve_directions,
    summarize_volume,
)

logger = logging.getLogger(__name__)

FIT_WINDOW = (0.02, 0.2)
FIT_NODES = 40
MAX_FIT_TOL = 1e-10
OFF_DIAGONAL_LINEAR_TOL = 1e-6
RICCI_EQUAL_TOL = 1e-9


def _window_times(sol: JacobiSolution, window: tuple[float, float], nodes: int) -> np.ndarray:
    lo, hi = window
    if not 0.0 < lo < hi <= FIT_WINDOW[1]:
        raise ExpansionWindowError(f"fit window {window} must lie inside (0, {FIT_WINDOW[1]}]")
    if sol.t_max < hi:
        raise ExpansionWindowError(f"solution ends at {sol.t_max!r}, before the fit window end {hi!r}")
    if sol.tol > MAX_FIT_TOL:
        raise ExpansionWindowError(f"solution tolerance {sol.tol:g} too coarse for the fit")
    if sol.first_conjugate is not None and sol.first_conjugate <= hi:
        raise ExpansionWindowError(f"conjugate point at {sol.first_conjugate!r} inside the window")
    return np.geomspace(lo, hi, nodes)


def _fit(t: np.ndarray, y: np.ndarray, powers: Sequence[int]) -> tuple[np.ndarray, float]:
    design = np.column_stack([t**k for k in powers])
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ coeffs - y) ** 2)))
    return coeffs, residual


def fit_detA_expansion(
    sol: JacobiSolution, window: tuple[float, float] = FIT_WINDOW, nodes: int = FIT_NODES
) -> ExpansionFit:
    """Fit det A(t)/t^m - 1 by 1, t^2, t^3, t^4 on log-spaced nodes; Ric = -6 * [t^2].

    Raises:
        ExpansionWindowError: If the solution does not resolve the window.
    """
    t = _window_times(sol, window, nodes)
    m = sol.size
    y = np.asarray(sol.det_at(t)) / t**m - 1.0
    coeffs, residual = _fit(t, y, (0, 2, 3, 4))
    fit = ExpansionFit(
        m=m,
        leading_check=float(abs(coeffs[0])),
        ricci_estimate=float(-6.0 * coeffs[1]),
        fit_window=(float(t[0]), float(t[-1])),
        residual=residual,
        coefficients=[float(x) for x in coeffs],
    )
    logger.debug(f"det A fit: Ric estimate {fit.ricci_estimate:.6g}, residual {residual:.2e}")
    return fit


def fit_jacobi_expansion(
    sol: JacobiSolution,
    index: int,
    window: tuple[float, float] = FIT_WINDOW,
    nodes: int = FIT_NODES,
) -> JacobiExpansionReport:
    """Fit the frame components of J_i = A(t) e_i.

    The diagonal component is fitted as t + k3 t^3 + k4 t^4 + k5 t^5, giving
    K(Span{gamma', E_i}) = -6 epsilon k3. Off-diagonal components are fitted with a free
    linear term, which must vanish for them to be O(t^3).

    Raises:
        ExpansionWindowError: If the solution does not resolve the window.
        IndexError: If index is not a frame index.
    """
    m = sol.size
    if not 0 <= index < m:
        raise IndexError(f"frame index {index} outside 0..{m - 1}")
    t = _window_times(sol, window, nodes)
    A, _ = sol.at(t)
    diag, residual = _fit(t, A[:, index, index] - t, (3, 4, 5))
    linear = []
    for j in range(m):
        if j == index:
            continue
        coeffs, _ = _fit(t, A[:, j, index], (1, 3, 4))
        linear.append(float(coeffs[0]))
    eps = sol.epsilon
    return JacobiExpansionReport(
        index=index,
        epsilon=eps,
        diagonal_coefficient=float(diag[0]),
        sectional_estimate=float(-6.0 * eps * diag[0]),
        off_diagonal_linear=linear,
        off_diagonal_cubic=all(abs(x) <= OFF_DIAGONAL_LINEAR_TOL for x in linear),
        fit_window=(float(t[0]), float(t[-1])),
        residual=residual,
    )


def _ricci_along(metric: CoordinateMetric, p: np.ndarray, frame_vector: np.ndarray) -> float:
    basis, _ = metric.orthonormal_basis(p)
    v = basis @ frame_vector
    return float(v @ metric.ricci(p) @ v)


def _first_crossing(run1: DirectionRun, run2: DirectionRun, sign: float) -> Optional[float]:
    """First t where sign * (det A_2 - det A_1) stops being positive."""
    sol1, sol2 = run1.solution, run2.solution
    assert sol1 is not None and sol2 is not None
    grid = sol1.grid
    diff = sign * (np.asarray(sol2.det_at(grid)) - np.asarray(sol1.det_at(grid)))

    def gap(t: float) -> float:
        return sign * (float(sol2.det_at(t)) - float(sol1.det_at(t)))

    start = int(np.searchsorted(grid, sol1.t_min))
    for i in range(start, grid.size):
        if diff[i] <= 0.0:
            if i == start:
                return float(grid[i])
            return float(brentq(gap, grid[i - 1], grid[i], xtol=1e-12))
    return None


def _default_xi(spec: SCLVSpec) -> np.ndarray:
    xi = np.zeros(spec.dim)
    xi[0 if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE else 1] = 1.0
    return xi


def local_comparison(
    metric1: CoordinateMetric,
    metric2: CoordinateMetric,
    p1: np.ndarray,
    p2: np.ndarray,
    spec: SCLVSpec,
    xi: Optional[np.ndarray] = None,
    t_window: float = 1.0,
    tol: float = 1e-10,
    threads: int = 1,
) -> LocalComparisonReport:
    """Strict local volume ordering from a strict Ricci ordering at the base points.

    Directions are identified through the orthonormal frames of both metrics. Ric_1(xi, xi)
    > Ric_2(xi, xi) forces det A_1 < det A_2 on (0, delta); delta is the first crossing over
    the direction set of ``spec`` and the volumes are compared on the cone with cut delta/2.

    Raises:
        RicciEqualError: If the Ricci curvatures along xi coincide.
        SearchWindowError: If the ordering fails already at the first resolved time.
    """
    xi = _default_xi(spec) if xi is None else np.asarray(xi, dtype=float)
    ric1 = _ricci_along(metric1, p1, xi)
    ric2 = _ricci_along(metric2, p2, xi)
    if abs(ric1 - ric2) <= RICCI_EQUAL_TOL * (1.0 + abs(ric1) + abs(ric2)):
        raise RicciEqualError(f"Ric_1(xi, xi) = {ric1!r} equals Ric_2(xi, xi) = {ric2!r}")
    sign = 1.0 if ric1 > ric2 else -1.0
    expected = "vol_1 < vol_2" if sign > 0 else "vol_1 > vol_2"

    window_spec = replace(spec, cut=ConstantCut(t_window))
    runs1 = solve_directions(window_spec, metric1, p1, 1.0, tol, threads)
    runs2 = solve_directions(window_spec, metric2, p2, 1.0, tol, threads)
    crossings = []
    for run1, run2 in zip(runs1, runs2):
        if run1.solution is None or run2.solution is None:
            continue
        crossing = _first_crossing(run1, run2, sign)
        if crossing is not None:
            crossings.append(crossing)
    delta = min(crossings) if crossings else t_window
    first_resolved = max(r.solution.t_min for r in runs1 if r.solution is not None)
    if delta <= first_resolved:
        raise SearchWindowError(f"det A ordering fails already at t={delta!r}")

    scale = 0.5 * delta / t_window
    vol1 = summarize_volume(window_spec, runs1, scale).vol_U
    vol2 = summarize_volume(window_spec, runs2, scale).vol_U
    holds = vol1 < vol2 if sign > 0 else vol1 > vol2
    logger.info(
        f"Local comparison ({spec.mode.value}): Ric {ric1:.6g} vs {ric2:.6g}, delta={delta:.4g}, "
        f"vol {vol1:.10g} vs {vol2:.10g}"
    )
    return LocalComparisonReport(
        mode=spec.mode,
        ricci_1=ric1,
        ricci_2=ric2,
        expected=expected,
        delta=delta,
        crossings=crossings,
        vol_1=vol1,
        vol_2=vol2,
        holds=bool(holds),
    )


def riemannian_ball_comparison(
    metric1: CoordinateMetric,
    metric2: CoordinateMetric,
    p1: np.ndarray,
    p2: np.ndarray,
    r_grid: Sequence[float],
    tol: float = 1e-10,
    polar_nodes: int = 4,
    azimuth_nodes: int = 8,
    threads: int = 1,
) -> BallComparisonReport:
    """Compare small metric-ball volumes under a strict Ricci ordering on the unit sphere at p.

    Radii at or beyond the first det A crossing (the largest admissible epsilon) are skipped.

    Raises:
        UnsupportedModeError: If either metric is not Riemannian.
        RicciEqualError: If the Ricci curvatures coincide along some sampled direction.
        HypothesisViolatedError: If the Ricci ordering changes sign over the sphere.
        SearchWindowError: If no radius of the grid lies below epsilon.
    """
    for metric in (metric1, metric2):
        if -1 in metric.signature:
            raise UnsupportedModeError(f"{metric.name} is not Riemannian")
    radii = np.asarray(sorted(r_grid), dtype=float)
    if radii.size == 0 or radii[0] <= 0:
        raise SearchWindowError("ball radii must be positive")
    r_max = float(radii[-1])
    spec = SCLVSpec(
        ModelConstants(0.0, metric1.dim, SignatureMode.RIEMANNIAN),
        ConstantCut(r_max),
        polar_nodes=polar_nodes,
        azimuth_nodes=azimuth_nodes,
    )

    gaps = []
    for node in direction_measure(spec).nodes:
        gaps.append(_ricci_along(metric1, p1, node) - _ricci_along(metric2, p2, node))
    gaps_arr = np.asarray(gaps)
    if np.min(np.abs(gaps_arr)) <= RICCI_EQUAL_TOL:
        raise RicciEqualError("Ricci curvatures coincide along a sampled unit direction")
    if np.any(gaps_arr > 0) and np.any(gaps_arr < 0):
        raise HypothesisViolatedError("Ricci ordering changes sign over the unit sphere")
    sign = 1.0 if gaps_arr[0] > 0 else -1.0
    expected = "vol_1 < vol_2" if sign > 0 else "vol_1 > vol_2"

    runs1 = solve_directions(spec, metric1, p1, 1.0, tol, threads)
    runs2 = solve_directions(spec, metric2, p2, 1.0, tol, threads)
    crossings = []
    for run1, run2 in zip(runs1, runs2):
        if run1.solution is not None and run2.solution is not None:
            crossing = _first_crossing(run1, run2, sign)
            if crossing is not None:
                crossings.append(crossing)
    epsilon = min(crossings) if crossings else math.inf
    kept = [float(r) for r in radii if r < epsilon]
    skipped = [float(r) for r in radii if r >= epsilon]
    if not kept:
        raise SearchWindowError(f"no radius below epsilon = {epsilon!r}")
    if skipped:
        logger.warning(f"Skipping radii {skipped} at or beyond epsilon = {epsilon:.4g}")

    vol1 = [summarize_volume(spec, runs1, r / r_max).vol_U for r in kept]
    vol2 = [summarize_volume(spec, runs2, r / r_max).vol_U for r in kept]
    holds = all((a < b) if sign > 0 else (a > b) for a, b in zip(vol1, vol2))
    return BallComparisonReport(
        radii=kept,
        vol_1=vol1,
        vol_2=vol2,
        epsilon=epsilon if math.isfinite(epsilon) else r_max,
        skipped_radii=skipped,
        expected=expected,
        holds=holds,
    )
