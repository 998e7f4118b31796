"""Radial geodesics with a parallel orthonormal frame and their tidal operators."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from ..exceptions import (
    ChartExitError,
    InputDomainError,
    IntegrationStallError,
    OutOfChartError,
    ProfileRangeError,
)
from ..models import SignatureMode
from .metric import CoordinateMetric, gram_schmidt

logger = logging.getLogger(__name__)

GRID_STEP = 0.025
REORTHONORMALIZE_EVERY = 32
UNIT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RadialSystem:
    """A radial geodesic with parallel frame and tidal matrices on an output grid.

    ``tidal[k][i, j] = eta_i * R(E_j, gamma', gamma', E_i)`` at ``grid[k]``, so the frame
    components of a Jacobi field obey a'' + tidal @ a = 0.
    """

    base_point: np.ndarray
    direction: np.ndarray
    epsilon: int
    frame_signs: np.ndarray
    grid: np.ndarray
    path: np.ndarray
    velocity: np.ndarray
    frame: np.ndarray
    tidal: np.ndarray

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    @property
    def size(self) -> int:
        return int(self.frame_signs.size)

    def normalization_drift(self, metric: CoordinateMetric) -> float:
        """Max |g(gamma', gamma') - epsilon| along the path."""
        return max(
            abs(metric.inner(x, v, v) - self.epsilon) for x, v in zip(self.path, self.velocity)
        )

    def frame_drift(self, metric: CoordinateMetric) -> float:
        """Max deviation of the frame from orthonormality and from orthogonality to gamma'."""
        worst = 0.0
        eta = np.diag(self.frame_signs)
        for x, v, frame in zip(self.path, self.velocity, self.frame):
            g = metric.metric(x)
            worst = max(worst, float(np.max(np.abs(frame @ g @ frame.T - eta))))
            worst = max(worst, float(np.max(np.abs(frame @ g @ v))))
        return worst


class TidalProfile(ABC):
    """A tidal operator t -> R_xi(t) on [0, t_max] with frame signs eta."""

    def __init__(self, size: int, frame_signs: Optional[np.ndarray], t_max: float) -> None:
        self.size = size
        self.frame_signs = (
            np.ones(size) if frame_signs is None else np.asarray(frame_signs, dtype=float)
        )
        self.t_max = t_max

    def _check(self, t: float) -> None:
        if t < -1e-12 or t > self.t_max * (1.0 + 1e-12) + 1e-12:
            raise ProfileRangeError(f"profile evaluated at t={t!r} outside [0, {self.t_max!r}]")

    @abstractmethod
    def __call__(self, t: float) -> np.ndarray:
        """Tidal matrix at t in the frame."""


class SplineProfile(TidalProfile):
    """Cubic interpolation of tidal matrices, exact at the grid points."""

    def __init__(
        self, grid: np.ndarray, matrices: np.ndarray, frame_signs: Optional[np.ndarray] = None
    ) -> None:
        super().__init__(matrices.shape[1], frame_signs, float(grid[-1]))
        self.grid = np.asarray(grid, dtype=float)
        self._spline = CubicSpline(self.grid, matrices, axis=0)

    def __call__(self, t: float) -> np.ndarray:
        self._check(t)
        return np.asarray(self._spline(min(max(t, 0.0), self.t_max)))


class ConstantProfile(TidalProfile):
    """Tidal operator that does not depend on t."""

    def __init__(
        self,
        matrix: np.ndarray,
        frame_signs: Optional[np.ndarray] = None,
        t_max: float = math.inf,
    ) -> None:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        super().__init__(matrix.shape[0], frame_signs, t_max)
        self.matrix = matrix

    @classmethod
    def scalar(cls, value: float, size: int, t_max: float = math.inf) -> "ConstantProfile":
        return cls(value * np.eye(size), t_max=t_max)

    def __call__(self, t: float) -> np.ndarray:
        self._check(t)
        return self.matrix


def tidal_profile(system: RadialSystem) -> SplineProfile:
    """Interpolate the tidal matrices of a radial system in t."""
    return SplineProfile(system.grid, system.tidal, system.frame_signs)


def _christoffel_rhs(
    metric: CoordinateMetric, dim: int, frames: int
) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        x, v = y[:dim], y[dim : 2 * dim]
        try:
            gamma = metric.christoffel(x)
        except OutOfChartError:
            # Trial stage past the chart boundary; the exit event ends the step.
            gamma = np.zeros((dim, dim, dim))
        acc = -np.einsum("lmn,m,n->l", gamma, v, v)
        out = [v, acc]
        if frames:
            frame = y[2 * dim :].reshape(frames, dim)
            out.append(-np.einsum("lmn,m,in->il", gamma, v, frame).ravel())
        return np.concatenate(out)

    return rhs


def _exit_event(metric: CoordinateMetric, dim: int) -> Callable[[float, np.ndarray], float]:
    def event(_t: float, y: np.ndarray) -> float:
        x = y[:dim]
        return metric.domain.margin(x) - metric.fd_guard(x)

    event.terminal = True  # type: ignore[attr-defined]
    event.direction = -1  # type: ignore[attr-defined]
    return event


def _reorthonormalize(g: np.ndarray, velocity: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Project the frame back onto an orthonormal frame of the complement of gamma'."""
    v = velocity / math.sqrt(abs(velocity @ g @ velocity))
    vectors, _ = gram_schmidt(g, [v, *frame], frame.shape[0] + 1, tiny=0.0)
    return np.asarray(vectors[1:])


def _tidal_matrix(
    metric: CoordinateMetric, x: np.ndarray, v: np.ndarray, frame: np.ndarray, eta: np.ndarray
) -> np.ndarray:
    riem = metric.riemann(x)
    g = metric.metric(x)
    # R(E_j, v) v for every frame vector j
    curv = np.einsum("rsmn,jm,n,s->jr", riem, frame, v, v)
    return eta[:, None] * (frame @ g @ curv.T)


def integrate_radial(
    metric: CoordinateMetric,
    p: np.ndarray,
    xi: np.ndarray,
    t_max: float,
    tol: float = 1e-10,
    mode: Optional[SignatureMode] = None,
    grid_step: float = GRID_STEP,
) -> RadialSystem:
    """Integrate the geodesic from p in direction xi with a parallel frame.

    Args:
        metric: Chart metric.
        p: Base point (coordinates).
        xi: Unit initial velocity (coordinate components).
        t_max: Final affine parameter.
        tol: Relative tolerance of the adaptive integrator.
        mode: Expected causal character; inferred from g(xi, xi) when omitted.
        grid_step: Target spacing of the output grid.

    Returns:
        RadialSystem sampled on an equispaced grid.

    Raises:
        InputDomainError: If xi is not unit, has the wrong causal character or is past-directed.
        ChartExitError: If the geodesic leaves the chart before t_max.
        IntegrationStallError: If the integrator fails to advance.
    """
    p = np.asarray(p, dtype=float)
    xi = np.asarray(xi, dtype=float)
    dim = metric.dim
    g0 = metric.metric(p)
    norm2 = float(xi @ g0 @ xi)
    if abs(abs(norm2) - 1.0) > UNIT_TOLERANCE:
        raise InputDomainError(f"direction is not unit: g(xi, xi) = {norm2!r}")
    epsilon = -1 if norm2 < 0 else 1
    if mode is not None and mode.epsilon != epsilon:
        raise InputDomainError(f"direction with g(xi, xi) = {norm2!r} does not match mode {mode.value}")
    if epsilon < 0 and metric.time_axis is not None and xi[metric.time_axis] <= 0:
        raise InputDomainError("timelike direction is not future-directed")

    seeds = [xi, *np.eye(dim)]
    vectors, signs = gram_schmidt(g0, seeds, dim)
    frame = np.asarray(vectors[1:])
    eta = np.asarray(signs[1:], dtype=float)

    steps = max(REORTHONORMALIZE_EVERY, int(math.ceil(t_max / grid_step)))
    grid = np.linspace(0.0, t_max, steps + 1)
    rhs = _christoffel_rhs(metric, dim, dim - 1)
    event = _exit_event(metric, dim)

    states = [np.concatenate([p, xi, frame.ravel()])]
    for start in range(0, steps, REORTHONORMALIZE_EVERY):
        stop = min(start + REORTHONORMALIZE_EVERY, steps)
        t_eval = grid[start : stop + 1]
        sol = solve_ivp(
            rhs,
            (t_eval[0], t_eval[-1]),
            states[-1],
            method="DOP853",
            t_eval=t_eval,
            rtol=tol,
            atol=tol * 1e-2,
            events=event,
        )
        if sol.status == -1:
            raise IntegrationStallError(f"geodesic integration stalled: {sol.message}")
        if sol.status == 1 and sol.t_events[0].size:
            exit_time = float(sol.t_events[0][0])
            raise ChartExitError(
                f"radial geodesic left the chart at t={exit_time!r} < {t_max!r}", exit_time
            )
        segment = sol.y.T
        last = segment[-1].copy()
        x, v = last[:dim], last[dim : 2 * dim]
        fixed = _reorthonormalize(metric.metric(x), v, last[2 * dim :].reshape(dim - 1, dim))
        last[2 * dim :] = fixed.ravel()
        states.extend(segment[1:-1])
        states.append(last)

    y = np.asarray(states)
    path = y[:, :dim]
    velocity = y[:, dim : 2 * dim]
    frames = y[:, 2 * dim :].reshape(-1, dim - 1, dim)
    tidal = np.stack(
        [_tidal_matrix(metric, x, v, f, eta) for x, v, f in zip(path, velocity, frames)]
    )
    logger.debug(f"Integrated radial geodesic to t={t_max:.4g} on {steps + 1} grid points")

    return RadialSystem(
        base_point=p,
        direction=xi,
        epsilon=epsilon,
        frame_signs=eta,
        grid=grid,
        path=path,
        velocity=velocity,
        frame=frames,
        tidal=tidal,
    )


def exp_map(
    metric: CoordinateMetric, p: np.ndarray, v: np.ndarray, tol: float = 1e-10
) -> np.ndarray:
    """Shoot the geodesic with initial velocity v for unit time.

    Raises:
        ChartExitError: If the geodesic leaves the chart.
        IntegrationStallError: If the integrator fails.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return p.copy()
    dim = metric.dim
    sol = solve_ivp(
        _christoffel_rhs(metric, dim, 0),
        (0.0, 1.0),
        np.concatenate([p, v]),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        events=_exit_event(metric, dim),
    )
    if sol.status == -1:
        raise IntegrationStallError(f"geodesic shooting stalled: {sol.message}")
    if sol.status == 1 and sol.t_events[0].size:
        raise ChartExitError("geodesic shooting left the chart", float(sol.t_events[0][0]))
    return np.asarray(sol.y[:dim, -1])
