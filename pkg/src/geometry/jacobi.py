"""Matrix Jacobi equation along a radial geodesic and the checks built on it.

A(t) solves A'' + R_xi(t) A = 0 with A(0) = 0, A'(0) = I. The Riccati operator is
U = A' A^-1 with trace Phi, and psi = det A / s_c^(n-1) compares the density with the model.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..exceptions import (
    ConjugatePointError,
    IntegrationStallError,
    ModelDomainError,
    UnsupportedDimensionError,
)
from ..models import BoundDirection, PsiBoundReport, RauchReport, RiccatiReport
from .geodesic import TidalProfile
from .model_space import ModelConstants, model_density, phi_c

logger = logging.getLogger(__name__)

OUTPUT_SAMPLES = 401
T_MIN_FLOOR = 1e-4
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class JacobiSolution:
    """Solution of the matrix Jacobi equation sampled on a grid, with dense output."""

    consts: ModelConstants
    profile: TidalProfile
    tol: float
    grid: np.ndarray
    A: np.ndarray
    A_prime: np.ndarray
    detA: np.ndarray
    psi: np.ndarray
    Phi: np.ndarray
    phi_reliable: np.ndarray
    t_min: float
    first_conjugate: Optional[float]
    dense: Callable[..., np.ndarray]

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    @property
    def size(self) -> int:
        return self.profile.size

    @property
    def frame_signs(self) -> np.ndarray:
        return self.profile.frame_signs

    @property
    def epsilon(self) -> int:
        return self.consts.mode.epsilon

    def at(self, t: Union[float, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        """Dense evaluation of (A, A') at t (scalar or array)."""
        m = self.size
        y = np.asarray(self.dense(t))
        if y.ndim == 1:
            return y[: m * m].reshape(m, m), y[m * m :].reshape(m, m)
        cols = y.T
        return cols[:, : m * m].reshape(-1, m, m), cols[:, m * m :].reshape(-1, m, m)

    def det_at(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        A, _ = self.at(t)
        det = np.linalg.det(A)
        return float(det) if np.ndim(det) == 0 else det

    def riccati_operator(self, t: float) -> np.ndarray:
        """U(t) = A'(t) A(t)^-1."""
        A, Ap = self.at(t)
        return np.linalg.solve(A.T, Ap.T).T

    def log_det_derivative(self, t: float, h: float = 1e-4) -> float:
        """d/dt log|det A| by central differences of the dense output."""
        upper = float(self.det_at(t + h))
        lower = float(self.det_at(t - h))
        return (math.log(abs(upper)) - math.log(abs(lower))) / (2.0 * h)


def _adjoint(U: np.ndarray, eta: np.ndarray) -> np.ndarray:
    return eta[:, None] * U.T * eta[None, :]


def _null_eigenvalue(
    dense_pair: Callable[[float], tuple[np.ndarray, np.ndarray]], t_ref: float
) -> Optional[Callable[[float], float]]:
    """Signed distance to the nearest zero of det A, smooth across zeros of any multiplicity.

    With A'(t_ref) fixed, A'(t_ref)^-1 A(t) has an eigenvalue close to t - t0 near a
    conjugate point t0, whatever the dimension of ker A(t0).
    """
    _, Ap_ref = dense_pair(t_ref)
    if np.linalg.cond(Ap_ref) > CONDITION_LIMIT:
        return None

    def value(t: float) -> float:
        A, _ = dense_pair(t)
        eigs = np.linalg.eigvals(np.linalg.solve(Ap_ref, A))
        return float(eigs[np.argmin(np.abs(eigs))].real)

    return value


def _locate_conjugate(
    dense_pair: Callable[[float], tuple[np.ndarray, np.ndarray]],
    grid: np.ndarray,
    detA: np.ndarray,
    smin: np.ndarray,
    scale: np.ndarray,
) -> Optional[float]:
    """First zero of det A on (0, t_max] by sign change or by a vanishing singular value.

    Even-order zeros leave det A with one sign; they show up as local minima of the smallest
    singular value and are refined as roots of ``_null_eigenvalue``.
    """
    candidates: list[float] = []

    def dense_det(t: float) -> float:
        return float(np.linalg.det(dense_pair(t)[0]))

    for i in range(1, grid.size - 1):
        if detA[i] == 0.0:
            candidates.append(float(grid[i]))
            break
        if np.sign(detA[i]) != np.sign(detA[i + 1]):
            candidates.append(float(brentq(dense_det, grid[i], grid[i + 1], xtol=1e-14)))
            break

    for i in range(2, grid.size - 1):
        if candidates and grid[i - 1] > candidates[0]:
            break
        if not (smin[i] <= smin[i - 1] and smin[i] <= smin[i + 1]):
            continue
        signed = _null_eigenvalue(dense_pair, float(grid[i]))
        if signed is None:
            continue
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        if signed(lo) * signed(hi) > 0:
            continue
        root = float(brentq(signed, lo, hi, xtol=1e-14))
        A_root, _ = dense_pair(root)
        if np.linalg.svd(A_root, compute_uv=False)[-1] < 1e-8 * max(1.0, float(scale[i])):
            candidates.append(root)
            break

    return min(candidates) if candidates else None


def solve_jacobi(
    profile: TidalProfile,
    consts: ModelConstants,
    t_max: float,
    tol: float = 1e-10,
    samples: int = OUTPUT_SAMPLES,
) -> JacobiSolution:
    """Integrate (A, A')' = (A', -R A) from (0, I).

    Args:
        profile: Tidal operator on [0, t_max].
        consts: Model constants used for psi.
        t_max: Final time.
        tol: Relative tolerance of the adaptive integrator.
        samples: Number of output grid points.

    Returns:
        JacobiSolution with det A, psi, Phi and the first conjugate point, if any.

    Raises:
        UnsupportedDimensionError: If the profile size does not match n - 1.
        IntegrationStallError: If the integrator fails to advance.
    """
    m = profile.size
    if m != consts.m:
        raise UnsupportedDimensionError(f"profile acts on {m} directions, model has n-1 = {consts.m}")
    if t_max <= 0:
        raise ModelDomainError(f"t_max must be positive, got {t_max!r}")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        A = y[: m * m].reshape(m, m)
        Ap = y[m * m :]
        return np.concatenate([Ap, -(profile(t) @ A).ravel()])

    y0 = np.concatenate([np.zeros(m * m), np.eye(m).ravel()])
    grid = np.linspace(0.0, t_max, samples)
    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        y0,
        method="DOP853",
        t_eval=grid,
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
    )
    if sol.status != 0:
        raise IntegrationStallError(f"Jacobi integration failed: {sol.message}")

    A = sol.y[: m * m].T.reshape(-1, m, m)
    Ap = sol.y[m * m :].T.reshape(-1, m, m)
    detA = np.linalg.det(A)
    t_min = max(T_MIN_FLOOR, float(grid[1]))
    interior = grid >= t_min * (1.0 - 1e-12)

    def dense_pair(t: float) -> tuple[np.ndarray, np.ndarray]:
        y = sol.sol(t)
        return y[: m * m].reshape(m, m), y[m * m :].reshape(m, m)

    smin = np.array([np.linalg.svd(a, compute_uv=False)[-1] for a in A])
    norms = np.array([np.linalg.norm(a, 2) for a in A])
    first_conjugate = _locate_conjugate(dense_pair, grid, detA, smin, norms)

    psi = np.full(grid.size, np.nan)
    Phi = np.full(grid.size, np.nan)
    reliable = np.zeros(grid.size, dtype=bool)
    for i in np.flatnonzero(interior):
        t = grid[i]
        if first_conjugate is None or t < first_conjugate:
            if t < consts.first_pole:
                psi[i] = detA[i] / model_density(consts, t)
        if np.linalg.cond(A[i]) <= CONDITION_LIMIT:
            Phi[i] = float(np.trace(np.linalg.solve(A[i].T, Ap[i].T).T))
            reliable[i] = True

    unreliable = int(np.count_nonzero(interior & ~reliable))
    if unreliable:
        logger.warning(f"Phi unreliable at {unreliable} grid points (cond(A) > {CONDITION_LIMIT:g})")
    if first_conjugate is not None:
        logger.info(f"First conjugate point at t={first_conjugate:.10g}")

    return JacobiSolution(
        consts=consts,
        profile=profile,
        tol=tol,
        grid=grid,
        A=A,
        A_prime=Ap,
        detA=detA,
        psi=psi,
        Phi=Phi,
        phi_reliable=reliable,
        t_min=t_min,
        first_conjugate=first_conjugate,
        dense=sol.sol,
    )


def _valid_range(sol: JacobiSolution) -> np.ndarray:
    consts = sol.consts
    if consts.first_pole <= sol.t_max:
        raise ModelDomainError(
            f"s_c vanishes at {consts.first_pole!r} inside the range [0, {sol.t_max!r}]"
        )
    mask = np.isfinite(sol.psi)
    if sol.first_conjugate is not None:
        mask &= sol.grid < sol.first_conjugate
    return mask


def psi_bound_check(
    sol: JacobiSolution,
    direction: BoundDirection,
    slack: float = 1e-8,
    equality_tol: float = 1e-6,
) -> PsiBoundReport:
    """Check psi >= 1 and psi' >= 0 (lower) or psi <= 1 and psi' <= 0 (upper).

    Points with |psi - 1| <= equality_tol are equality points; there the profile must
    equal -c_eff I for the equality diagnostic to be consistent.

    Raises:
        ModelDomainError: If s_c vanishes inside the solution range.
    """
    mask = _valid_range(sol)
    t = sol.grid[mask]
    psi = sol.psi[mask]
    sign = 1.0 if direction is BoundDirection.LOWER else -1.0
    margins = sign * (psi - 1.0)
    worst = int(np.argmin(margins))
    steps = sign * np.diff(psi)

    eq_idx = np.flatnonzero(np.abs(psi - 1.0) <= equality_tol)
    target = -sol.consts.effective_c * np.eye(sol.size)
    consistent = all(np.max(np.abs(sol.profile(float(t[i])) - target)) <= equality_tol for i in eq_idx)

    report = PsiBoundReport(
        direction=direction,
        holds=bool(margins[worst] >= -slack),
        monotone=bool(steps.size == 0 or np.min(steps) >= -slack),
        worst_margin=float(margins[worst]),
        worst_time=float(t[worst]),
        equality_times=[float(t[i]) for i in eq_idx],
        equality_everywhere=bool(eq_idx.size == t.size),
        equality_consistent=bool(consistent),
    )
    logger.debug(
        f"psi {direction.value} check: holds={report.holds}, margin={report.worst_margin:.3e}"
    )
    return report


def riccati_check(
    sol: JacobiSolution, consts: Optional[ModelConstants] = None, slack: float = 1e-6
) -> RiccatiReport:
    """Check Phi' + Phi^2/(n-1) + (n-1)k <= 0 and Phi <= Phi_c.

    Phi' comes from the Riccati identity U' + U^2 + R = 0, i.e. Phi' = -tr R - tr U^2.

    Raises:
        ModelDomainError: If s_c vanishes inside the solution range.
    """
    consts = consts or sol.consts
    m = consts.m
    mask = sol.phi_reliable.copy()
    if sol.first_conjugate is not None:
        mask &= sol.grid < sol.first_conjugate
    if consts.first_pole <= sol.t_max:
        raise ModelDomainError(
            f"s_c vanishes at {consts.first_pole!r} inside the range [0, {sol.t_max!r}]"
        )

    worst_ineq = -math.inf
    worst_cmp = math.inf
    worst_time = float(sol.grid[-1])
    saturated = True
    for i in np.flatnonzero(mask):
        t = float(sol.grid[i])
        U = sol.riccati_operator(t)
        phi = float(np.trace(U))
        dphi = -float(np.trace(sol.profile(t))) - float(np.trace(U @ U))
        residual = (dphi + phi**2 / m + m * consts.effective_k) / (1.0 + phi**2)
        if residual > worst_ineq:
            worst_ineq = residual
        model = float(phi_c(consts, t))
        margin = (model - phi) / (1.0 + abs(model))
        if margin < worst_cmp:
            worst_cmp, worst_time = margin, t
        if abs(residual) > slack or abs(margin) > slack:
            saturated = False

    return RiccatiReport(
        inequality_holds=bool(worst_ineq <= slack),
        comparison_holds=bool(worst_cmp >= -slack),
        worst_inequality_residual=float(worst_ineq),
        worst_comparison_margin=float(worst_cmp),
        worst_time=worst_time,
        saturated=saturated,
        unreliable_points=int(np.count_nonzero(~sol.phi_reliable & (sol.grid >= sol.t_min))),
    )


def self_adjointness_defect(sol: JacobiSolution) -> float:
    """Max of ||U - U*|| / ||U|| over reliable grid points."""
    eta = sol.frame_signs
    worst = 0.0
    for i in np.flatnonzero(sol.phi_reliable):
        U = np.linalg.solve(sol.A[i].T, sol.A_prime[i].T).T
        worst = max(worst, float(np.linalg.norm(U - _adjoint(U, eta)) / np.linalg.norm(U)))
    return worst


def rauch_quotient(
    sol1: JacobiSolution,
    sol2: JacobiSolution,
    v: np.ndarray,
    slack: float = 1e-8,
    equality_tol: float = 1e-6,
) -> RauchReport:
    """Quotient phi(t) = g1(J1, J1) / g2(J2, J2) with J_i = A_i(t) v.

    Raises:
        ConjugatePointError: If sol1 has a conjugate point in the common range.
        UnsupportedDimensionError: If the two solutions act on different dimensions.
    """
    if sol1.size != sol2.size:
        raise UnsupportedDimensionError("Rauch quotient needs solutions of the same dimension")
    t_end = min(sol1.t_max, sol2.t_max)
    if sol1.first_conjugate is not None and sol1.first_conjugate <= t_end:
        raise ConjugatePointError(
            f"conjugate point of the first profile at t={sol1.first_conjugate!r}",
            sol1.first_conjugate,
        )
    v = np.asarray(v, dtype=float)
    t = sol1.grid[(sol1.grid >= sol1.t_min) & (sol1.grid <= t_end)]
    A1, _ = sol1.at(t)
    A2, _ = sol2.at(t)
    J1 = A1 @ v
    J2 = A2 @ v
    n1 = np.einsum("ti,i,ti->t", J1, sol1.frame_signs, J1)
    n2 = np.einsum("ti,i,ti->t", J2, sol2.frame_signs, J2)
    phi = n1 / n2
    steps = np.diff(phi)

    eq_idx = [
        i
        for i in range(t.size)
        if abs(phi[i] - 1.0) <= equality_tol
        and np.max(np.abs(sol1.profile(float(t[i])) - sol2.profile(float(t[i])))) <= equality_tol
    ]
    return RauchReport(
        times=[float(x) for x in t],
        phi=[float(x) for x in phi],
        initial_value=float(phi[0]),
        limit_holds=bool(abs(phi[0] - 1.0) <= 1e-3),
        monotone=bool(steps.size == 0 or np.min(steps) >= -slack),
        min_derivative=float(np.min(np.gradient(phi, t))) if t.size > 1 else 0.0,
        equality_times=[float(t[i]) for i in eq_idx],
        equality_diagnostic=bool(len(eq_idx) > 0),
    )
