"""Coordinate-chart metrics with Levi-Civita curvature.

Curvature convention: R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y], with components
R(d_mu, d_nu) d_sigma = R^rho_{sigma mu nu} d_rho stored as ``riem[rho, sigma, mu, nu]``.
Lowered components are R(X, Y, Z, W) = g(R(X, Y) Z, W), so a chart of constant curvature c
reports sectional curvature c on every nondegenerate plane.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..exceptions import DegeneratePlaneError, OutOfChartError, SingularMetricError

logger = logging.getLogger(__name__)

ComponentFn = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1e-4


@dataclass(frozen=True)
class ChartDomain:
    """Open coordinate box with an optional extra inclusion predicate."""

    lower: np.ndarray
    upper: np.ndarray
    predicate: Optional[Callable[[np.ndarray], bool]] = None

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float]) -> "ChartDomain":
        return cls(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))

    @classmethod
    def unbounded(cls, dim: int) -> "ChartDomain":
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    def margin(self, x: np.ndarray) -> float:
        """Distance from x to the box boundary (negative outside)."""
        return float(min(np.min(x - self.lower), np.min(self.upper - x)))

    def contains(self, x: np.ndarray, margin: float = 0.0) -> bool:
        if self.margin(x) <= margin:
            return False
        return self.predicate is None or bool(self.predicate(x))

    @property
    def center(self) -> np.ndarray:
        lo = np.where(np.isfinite(self.lower), self.lower, 0.0)
        hi = np.where(np.isfinite(self.upper), self.upper, 0.0)
        mid = 0.5 * (lo + hi)
        # Half-open boxes: step one unit inside the finite side.
        mid = np.where(np.isfinite(self.lower) & ~np.isfinite(self.upper), self.lower + 1.0, mid)
        mid = np.where(~np.isfinite(self.lower) & np.isfinite(self.upper), self.upper - 1.0, mid)
        return mid


@dataclass(frozen=True)
class PlaneSpec:
    """A tangent plane at a point, spanned by two coordinate vectors."""

    point: np.ndarray
    u: np.ndarray
    v: np.ndarray


def _fd_steps(x: np.ndarray) -> np.ndarray:
    return FD_STEP * (1.0 + np.abs(x))


class CoordinateMetric:
    """A metric tensor given componentwise on a single coordinate chart."""

    def __init__(
        self,
        dim: int,
        components: ComponentFn,
        derivatives: Optional[ComponentFn] = None,
        domain: Optional[ChartDomain] = None,
        name: str = "metric",
        time_axis: Optional[int] = 0,
        constant: bool = False,
    ) -> None:
        """Initialize the metric.

        Args:
            dim: Manifold dimension n.
            components: Maps a point x to the symmetric n x n matrix g(x).
            derivatives: Optional analytic first derivatives, dg[k, i, j] = d_k g_ij.
            domain: Chart domain; unbounded if omitted.
            name: Label used in logs and reports.
            time_axis: Coordinate that orients time for Lorentzian metrics.
            constant: True when the components do not depend on x.
        """
        self.dim = dim
        self.name = name
        self.time_axis = time_axis
        self.constant = constant
        self._components = components
        self._derivatives = derivatives
        self.domain = domain or ChartDomain.unbounded(dim)
        self.signature = self._signature_at(self.domain.center)
        self.is_lorentzian = self.signature.count(-1) == 1
        if not self.is_lorentzian:
            self.time_axis = None if self.signature.count(-1) == 0 else time_axis

    @property
    def has_analytic_derivatives(self) -> bool:
        return self._derivatives is not None or self.constant

    def fd_guard(self, x: np.ndarray) -> float:
        """Clearance from the chart boundary that curvature evaluation at x needs.

        Riemann differences the Christoffel symbols once; without analytic derivatives those
        difference g again from the displaced point. Each level reaches FD_STEP (1 + |x|_inf).
        """
        if self.constant:
            return 0.0
        reach = FD_STEP * (1.0 + float(np.max(np.abs(x))))
        if self._derivatives is not None:
            return reach
        return reach * (2.0 + FD_STEP)

    def _signature_at(self, x: np.ndarray) -> list[int]:
        eig = np.linalg.eigvalsh(self._components(np.asarray(x, dtype=float)))
        if np.any(np.abs(eig) < 1e-14):
            raise SingularMetricError(f"{self.name}: degenerate metric at {x}")
        return [int(s) for s in np.sign(np.sort(eig))]

    def check_signature(self, points: Sequence[np.ndarray]) -> bool:
        """Check that the signature is the same at every sampled point."""
        return all(self._signature_at(np.asarray(x, dtype=float)) == self.signature for x in points)

    def _require_in_chart(self, x: np.ndarray, margin: float = 0.0) -> None:
        if not self.domain.contains(x, margin):
            raise OutOfChartError(f"{self.name}: point {x.tolist()} outside chart (margin {margin})")

    def metric(self, x: np.ndarray) -> np.ndarray:
        """Return g(x).

        Raises:
            OutOfChartError: If x is not in the chart domain.
        """
        x = np.asarray(x, dtype=float)
        self._require_in_chart(x)
        g = np.asarray(self._components(x), dtype=float)
        return 0.5 * (g + g.T)

    def inverse(self, x: np.ndarray) -> np.ndarray:
        g = self.metric(x)
        try:
            return np.linalg.inv(g)
        except np.linalg.LinAlgError as e:
            raise SingularMetricError(f"{self.name}: metric not invertible at {x}") from e

    def inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.metric(x) @ v)

    def metric_derivatives(self, x: np.ndarray) -> np.ndarray:
        """Return dg[k, i, j] = d_k g_ij, analytic or by Richardson-extrapolated differences."""
        x = np.asarray(x, dtype=float)
        if self.constant:
            self._require_in_chart(x)
            return np.zeros((self.dim, self.dim, self.dim))
        if self._derivatives is not None:
            self._require_in_chart(x)
            return np.asarray(self._derivatives(x), dtype=float)
        return _richardson_gradient(self.metric, x, self._require_in_chart)

    def christoffel(self, x: np.ndarray) -> np.ndarray:
        """Return Gamma[l, m, n] = Gamma^l_{mn}.

        Raises:
            OutOfChartError: If x (or a difference stencil point) leaves the chart.
            SingularMetricError: If g(x) is not invertible.
        """
        x = np.asarray(x, dtype=float)
        if self.constant:
            self._require_in_chart(x)
            return np.zeros((self.dim, self.dim, self.dim))
        ginv = self.inverse(x)
        dg = self.metric_derivatives(x)
        # Gamma_{l m n} (lowered first index) = (d_m g_ln + d_n g_lm - d_l g_mn) / 2
        lowered = 0.5 * (
            np.einsum("mln->lmn", dg) + np.einsum("nlm->lmn", dg) - np.einsum("lmn->lmn", dg)
        )
        gamma = np.einsum("kl,lmn->kmn", ginv, lowered)
        return 0.5 * (gamma + np.swapaxes(gamma, 1, 2))

    def riemann(self, x: np.ndarray) -> np.ndarray:
        """Return riem[r, s, m, n] = R^r_{s m n}."""
        x = np.asarray(x, dtype=float)
        if self.constant:
            self._require_in_chart(x)
            return np.zeros((self.dim,) * 4)
        gamma = self.christoffel(x)
        dgamma = _richardson_gradient(self.christoffel, x, self._require_in_chart)
        riem = (
            np.einsum("mrns->rsmn", dgamma)
            - np.einsum("nrms->rsmn", dgamma)
            + np.einsum("rml,lns->rsmn", gamma, gamma)
            - np.einsum("rnl,lms->rsmn", gamma, gamma)
        )
        return riem

    def lowered_riemann(self, x: np.ndarray) -> np.ndarray:
        """Return R[a, b, c, d] = g(R(d_a, d_b) d_c, d_d)."""
        x = np.asarray(x, dtype=float)
        return np.einsum("dr,rcab->abcd", self.metric(x), self.riemann(x))

    def ricci(self, x: np.ndarray) -> np.ndarray:
        """Return Ric_{ab} = R^r_{a r b}."""
        ric = np.einsum("rarb->ab", self.riemann(x))
        return 0.5 * (ric + ric.T)

    def sectional(self, plane: PlaneSpec) -> float:
        """Sectional curvature K = R(u, v, v, u) / (g(u,u) g(v,v) - g(u,v)^2).

        Raises:
            DegeneratePlaneError: If the Gram determinant is numerically zero.
        """
        x = np.asarray(plane.point, dtype=float)
        u = np.asarray(plane.u, dtype=float)
        v = np.asarray(plane.v, dtype=float)
        g = self.metric(x)
        guu, gvv, guv = u @ g @ u, v @ g @ v, u @ g @ v
        gram = guu * gvv - guv**2
        scale = max(abs(guu * gvv), guv**2, 1e-300)
        if abs(gram) < 1e-12 * scale:
            raise DegeneratePlaneError(f"{self.name}: degenerate plane at {x.tolist()}")
        rlow = self.lowered_riemann(x)
        return float(np.einsum("abcd,a,b,c,d->", rlow, u, v, v, u) / gram)

    def orthonormal_basis(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal basis at x by signature-aware Gram-Schmidt on the chart basis.

        The time axis (if any) is processed first so column 0 is the future unit timelike
        vector of a Lorentzian chart.

        Returns:
            Tuple (B, signs) with B[:, i] the i-th basis vector and signs[i] = g(B_i, B_i).
        """
        x = np.asarray(x, dtype=float)
        order = list(range(self.dim))
        if self.time_axis is not None:
            order.remove(self.time_axis)
            order.insert(0, self.time_axis)
        seeds = [np.eye(self.dim)[i] for i in order]
        vectors, signs = gram_schmidt(self.metric(x), seeds, self.dim)
        if -1 in signs:
            i = signs.index(-1)
            vectors.insert(0, vectors.pop(i))
            signs.insert(0, signs.pop(i))
        basis = np.column_stack(vectors)
        if self.time_axis is not None and signs[0] < 0 and basis[self.time_axis, 0] < 0:
            basis[:, 0] = -basis[:, 0]
        return basis, np.asarray(signs, dtype=float)


def gram_schmidt(
    g: np.ndarray, seeds: Sequence[np.ndarray], count: int, tiny: float = 1e-10
) -> tuple[list[np.ndarray], list[int]]:
    """Signature-aware Gram-Schmidt.

    Args:
        g: Metric matrix at the point.
        seeds: Vectors processed in order; nearly dependent or null ones are skipped.
        count: Number of vectors to produce.
        tiny: Threshold on |g(v, v)| below which a candidate is skipped.

    Returns:
        Tuple (vectors, signs) with g(v_i, v_j) = signs[i] * delta_ij.
    """
    vectors: list[np.ndarray] = []
    signs: list[int] = []
    for seed in seeds:
        v = np.asarray(seed, dtype=float).copy()
        for _ in range(2):
            for u, s in zip(vectors, signs):
                v = v - s * (u @ g @ v) * u
        norm2 = float(v @ g @ v)
        if abs(norm2) < tiny:
            continue
        vectors.append(v / np.sqrt(abs(norm2)))
        signs.append(1 if norm2 > 0 else -1)
        if len(vectors) == count:
            break
    if len(vectors) < count:
        raise SingularMetricError("could not complete an orthonormal frame")
    return vectors, signs


def _richardson_gradient(
    fn: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    require: Callable[[np.ndarray, float], None],
) -> np.ndarray:
    """Central differences of fn in each coordinate, Richardson-extrapolated once.

    Returns:
        Array with the derivative coordinate as the leading axis.
    """
    steps = _fd_steps(x)
    require(x, float(np.max(steps)))
    derivs = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = 1.0
        h = steps[k]
        d_h = (fn(x + h * e) - fn(x - h * e)) / (2.0 * h)
        d_h2 = (fn(x + 0.5 * h * e) - fn(x - 0.5 * h * e)) / h
        derivs.append((4.0 * d_h2 - d_h) / 3.0)
    return np.stack(derivs)


def christoffel(metric: CoordinateMetric, x: np.ndarray) -> np.ndarray:
    """Christoffel symbols of the second kind at x."""
    return metric.christoffel(x)


def riemann(metric: CoordinateMetric, x: np.ndarray) -> np.ndarray:
    """Riemann tensor R^r_{s m n} at x."""
    return metric.riemann(x)


def ricci(metric: CoordinateMetric, x: np.ndarray) -> np.ndarray:
    """Ricci tensor at x."""
    return metric.ricci(x)


def sectional(metric: CoordinateMetric, plane: PlaneSpec) -> float:
    """Sectional curvature of a nondegenerate plane."""
    return metric.sectional(plane)
