"""Monte-Carlo volume oracle, independent of the Jacobi pipeline."""

import logging
import math

import numpy as np

from ..exceptions import ChartExitError, CutGridMismatchError, OracleUnavailableError
from ..geometry import CoordinateMetric, exp_map
from ..models import OracleResult, SignatureMode
from .sclv import SCLVSpec, check_compatible

logger = logging.getLogger(__name__)

BATCH_SIZE = 1_000_000
SHOOTING_STEP = 1e-5


def _membership(spec: SCLVSpec, y: np.ndarray, scale: float) -> np.ndarray:
    """Boolean mask of points y (orthonormal coordinates) inside U^scale."""
    chi_max = spec.chi_max or 0.0
    if spec.mode is SignatureMode.RIEMANNIAN:
        t = np.linalg.norm(y, axis=1)
        inside = t > 0
    else:
        y0 = y[:, 0]
        spatial = np.linalg.norm(y[:, 1:], axis=1)
        if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE:
            s2 = y0**2 - spatial**2
            inside = (y0 > 0) & (s2 > 0)
            t = np.sqrt(np.where(inside, s2, 1.0))
            chi = np.arctanh(np.where(inside, spatial / np.where(y0 > 0, y0, 1.0), 0.0))
        else:
            s2 = spatial**2 - y0**2
            inside = s2 > 0
            t = np.sqrt(np.where(inside, s2, 1.0))
            chi = np.arcsinh(np.where(inside, y0 / t, 0.0))
        inside &= np.abs(chi) <= chi_max
    if not np.any(inside):
        return inside
    directions = y[inside] / t[inside, None]
    cuts = spec.cut.evaluate(directions)
    result = inside.copy()
    result[inside] = t[inside] < scale * cuts
    return result


def _bounding_box(spec: SCLVSpec, scale: float) -> tuple[np.ndarray, np.ndarray]:
    radius = scale * spec.cut.max_value
    if spec.mode.is_lorentzian:
        radius *= math.cosh(spec.chi_max or 0.0)
    lower = np.full(spec.dim, -radius)
    upper = np.full(spec.dim, radius)
    if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE:
        lower[0] = 0.0
    return lower, upper


def _shooting_weight(
    metric: CoordinateMetric, p: np.ndarray, basis: np.ndarray, y: np.ndarray, tol: float
) -> float:
    """sqrt|det g(exp v)| * |det D(exp o B)(y)| with the Jacobian by central differences."""
    x = exp_map(metric, p, basis @ y, tol)
    columns = []
    for k in range(y.size):
        h = SHOOTING_STEP * (1.0 + abs(y[k]))
        e = np.zeros_like(y)
        e[k] = h
        columns.append(
            (exp_map(metric, p, basis @ (y + e), tol) - exp_map(metric, p, basis @ (y - e), tol))
            / (2.0 * h)
        )
    jac = np.column_stack(columns)
    return math.sqrt(abs(np.linalg.det(metric.metric(x)))) * abs(np.linalg.det(jac))


def mc_volume_oracle(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    samples: int,
    seed: int = 0,
    scale: float = 1.0,
    tol: float = 1e-10,
) -> OracleResult:
    """Monte-Carlo estimate of vol(exp_p(U^scale)) with a 3-sigma interval.

    Constant-component charts are sampled directly in coordinates; curved charts sample
    the tangent set and weight each point by the shooting Jacobian of exp_p.

    Raises:
        OracleUnavailableError: If the cut function has no closed form or exp_p leaves the chart.
    """
    if not spec.cut.closed_form:
        raise OracleUnavailableError("Monte-Carlo oracle needs a closed-form cut function")
    check_compatible(spec, metric)
    p = np.asarray(p, dtype=float)
    basis, _ = metric.orthonormal_basis(p)
    jac_b = abs(np.linalg.det(basis))
    lower, upper = _bounding_box(spec, scale)
    box_volume = float(np.prod(upper - lower))
    rng = np.random.default_rng(seed)
    method = "coordinate-box" if metric.constant else "exp-shooting"

    total = 0.0
    total_sq = 0.0
    accepted = 0
    remaining = samples
    while remaining > 0:
        batch = min(BATCH_SIZE, remaining)
        remaining -= batch
        y = rng.uniform(lower, upper, size=(batch, spec.dim))
        try:
            mask = _membership(spec, y, scale)
        except CutGridMismatchError as e:
            raise OracleUnavailableError(str(e)) from e
        inside = y[mask]
        accepted += inside.shape[0]
        if metric.constant:
            weight = math.sqrt(abs(np.linalg.det(metric.metric(p)))) * jac_b
            values = np.full(inside.shape[0], weight)
        else:
            try:
                values = np.array([_shooting_weight(metric, p, basis, v, tol) for v in inside])
            except ChartExitError as e:
                raise OracleUnavailableError(f"exp_p leaves the chart: {e}") from e
        total += float(np.sum(values))
        total_sq += float(np.sum(values**2))

    mean = total / samples
    variance = max(total_sq / samples - mean**2, 0.0)
    estimate = box_volume * mean
    stderr = box_volume * math.sqrt(variance / samples)
    logger.info(
        f"Oracle ({method}): {estimate:.8g} +/- {stderr:.2g} from {accepted}/{samples} samples"
    )
    return OracleResult(
        estimate=estimate,
        standard_error=stderr,
        ci_low=estimate - 3.0 * stderr,
        ci_high=estimate + 3.0 * stderr,
        samples=samples,
        accepted=accepted,
        seed=seed,
        method=method,
    )

