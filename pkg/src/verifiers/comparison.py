"""Theorem-level checks: Guenther and Bishop volume bounds, ratio monotonicity and its search.

Every check audits the curvature hypothesis first. A failed audit produces an
``inapplicable`` verdict; a passed audit with a failed conclusion produces ``violated``,
which signals a pipeline defect rather than a mathematical statement.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..exceptions import ConditionNotMetError, InputDomainError
from ..geometry import CoordinateMetric, psi_bound_check, riccati_check
from ..models import (
    BoundDirection,
    ComparisonVerdict,
    GromovCondition,
    HypothesisAudit,
    PlaneAudit,
    SearchHit,
    SearchInstanceResult,
    SearchReport,
    SignatureMode,
    TheoremKind,
    VerdictStatus,
)
from ..volumes import (
    DirectionRun,
    SCLVSpec,
    TwoLevelCut,
    direction_measure,
    flat_model_volume,
    solve_directions,
    summarize_ratio,
    summarize_volume,
)

logger = logging.getLogger(__name__)

AUDIT_TOL = 1e-6
CONCLUSION_SLACK = 1e-6
EQUALITY_TOL = 1e-6
MONOTONE_SLACK = 1e-8
CONSTANT_CUT_TOL = 1e-12
SEARCH_THRESHOLD = 1e-6


def _solved(runs: Sequence[DirectionRun]) -> list[DirectionRun]:
    return [run for run in runs if run.system is not None and run.solution is not None]


def _radial_mask(run: DirectionRun, scale: float) -> np.ndarray:
    assert run.system is not None
    return run.system.grid <= scale * run.cut * (1.0 + 1e-12)


def audit_sectional_bound(
    runs: Sequence[DirectionRun],
    spec: SCLVSpec,
    c: float,
    tol: float = AUDIT_TOL,
    scale: float = 1.0,
) -> HypothesisAudit:
    """Audit the radial sectional curvatures against c through the parallel frame.

    Timelike directions need K(Span{gamma', w}) >= c - tol. Riemannian and spacelike
    directions focus the other way (the model tidal operator is +c I), so there the
    hypothesis reads K <= c + tol. With a definite frame the extremes over all radial planes
    are the eigenvalues of the tidal matrix divided by epsilon; an indefinite frame is audited
    on the frame planes.
    """
    eps = spec.mode.epsilon
    side = (
        BoundDirection.LOWER
        if spec.mode is SignatureMode.LORENTZIAN_TIMELIKE
        else BoundDirection.UPPER
    )
    worst: Optional[PlaneAudit] = None
    samples = 0
    for run in _solved(runs):
        system = run.system
        assert system is not None
        definite = bool(np.all(system.frame_signs > 0))
        for k in np.flatnonzero(_radial_mask(run, scale)):
            tidal = system.tidal[k] / eps
            if definite:
                values = np.linalg.eigvalsh(0.5 * (tidal + tidal.T))
            else:
                values = np.diag(tidal)
            samples += values.size
            margins = values - c if side is BoundDirection.LOWER else c - values
            i = int(np.argmin(margins))
            margin = float(margins[i])
            if worst is None or margin < worst.margin:
                worst = PlaneAudit(
                    direction=run.direction.tolist(),
                    time=float(system.grid[k]),
                    frame_index=None if definite else i,
                    value=float(values[i]),
                    bound=c,
                    margin=margin,
                )
    return _audit("sectional", c, worst, samples, tol, side)


def audit_ricci_bound(
    runs: Sequence[DirectionRun],
    spec: SCLVSpec,
    c: float,
    tol: float = AUDIT_TOL,
    scale: float = 1.0,
) -> HypothesisAudit:
    """Audit Ric(gamma', gamma') >= (n - 1) c g(gamma', gamma') - tol along radial geodesics.

    Ric(gamma', gamma') is the trace of the tidal matrix. The model tidal operator is
    epsilon c I in every mode, so the bound is its trace (n - 1) epsilon c and the Bishop
    hypothesis is a lower bound for timelike, spacelike and Riemannian directions alike.
    """
    bound = (spec.dim - 1) * c * spec.mode.epsilon
    worst: Optional[PlaneAudit] = None
    samples = 0
    for run in _solved(runs):
        system = run.system
        assert system is not None
        for k in np.flatnonzero(_radial_mask(run, scale)):
            value = float(np.trace(system.tidal[k]))
            samples += 1
            margin = value - bound
            if worst is None or margin < worst.margin:
                worst = PlaneAudit(
                    direction=run.direction.tolist(),
                    time=float(system.grid[k]),
                    value=value,
                    bound=bound,
                    margin=margin,
                )
    return _audit("ricci", bound, worst, samples, tol)


def _audit(
    kind: str,
    bound: float,
    worst: Optional[PlaneAudit],
    samples: int,
    tol: float,
    side: BoundDirection = BoundDirection.LOWER,
) -> HypothesisAudit:
    if worst is None:
        raise InputDomainError("no solved directions to audit")
    audit = HypothesisAudit(
        kind=kind,
        bound=bound,
        side=side,
        passed=worst.margin >= -tol,
        worst_margin=worst.margin,
        worst=worst,
        samples=samples,
    )
    logger.info(f"{kind} audit: passed={audit.passed}, worst margin {audit.worst_margin:.3e}")
    return audit


def tidal_equality(
    runs: Sequence[DirectionRun], spec: SCLVSpec, scale: float = 1.0, tol: float = EQUALITY_TOL
) -> bool:
    """Check tidal == -c I along every sampled radial geodesic up to scale * cut."""
    target = -spec.consts.effective_c * np.eye(spec.dim - 1)
    for run in _solved(runs):
        assert run.system is not None
        tidal = run.system.tidal[_radial_mask(run, scale)]
        if np.max(np.abs(tidal - target)) > tol:
            return False
    return True


def _psi_summary(
    runs: Sequence[DirectionRun], direction: BoundDirection
) -> tuple[float, bool, bool]:
    worst = math.inf
    monotone = True
    consistent = True
    for run in _solved(runs):
        assert run.solution is not None
        report = psi_bound_check(run.solution, direction)
        worst = min(worst, report.worst_margin)
        monotone &= report.monotone
        consistent &= report.equality_consistent
    return worst, monotone, consistent


def _finish(
    theorem: TheoremKind,
    audit: HypothesisAudit,
    c: float,
    conclusion: bool,
    **fields: object,
) -> ComparisonVerdict:
    if not audit.passed:
        status = VerdictStatus.INAPPLICABLE
        holds: Optional[bool] = None
    else:
        status = VerdictStatus.HOLDS if conclusion else VerdictStatus.VIOLATED
        holds = conclusion
    verdict = ComparisonVerdict(
        theorem=theorem, status=status, hypothesis_audit=audit, conclusion_holds=holds, c=c, **fields
    )
    if status is VerdictStatus.VIOLATED:
        logger.error(f"{theorem.value}: hypothesis audited but conclusion fails (pipeline alarm)")
    else:
        logger.info(f"{theorem.value} vs c={c:g}: {status.value}")
    return verdict


def check_guenther(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    c: Optional[float] = None,
    tol: float = 1e-10,
    audit_tol: float = AUDIT_TOL,
    slack: float = CONCLUSION_SLACK,
    threads: int = 1,
) -> ComparisonVerdict:
    """Check vol(U) >= vol(U0) under the radial sectional bound against c.

    The bound is K >= c on radially timelike planes and K <= c on Riemannian or spacelike
    radial planes; see ``audit_sectional_bound``.

    Raises:
        ModelDomainError: If some cut reaches the first conjugate point of the model.
        ConjugatePointError: If a radial geodesic has a conjugate point inside U.
    """
    spec = spec if c is None else spec.with_c(c)
    c = spec.consts.c
    runs = solve_directions(spec, metric, p, 1.0, tol, threads)
    audit = audit_sectional_bound(runs, spec, c, audit_tol)
    report = summarize_volume(spec, runs)
    gap = report.vol_U - report.vol_U0
    psi_margin, psi_monotone, psi_consistent = _psi_summary(runs, BoundDirection.LOWER)
    volumes_equal = abs(gap) <= slack * report.vol_U0
    tidal_eq = tidal_equality(runs, spec)
    return _finish(
        TheoremKind.GUENTHER,
        audit,
        c,
        gap >= -slack * report.vol_U0,
        vol_U=report.vol_U,
        vol_U0=report.vol_U0,
        margins={
            "relative_gap": gap / report.vol_U0,
            "quadrature_error_estimate": report.quadrature_error_estimate,
            "psi_worst_margin": psi_margin,
        },
        equality=volumes_equal and tidal_eq,
        equality_flags={
            "volumes_equal": volumes_equal,
            "tidal_equals_minus_cI": tidal_eq,
            "psi_monotone": psi_monotone,
            "psi_equality_consistent": psi_consistent,
        },
    )


def check_bishop(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    c: Optional[float] = None,
    tol: float = 1e-10,
    audit_tol: float = AUDIT_TOL,
    slack: float = CONCLUSION_SLACK,
    threads: int = 1,
    theorem: TheoremKind = TheoremKind.BISHOP,
) -> ComparisonVerdict:
    """Check vol(U) <= vol(U0) under Ric(v, v) >= (n - 1) c g(v, v) on radial vectors.

    Raises:
        ConjugatePointError: If a radial geodesic has a conjugate point inside U.
    """
    spec = spec if c is None else spec.with_c(c)
    c = spec.consts.c
    runs = solve_directions(spec, metric, p, 1.0, tol, threads)
    audit = audit_ricci_bound(runs, spec, c, audit_tol)
    report = summarize_volume(spec, runs)
    gap = report.vol_U - report.vol_U0
    psi_margin, psi_monotone, psi_consistent = _psi_summary(runs, BoundDirection.UPPER)
    riccati_ok = all(
        riccati_check(run.solution).comparison_holds
        for run in _solved(runs)
        if run.solution is not None
    )
    volumes_equal = abs(gap) <= slack * report.vol_U0
    tidal_eq = tidal_equality(runs, spec)
    return _finish(
        theorem,
        audit,
        c,
        gap <= slack * report.vol_U0,
        vol_U=report.vol_U,
        vol_U0=report.vol_U0,
        margins={
            "relative_gap": gap / report.vol_U0,
            "quadrature_error_estimate": report.quadrature_error_estimate,
            "psi_worst_margin": psi_margin,
        },
        equality=volumes_equal and tidal_eq,
        equality_flags={
            "volumes_equal": volumes_equal,
            "tidal_equals_minus_cI": tidal_eq,
            "psi_monotone": psi_monotone,
            "psi_equality_consistent": psi_consistent,
            "riccati_comparison": riccati_ok,
        },
    )


def _cut_is_constant(spec: SCLVSpec) -> bool:
    cuts = spec.cut.values(direction_measure(spec))
    return float(np.max(cuts) - np.min(cuts)) <= CONSTANT_CUT_TOL


def _detA_over_power_increase(runs: Sequence[DirectionRun], spec: SCLVSpec, r_max: float) -> float:
    worst = -math.inf
    m = spec.dim - 1
    for run in _solved(runs):
        sol = run.solution
        assert sol is not None
        mask = (sol.grid >= sol.t_min) & (sol.grid <= r_max * run.cut * (1.0 + 1e-12))
        ratio = sol.detA[mask] / sol.grid[mask] ** m
        if ratio.size > 1:
            worst = max(worst, float(np.max(np.diff(ratio))))
    return worst if math.isfinite(worst) else 0.0


def check_bishop_gromov(
    spec: SCLVSpec,
    metric: CoordinateMetric,
    p: np.ndarray,
    c: Optional[float],
    r_grid: Sequence[float],
    condition: GromovCondition,
    tol: float = 1e-10,
    audit_tol: float = AUDIT_TOL,
    slack: float = MONOTONE_SLACK,
    threads: int = 1,
) -> ComparisonVerdict:
    """Check that V(r) = vol(U^r)/vol(U0^r) is non-increasing under condition (A) or (B).

    Raises:
        ConditionNotMetError: If (A) is requested with c != 0 or (B) with a non-constant cut.
    """
    spec = spec if c is None else spec.with_c(c)
    c = spec.consts.c
    if condition is GromovCondition.A and c != 0.0:
        raise ConditionNotMetError(f"condition (A) needs c = 0, got c = {c!r}")
    if condition is GromovCondition.B and not _cut_is_constant(spec):
        raise ConditionNotMetError("condition (B) needs a constant cut function")

    r_max = float(max(r_grid))
    runs = solve_directions(spec, metric, p, r_max, tol, threads)
    audit = audit_ricci_bound(runs, spec, c, audit_tol, scale=r_max)
    curve = summarize_ratio(spec, runs, r_grid)
    ratios = np.asarray(curve.ratios)
    non_increasing = curve.max_increase <= slack

    margins = {"max_increase": curve.max_increase}
    flags: dict[str, bool] = {}
    plateau = np.flatnonzero(np.abs(np.diff(ratios)) <= slack) if ratios.size > 1 else []
    if len(plateau):
        R = float(curve.points[int(plateau[-1]) + 1].r)
        flags["plateau"] = True
        flags["tidal_equals_minus_cI_up_to_R"] = tidal_equality(runs, spec, scale=R)
        margins["plateau_R"] = R
    if condition is GromovCondition.A:
        increase = _detA_over_power_increase(runs, spec, r_max)
        margins["detA_over_t_power_max_increase"] = increase
        flags["detA_over_t_power_non_increasing"] = increase <= slack
    theorem = TheoremKind.GROMOV_A if condition is GromovCondition.A else TheoremKind.GROMOV_B
    return _finish(
        theorem,
        audit,
        c,
        non_increasing,
        ratio_curve=curve,
        margins=margins,
        equality=bool(flags.get("tidal_equals_minus_cI_up_to_R", False)),
        equality_flags=flags,
    )


def check_flat_corollary(
    specs: Sequence[SCLVSpec],
    metric: CoordinateMetric,
    p: np.ndarray,
    tol: float = 1e-10,
    audit_tol: float = AUDIT_TOL,
    slack: float = CONCLUSION_SLACK,
    threads: int = 1,
) -> list[ComparisonVerdict]:
    """vol(Z) <= vol(Z0) under the timelike convergence condition, one verdict per subset.

    vol(Z0) is the flat tangent-space volume of the subset, computed in closed form.
    """
    verdicts = []
    for spec in specs:
        verdict = check_bishop(
            spec, metric, p, 0.0, tol, audit_tol, slack, threads, theorem=TheoremKind.FLAT_COROLLARY
        )
        flat = flat_model_volume(spec.with_c(0.0))
        verdict.margins["flat_tangent_volume"] = flat
        verdict.equality_flags["flat_volume_matches_model"] = (
            verdict.vol_U0 is not None and abs(verdict.vol_U0 - flat) <= 1e-8 * flat
        )
        verdicts.append(verdict)
    return verdicts


@dataclass
class SearchInstance:
    """One member of a search family: a subset on a metric at a base point."""

    label: str
    spec: SCLVSpec
    metric: CoordinateMetric
    p: np.ndarray
    params: dict[str, float] = field(default_factory=dict)


def two_level_family(
    metric: CoordinateMetric,
    p: np.ndarray,
    c_values: Sequence[float],
    cut_pairs: Sequence[tuple[float, float]],
    chi_max: float,
    spec_template: SCLVSpec,
    label: str = "grw",
    width: float = 0.1,
) -> list[SearchInstance]:
    """Search family with two cut levels across xi_1 = 0 and several model constants."""
    family = []
    for c in c_values:
        for low, high in cut_pairs:
            spec = replace(
                spec_template.with_c(c), cut=TwoLevelCut(low, high, width), chi_max=chi_max
            )
            family.append(
                SearchInstance(
                    label=f"{label}[c={c:g}, cut=({low:g}, {high:g})]",
                    spec=spec,
                    metric=metric,
                    p=p,
                    params={"c": c, "cut_low": low, "cut_high": high, "chi_max": chi_max},
                )
            )
    return family


def _search_one(
    instance: SearchInstance, r_grid: Sequence[float], tol: float, audit_tol: float, threshold: float
) -> tuple[SearchInstanceResult, Optional[SearchHit]]:
    spec = instance.spec
    result = SearchInstanceResult(
        label=instance.label,
        evaluated=False,
        condition_a_applies=spec.consts.c == 0.0,
        condition_b_applies=_cut_is_constant(spec),
        params=instance.params,
    )
    r_max = float(max(r_grid))
    try:
        runs = solve_directions(spec, instance.metric, instance.p, r_max, tol, 1)
    except InputDomainError as e:
        result.skipped_reason = str(e)
        return result, None
    audit = audit_ricci_bound(runs, spec, spec.consts.c, audit_tol, scale=r_max)
    if not audit.passed:
        result.skipped_reason = f"ricci bound fails (margin {audit.worst_margin:.3e})"
        return result, None

    curve = summarize_ratio(spec, runs, r_grid)
    result.evaluated = True
    result.max_increase = curve.max_increase
    best: Optional[SearchHit] = None
    points = curve.points
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            gain = points[j].V - points[i].V
            if gain > threshold and (best is None or gain > best.V_R - best.V_r):
                best = SearchHit(
                    label=instance.label,
                    r=points[i].r,
                    R=points[j].r,
                    V_r=points[i].V,
                    V_R=points[j].V,
                    params=instance.params,
                )
    return result, best


def search_ratio_violation(
    family: Sequence[SearchInstance],
    r_grid: Sequence[float],
    budget: int,
    tol: float = 1e-10,
    audit_tol: float = AUDIT_TOL,
    threshold: float = SEARCH_THRESHOLD,
    threads: int = 1,
) -> SearchReport:
    """Scan a family for r < R with V(r) < V(R) - threshold.

    Instances whose Ricci hypothesis fails or whose geodesics leave the admissible domain
    are recorded as skipped. At most ``budget`` instances are evaluated.
    """
    members = list(family)[: max(0, budget)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        outcomes = list(
            pool.map(lambda inst: _search_one(inst, r_grid, tol, audit_tol, threshold), members)
        )
    report = SearchReport(
        budget=budget,
        evaluated=sum(1 for res, _ in outcomes if res.evaluated),
        hits=[hit for _, hit in outcomes if hit is not None],
        instances=[res for res, _ in outcomes],
    )
    logger.info(f"Search over {len(members)} instances: {report.summary}")
    return report

