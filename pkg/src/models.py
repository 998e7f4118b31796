"""Data models for SCLV Lab reports."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from .exceptions import HypothesisViolatedError


class SignatureMode(str, Enum):
    """Which family of radial directions a computation works on."""

    LORENTZIAN_TIMELIKE = "lorentzian-timelike"
    LORENTZIAN_SPACELIKE = "lorentzian-spacelike"
    RIEMANNIAN = "riemannian"

    @property
    def epsilon(self) -> int:
        """Causal character g(xi, xi) of unit directions in this mode."""
        return -1 if self is SignatureMode.LORENTZIAN_TIMELIKE else 1

    @property
    def is_lorentzian(self) -> bool:
        return self is not SignatureMode.RIEMANNIAN


class BoundDirection(str, Enum):
    """Side of the density bound checked by psi_bound_check."""

    LOWER = "lower"
    UPPER = "upper"


class TheoremKind(str, Enum):
    """Comparison theorem checked by a verdict."""

    GUENTHER = "guenther"
    BISHOP = "bishop"
    GROMOV_A = "gromov-A"
    GROMOV_B = "gromov-B"
    FLAT_COROLLARY = "flat-corollary"


class GromovCondition(str, Enum):
    """Sufficient condition for ratio monotonicity."""

    A = "A"
    B = "B"


class VerdictStatus(str, Enum):
    """Outcome of a theorem check."""

    HOLDS = "holds"
    INAPPLICABLE = "inapplicable"
    VIOLATED = "violated"


class DirectionIntegral(BaseModel):
    """Radial integrals for a single quadrature direction."""

    direction: list[float]
    weight: float
    cut: float
    detA_integral: float
    model_integral: float
    radial_error: float = 0.0


class VolumeReport(BaseModel):
    """Volumes of an SCLV/SCV subset and of its model counterpart."""

    dim: int
    mode: SignatureMode
    c: float
    scale: float = 1.0
    vol_U: float
    vol_U0: float
    quadrature_error_estimate: float
    direction_count: int
    per_direction: list[DirectionIntegral] = Field(default_factory=list)
    config_hash: Optional[str] = None

    def resummed(self) -> tuple[float, float]:
        """Re-sum the per-direction table.

        Returns:
            Tuple (vol_U, vol_U0) recomputed from weights and radial integrals.
        """
        vol_u = sum(d.weight * d.detA_integral for d in self.per_direction)
        vol_u0 = sum(d.weight * d.model_integral for d in self.per_direction)
        return vol_u, vol_u0


class RatioPoint(BaseModel):
    """One row of a Bishop-Gromov ratio curve."""

    r: float
    vol_Ur: float
    vol_U0r: float
    V: float


class RatioCurve(BaseModel):
    """Ratio V(r) = vol(U^r)/vol(U0^r) on a grid of scales."""

    points: list[RatioPoint] = Field(default_factory=list)
    non_increasing: bool = True
    max_increase: float = 0.0
    config_hash: Optional[str] = None

    @property
    def radii(self) -> list[float]:
        return [p.r for p in self.points]

    @property
    def ratios(self) -> list[float]:
        return [p.V for p in self.points]


class PlaneAudit(BaseModel):
    """Worst sample of a curvature audit."""

    direction: list[float]
    time: float
    frame_index: Optional[int] = None
    value: float
    bound: float
    margin: float


class HypothesisAudit(BaseModel):
    """Result of auditing a curvature hypothesis along radial geodesics."""

    kind: str
    bound: float
    side: BoundDirection = BoundDirection.LOWER
    passed: bool
    worst_margin: float
    worst: Optional[PlaneAudit] = None
    samples: int = 0


class ComparisonVerdict(BaseModel):
    """Verdict of a volume comparison theorem check."""

    theorem: TheoremKind
    status: VerdictStatus
    hypothesis_audit: HypothesisAudit
    conclusion_holds: Optional[bool] = None
    c: float
    vol_U: Optional[float] = None
    vol_U0: Optional[float] = None
    ratio_curve: Optional[RatioCurve] = None
    margins: dict[str, float] = Field(default_factory=dict)
    equality: bool = False
    equality_flags: dict[str, bool] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)
    config_hash: Optional[str] = None

    def raise_for_status(self) -> None:
        """Raise if the hypothesis audit failed.

        Raises:
            HypothesisViolatedError: When the verdict is inapplicable.
        """
        if self.status is VerdictStatus.INAPPLICABLE:
            worst = self.hypothesis_audit.worst
            where = ""
            if worst is not None:
                where = f" at t={worst.time!r}, direction={worst.direction}"
            raise HypothesisViolatedError(
                f"{self.hypothesis_audit.kind} bound {self.hypothesis_audit.bound!r} fails "
                f"(margin {self.hypothesis_audit.worst_margin!r}){where}"
            )


class PsiBoundReport(BaseModel):
    """Check of psi >= 1 (lower) or psi <= 1 (upper) with monotonicity."""

    direction: BoundDirection
    holds: bool
    monotone: bool
    worst_margin: float
    worst_time: float
    equality_times: list[float] = Field(default_factory=list)
    equality_everywhere: bool = False
    equality_consistent: bool = True


class RiccatiReport(BaseModel):
    """Check of the scalar Riccati inequality and of Phi <= Phi_c."""

    inequality_holds: bool
    comparison_holds: bool
    worst_inequality_residual: float
    worst_comparison_margin: float
    worst_time: float
    saturated: bool = False
    unreliable_points: int = 0


class RauchReport(BaseModel):
    """Two-profile quotient phi(t) = g1(J1, J1) / g2(J2, J2)."""

    times: list[float] = Field(default_factory=list)
    phi: list[float] = Field(default_factory=list)
    initial_value: float
    limit_holds: bool
    monotone: bool
    min_derivative: float
    equality_times: list[float] = Field(default_factory=list)
    equality_diagnostic: bool = False


class CounterexampleDataSet(BaseModel):
    """One data set of the ratio-sum counterexample, as exact fractions."""

    label: str
    a: list[str]
    b: list[str]
    c: list[str]
    d: list[str]
    ratios_ab: list[str]
    ratios_cd: list[str]
    termwise_dominates: bool
    sum_ratio_ab: str
    sum_ratio_cd: str
    sum_inequality_reversed: bool
    side_conditions: Optional[bool] = None

    @property
    def verdict(self) -> str:
        return f"ratio sum inequality reversed: {'yes' if self.sum_inequality_reversed else 'no'}"


class CounterexampleReport(BaseModel):
    """Both counterexample data sets."""

    data_sets: list[CounterexampleDataSet] = Field(default_factory=list)

    @property
    def reversed_everywhere(self) -> bool:
        return all(d.termwise_dominates and d.sum_inequality_reversed for d in self.data_sets)


class SearchHit(BaseModel):
    """A pair of scales with V(r) < V(R)."""

    label: str
    r: float
    R: float
    V_r: float
    V_R: float
    params: dict[str, float] = Field(default_factory=dict)


class SearchInstanceResult(BaseModel):
    """Outcome for one member of a search family."""

    label: str
    evaluated: bool
    skipped_reason: Optional[str] = None
    condition_a_applies: bool = False
    condition_b_applies: bool = False
    max_increase: float = 0.0
    params: dict[str, float] = Field(default_factory=dict)


class SearchReport(BaseModel):
    """Result of a monotonicity-violation search."""

    budget: int
    evaluated: int
    hits: list[SearchHit] = Field(default_factory=list)
    instances: list[SearchInstanceResult] = Field(default_factory=list)
    config_hash: Optional[str] = None

    @property
    def summary(self) -> str:
        if self.hits:
            return f"{len(self.hits)} hit(s) found"
        return "none found within budget"


class ExpansionFit(BaseModel):
    """Small-t fit of det A(t) / t^m."""

    m: int
    leading_check: float
    ricci_estimate: float
    fit_window: tuple[float, float]
    residual: float
    coefficients: list[float] = Field(default_factory=list)


class JacobiExpansionReport(BaseModel):
    """Small-t fit of the frame components of a Jacobi field A(t) e_i."""

    index: int
    epsilon: int
    diagonal_coefficient: float
    sectional_estimate: float
    off_diagonal_linear: list[float] = Field(default_factory=list)
    off_diagonal_cubic: bool = True
    fit_window: tuple[float, float]
    residual: float


class LocalComparisonReport(BaseModel):
    """Strict local volume ordering forced by a strict Ricci ordering."""

    mode: SignatureMode
    ricci_1: float
    ricci_2: float
    expected: str
    delta: float
    crossings: list[float] = Field(default_factory=list)
    vol_1: float
    vol_2: float
    holds: bool


class BallComparisonReport(BaseModel):
    """Small metric-ball volumes of two Riemannian metrics."""

    radii: list[float] = Field(default_factory=list)
    vol_1: list[float] = Field(default_factory=list)
    vol_2: list[float] = Field(default_factory=list)
    epsilon: float
    skipped_radii: list[float] = Field(default_factory=list)
    expected: str
    holds: bool


class ExpansionReport(BaseModel):
    """Small-t fits over a direction set, with an optional two-metric comparison."""

    fits: list[ExpansionFit] = Field(default_factory=list)
    ricci_metric: list[float] = Field(default_factory=list)
    jacobi: list[JacobiExpansionReport] = Field(default_factory=list)
    local_comparison: Optional[LocalComparisonReport] = None
    ball_comparison: Optional[BallComparisonReport] = None
    config_hash: Optional[str] = None

    @property
    def max_ricci_error(self) -> float:
        errors = [abs(f.ricci_estimate - r) for f, r in zip(self.fits, self.ricci_metric)]
        return max(errors, default=0.0)


class OracleResult(BaseModel):
    """Monte-Carlo volume estimate with a 3-sigma interval."""

    estimate: float
    standard_error: float
    ci_low: float
    ci_high: float
    samples: int
    accepted: int
    seed: int
    method: str
    config_hash: Optional[str] = None

    def covers(self, value: float, sigmas: float = 3.0) -> bool:
        """Check whether a value lies within the given number of standard errors."""
        return abs(value - self.estimate) <= sigmas * self.standard_error


class GRWConditionVerdict(BaseModel):
    """Closed-form check of conditions (A) and (B) for a GRW warping function."""

    kind: str
    c: float
    condition_a_holds: bool
    condition_b_holds: bool
    condition_a_equality: bool
    condition_b_equality: bool
    condition_b_vacuous: bool = False
    worst_a_margin: float
    worst_b_margin: float
    failures_a: list[float] = Field(default_factory=list)
    failures_b: list[float] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.condition_a_holds and self.condition_b_holds

    @property
    def equality(self) -> bool:
        return self.condition_a_equality and self.condition_b_equality


class BoundViolation(BaseModel):
    """Worst sampled vector or plane of a GRW curvature bound."""

    kind: str
    t: float
    lam: float
    margin: float
    violated: bool
