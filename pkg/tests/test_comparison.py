"""Tests for the theorem-level comparison checks and the ratio search."""

import math

import numpy as np
import pytest

from src.exceptions import ConditionNotMetError, HypothesisViolatedError
from src.families import build_grw_metric, grw_from_params, riemannian_space_form
from src.geometry import ModelConstants
from src.models import (
    BoundDirection,
    GromovCondition,
    SignatureMode,
    TheoremKind,
    VerdictStatus,
)
from src.verifiers import (
    audit_ricci_bound,
    audit_sectional_bound,
    check_bishop,
    check_bishop_gromov,
    check_flat_corollary,
    check_guenther,
    search_ratio_violation,
    tidal_equality,
    two_level_family,
)
from src.volumes import ConstantCut, SCLVSpec, TwoLevelCut, solve_directions


@pytest.fixture
def de_sitter2():
    """Two-dimensional de Sitter space as the GRW spacetime f = cosh t over a line."""
    return build_grw_metric(grw_from_params("cosh", (1.0, 1.0), m=1))


@pytest.fixture
def origin2():
    return np.zeros(2)


@pytest.fixture
def disc_spec():
    """Geodesic disc of radius 0.5 in a Riemannian surface, compared with c = 1."""
    return SCLVSpec(ModelConstants(1.0, 2, SignatureMode.RIEMANNIAN), ConstantCut(0.5))


def _disc_area(k: float, r: float = 0.5) -> float:
    return 2.0 * math.pi * (1.0 - math.cos(math.sqrt(k) * r)) / k


class TestAudits:
    """Tests for the curvature audits."""

    def test_sectional_audit_on_de_sitter(self, cone_spec, de_sitter2, origin2):
        """Test K = 1 on every radial plane of de Sitter space."""
        spec = cone_spec(c=1.0, chi_max=0.5)
        runs = solve_directions(spec, de_sitter2, origin2)
        audit = audit_sectional_bound(runs, spec, 0.5)
        assert audit.passed
        assert audit.worst_margin == pytest.approx(0.5, abs=1e-6)
        assert audit.samples > 0
        assert not audit_sectional_bound(runs, spec, 1.5).passed

    def test_ricci_audit_on_de_sitter(self, cone_spec, de_sitter2, origin2):
        """Test Ric(gamma', gamma') = -1 against the bound -(n - 1) c."""
        spec = cone_spec(c=1.0, chi_max=0.5)
        runs = solve_directions(spec, de_sitter2, origin2)
        audit = audit_ricci_bound(runs, spec, 1.5)
        assert audit.bound == pytest.approx(-1.5)
        assert audit.worst_margin == pytest.approx(0.5, abs=1e-6)
        assert not audit_ricci_bound(runs, spec, 0.5).passed

    def test_timelike_sectional_audit_is_a_lower_bound(self, cone_spec, de_sitter2, origin2):
        """Test that timelike planes are audited against K >= c."""
        spec = cone_spec(c=1.0, chi_max=0.5)
        runs = solve_directions(spec, de_sitter2, origin2)
        assert audit_sectional_bound(runs, spec, 0.5).side is BoundDirection.LOWER

    def test_riemannian_sectional_audit_is_an_upper_bound(self, disc_spec, origin2):
        """Test that K = 1.2 fails and K = 0.8 passes the Riemannian audit against c = 1."""
        runs = solve_directions(disc_spec, riemannian_space_form(1.2, 2), origin2)
        audit = audit_sectional_bound(runs, disc_spec, 1.0)
        assert audit.side is BoundDirection.UPPER
        assert not audit.passed
        assert audit.worst_margin == pytest.approx(-0.2, abs=1e-6)
        runs = solve_directions(disc_spec, riemannian_space_form(0.8, 2), origin2)
        audit = audit_sectional_bound(runs, disc_spec, 1.0)
        assert audit.passed
        assert audit.worst_margin == pytest.approx(0.2, abs=1e-6)

    def test_tidal_equality(self, cone_spec, de_sitter2, origin2):
        """Test tidal = -c I on de Sitter space only for c = 1."""
        spec = cone_spec(c=1.0, chi_max=0.5)
        runs = solve_directions(spec, de_sitter2, origin2)
        assert tidal_equality(runs, spec)
        assert not tidal_equality(runs, spec.with_c(0.5))


class TestGuenther:
    """Tests for check_guenther."""

    def test_holds_on_de_sitter(self, cone_spec, de_sitter2, origin2):
        """Test vol(U) >= vol(U0) for K = 1 against c = 0.5."""
        verdict = check_guenther(cone_spec(chi_max=0.5), de_sitter2, origin2, c=0.5)
        assert verdict.theorem is TheoremKind.GUENTHER
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.conclusion_holds
        assert verdict.vol_U > verdict.vol_U0
        assert verdict.margins["relative_gap"] > 0
        assert not verdict.equality

    def test_equality_case(self, cone_spec, de_sitter2, origin2):
        """Test that c = 1 on de Sitter space is flagged as the equality case."""
        verdict = check_guenther(cone_spec(chi_max=0.5), de_sitter2, origin2, c=1.0)
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.vol_U == pytest.approx(verdict.vol_U0, rel=1e-6)
        assert verdict.equality
        assert verdict.equality_flags["tidal_equals_minus_cI"]

    def test_inapplicable_above_curvature(self, cone_spec, de_sitter2, origin2):
        """Test that c = 2 fails the audit and gives no conclusion."""
        verdict = check_guenther(cone_spec(chi_max=0.5), de_sitter2, origin2, c=2.0)
        assert verdict.status is VerdictStatus.INAPPLICABLE
        assert verdict.conclusion_holds is None
        with pytest.raises(HypothesisViolatedError):
            verdict.raise_for_status()

    def test_riemannian_disc_below_model_curvature(self, disc_spec, origin2):
        """Test a disc of curvature 0.8 is larger than the model disc of curvature 1."""
        verdict = check_guenther(disc_spec, riemannian_space_form(0.8, 2), origin2)
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.hypothesis_audit.side is BoundDirection.UPPER
        assert verdict.vol_U == pytest.approx(_disc_area(0.8), rel=1e-6)
        assert verdict.vol_U0 == pytest.approx(_disc_area(1.0), rel=1e-6)
        assert verdict.vol_U > verdict.vol_U0

    def test_riemannian_disc_above_model_curvature(self, disc_spec, origin2):
        """Test that curvature 1.2 against c = 1 is inapplicable rather than violated."""
        verdict = check_guenther(disc_spec, riemannian_space_form(1.2, 2), origin2)
        assert verdict.status is VerdictStatus.INAPPLICABLE
        assert verdict.conclusion_holds is None
        assert verdict.hypothesis_audit.worst_margin == pytest.approx(-0.2, abs=1e-6)
        assert verdict.vol_U == pytest.approx(_disc_area(1.2), rel=1e-6)

    def test_four_dimensional_de_sitter(self, cosh_grw):
        """Test f = cosh t over the unit 3-sphere against c = 0.5 and against itself."""
        spec = SCLVSpec(
            ModelConstants(0.5, 4, SignatureMode.LORENTZIAN_TIMELIKE),
            ConstantCut(1.0),
            chi_max=0.5,
            rapidity_panels=4,
            azimuth_nodes=4,
            polar_nodes=2,
        )
        verdict = check_guenther(spec, cosh_grw, np.zeros(4))
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.vol_U >= verdict.vol_U0
        assert verdict.equality_flags["psi_monotone"]
        assert not verdict.equality
        equal = check_guenther(spec, cosh_grw, np.zeros(4), c=1.0)
        assert equal.status is VerdictStatus.HOLDS
        assert equal.equality
        assert equal.equality_flags["tidal_equals_minus_cI"]


class TestBishop:
    """Tests for check_bishop."""

    def test_holds_on_de_sitter(self, cone_spec, de_sitter2, origin2):
        """Test vol(U) <= vol(U0) for Ric = -1 against c = 1.5."""
        verdict = check_bishop(cone_spec(chi_max=0.5), de_sitter2, origin2, c=1.5)
        assert verdict.theorem is TheoremKind.BISHOP
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.vol_U < verdict.vol_U0
        assert verdict.equality_flags["riccati_comparison"]

    def test_inapplicable_below_curvature(self, cone_spec, de_sitter2, origin2):
        """Test that c = 0.5 fails the Ricci audit."""
        verdict = check_bishop(cone_spec(chi_max=0.5), de_sitter2, origin2, c=0.5)
        assert verdict.status is VerdictStatus.INAPPLICABLE
        assert not verdict.hypothesis_audit.passed

    def test_riemannian_disc_above_model_curvature(self, disc_spec, origin2):
        """Test a disc of curvature 1.2 is smaller than the model disc of curvature 1."""
        verdict = check_bishop(disc_spec, riemannian_space_form(1.2, 2), origin2)
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.hypothesis_audit.bound == pytest.approx(1.0)
        assert verdict.vol_U == pytest.approx(_disc_area(1.2), rel=1e-6)
        assert verdict.vol_U < verdict.vol_U0

    def test_riemannian_disc_below_model_curvature(self, disc_spec, origin2):
        """Test that curvature 0.8 fails the Ricci audit against c = 1."""
        verdict = check_bishop(disc_spec, riemannian_space_form(0.8, 2), origin2)
        assert verdict.status is VerdictStatus.INAPPLICABLE
        assert verdict.hypothesis_audit.worst_margin == pytest.approx(-0.2, abs=1e-6)

    def test_stiffened_fiber_is_strictly_smaller(self):
        """Test f = cosh t over a 3-sphere of curvature 1.2 against c = 1."""
        metric = build_grw_metric(grw_from_params("cosh", (1.0, 1.0), m=3, k_F=1.2))
        spec = SCLVSpec(
            ModelConstants(1.0, 4, SignatureMode.LORENTZIAN_TIMELIKE),
            ConstantCut(1.0),
            chi_max=0.5,
            rapidity_panels=4,
            azimuth_nodes=4,
            polar_nodes=2,
        )
        verdict = check_bishop(spec, metric, np.zeros(4))
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.hypothesis_audit.bound == pytest.approx(-3.0)
        assert verdict.vol_U < verdict.vol_U0
        assert verdict.margins["relative_gap"] < 0
        assert verdict.equality_flags["riccati_comparison"]
        assert not verdict.equality

    def test_flat_corollary(self, cone_spec, minkowski2, origin2):
        """Test one verdict per subset with the closed-form flat volume."""
        specs = [cone_spec(chi_max=0.5), cone_spec(chi_max=1.0, cut=0.5)]
        verdicts = check_flat_corollary(specs, minkowski2, origin2)
        assert len(verdicts) == 2
        for verdict in verdicts:
            assert verdict.theorem is TheoremKind.FLAT_COROLLARY
            assert verdict.status is VerdictStatus.HOLDS
            assert verdict.equality
            assert verdict.equality_flags["flat_volume_matches_model"]
        assert verdicts[0].margins["flat_tangent_volume"] == pytest.approx(0.5)
        assert verdicts[1].margins["flat_tangent_volume"] == pytest.approx(0.25)


class TestBishopGromov:
    """Tests for check_bishop_gromov."""

    def test_condition_a_on_flat_space(self, cone_spec, minkowski2, origin2):
        """Test a constant ratio with a two-level cut and the plateau flags."""
        spec = cone_spec(chi_max=0.5).with_cut(TwoLevelCut(0.8, 1.0, 0.2))
        verdict = check_bishop_gromov(
            spec, minkowski2, origin2, 0.0, [0.25, 0.5, 1.0], GromovCondition.A
        )
        assert verdict.theorem is TheoremKind.GROMOV_A
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.equality_flags["plateau"]
        assert verdict.equality_flags["detA_over_t_power_non_increasing"]
        assert verdict.equality
        assert verdict.ratio_curve.radii == [0.25, 0.5, 1.0]

    def test_condition_b_on_de_sitter(self, cone_spec, de_sitter2, origin2):
        """Test V(r) decreases on de Sitter space against c = 1.5."""
        verdict = check_bishop_gromov(
            cone_spec(chi_max=0.5), de_sitter2, origin2, 1.5, [0.25, 0.5, 1.0], GromovCondition.B
        )
        assert verdict.theorem is TheoremKind.GROMOV_B
        assert verdict.status is VerdictStatus.HOLDS
        ratios = verdict.ratio_curve.ratios
        assert ratios[0] > ratios[1] > ratios[2]
        assert verdict.ratio_curve.non_increasing

    def test_condition_a_on_concave_warping(self, cone_spec, origin3):
        """Test V(r) is non-increasing on f = cos(t/2) over the unit 2-sphere on ten radii."""
        metric = build_grw_metric(grw_from_params("cos", (1.0, 0.5), m=2, k_F=1.0))
        spec = cone_spec(n=3, chi_max=0.5, rapidity_panels=4).with_cut(TwoLevelCut(0.8, 1.0, 0.2))
        radii = [0.1 * i for i in range(1, 11)]
        verdict = check_bishop_gromov(spec, metric, origin3, 0.0, radii, GromovCondition.A)
        assert verdict.status is VerdictStatus.HOLDS
        assert verdict.hypothesis_audit.passed
        ratios = verdict.ratio_curve.ratios
        assert len(ratios) == 10
        assert all(b <= a + 1e-8 for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < ratios[0]
        assert verdict.equality_flags["detA_over_t_power_non_increasing"]

    def test_condition_b_on_four_dimensional_de_sitter(self, cone_spec, cosh_grw):
        """Test the constant-cut ratio on f = cosh t against c = 1 stays at 1."""
        spec = cone_spec(n=4, chi_max=0.3, rapidity_panels=4, azimuth_nodes=4, polar_nodes=2)
        radii = [0.1 * i for i in range(1, 11)]
        verdict = check_bishop_gromov(spec, cosh_grw, np.zeros(4), 1.0, radii, GromovCondition.B)
        assert verdict.status is VerdictStatus.HOLDS
        ratios = verdict.ratio_curve.ratios
        assert all(b <= a + 1e-8 for a, b in zip(ratios, ratios[1:]))
        assert ratios == pytest.approx([1.0] * 10, rel=1e-6)
        assert verdict.equality_flags["plateau"]

    def test_condition_a_needs_flat_model(self, cone_spec, minkowski2, origin2):
        """Test that condition (A) rejects c != 0."""
        with pytest.raises(ConditionNotMetError):
            check_bishop_gromov(
                cone_spec(), minkowski2, origin2, 1.0, [0.5, 1.0], GromovCondition.A
            )

    def test_condition_b_needs_constant_cut(self, cone_spec, minkowski2, origin2):
        """Test that condition (B) rejects a non-constant cut."""
        spec = cone_spec().with_cut(TwoLevelCut(1.0, 2.0))
        with pytest.raises(ConditionNotMetError):
            check_bishop_gromov(spec, minkowski2, origin2, 1.0, [0.5, 1.0], GromovCondition.B)


class TestSearch:
    """Tests for the ratio-violation search."""

    def test_family_labels(self, cone_spec, minkowski2, origin2):
        """Test one instance per (c, cut pair)."""
        family = two_level_family(
            minkowski2, origin2, [0.0, 1.0], [(1.0, 2.0), (2.0, 1.0)], 0.5, cone_spec()
        )
        assert len(family) == 4
        assert family[0].label == "grw[c=0, cut=(1, 2)]"
        assert family[3].params == {"c": 1.0, "cut_low": 2.0, "cut_high": 1.0, "chi_max": 0.5}
        assert family[0].spec.chi_max == 0.5

    def test_skips_failed_audit_and_finds_nothing(self, cone_spec, minkowski2, origin2):
        """Test that c = -1 on flat space is skipped and c = 0 gives no increase."""
        family = two_level_family(minkowski2, origin2, [-1.0, 0.0], [(1.0, 2.0)], 0.5, cone_spec())
        report = search_ratio_violation(family, [0.25, 0.5, 1.0], budget=4)
        assert report.evaluated == 1
        assert report.hits == []
        assert report.summary == "none found within budget"
        skipped, evaluated = report.instances
        assert not skipped.evaluated
        assert skipped.skipped_reason.startswith("ricci bound fails")
        assert evaluated.evaluated
        assert evaluated.condition_a_applies
        assert not evaluated.condition_b_applies
        assert evaluated.max_increase < 1e-8

    def test_budget_limits_instances(self, cone_spec, minkowski2, origin2):
        """Test that at most budget instances are considered."""
        family = two_level_family(
            minkowski2, origin2, [0.0, 1.0], [(1.0, 2.0), (2.0, 1.0)], 0.5, cone_spec()
        )
        report = search_ratio_violation(family, [0.5, 1.0], budget=1)
        assert len(report.instances) == 1
        assert report.budget == 1
