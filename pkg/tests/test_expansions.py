"""Tests for small-t expansion fits and the local comparisons they imply."""

import math

import numpy as np
import pytest

from src.exceptions import ExpansionWindowError, RicciEqualError, UnsupportedModeError
from src.families import build_grw_metric, euclidean, grw_from_params, riemannian_space_form
from src.geometry import ConstantProfile, ModelConstants, solve_jacobi
from src.models import SignatureMode
from src.verifiers import (
    fit_detA_expansion,
    fit_jacobi_expansion,
    local_comparison,
    riemannian_ball_comparison,
)
from src.volumes import ConstantCut, SCLVSpec


@pytest.fixture
def de_sitter_solution():
    """Jacobi solution for tidal = -I in dimension 4, resolved tightly."""
    return solve_jacobi(ConstantProfile.scalar(-1.0, 3), ModelConstants(0.0, 4), 0.5, tol=1e-12)


class TestDetAExpansion:
    """Tests for fit_detA_expansion."""

    def test_ricci_from_sinh_cubed(self, de_sitter_solution):
        """Test det A = sinh(t)^3 gives Ric(xi, xi) = -3."""
        fit = fit_detA_expansion(de_sitter_solution)
        assert fit.m == 3
        assert fit.ricci_estimate == pytest.approx(-3.0, abs=1e-3)
        assert fit.leading_check < 1e-6
        assert fit.fit_window == pytest.approx((0.02, 0.2))
        assert len(fit.coefficients) == 4

    def test_flat_profile(self):
        """Test a flat profile gives a vanishing Ricci estimate."""
        sol = solve_jacobi(ConstantProfile.scalar(0.0, 2), ModelConstants(0.0, 3), 0.5, tol=1e-12)
        assert fit_detA_expansion(sol).ricci_estimate == pytest.approx(0.0, abs=1e-6)

    def test_window_outside_range(self, de_sitter_solution):
        """Test that the fit window must lie in (0, 0.2]."""
        with pytest.raises(ExpansionWindowError):
            fit_detA_expansion(de_sitter_solution, window=(0.1, 0.5))

    def test_coarse_tolerance(self):
        """Test that a loosely resolved solution is rejected."""
        sol = solve_jacobi(ConstantProfile.scalar(-1.0, 2), ModelConstants(0.0, 3), 0.5, tol=1e-6)
        with pytest.raises(ExpansionWindowError):
            fit_detA_expansion(sol)

    def test_solution_too_short(self):
        """Test that the solution must reach the end of the window."""
        sol = solve_jacobi(ConstantProfile.scalar(-1.0, 2), ModelConstants(0.0, 3), 0.1, tol=1e-12)
        with pytest.raises(ExpansionWindowError):
            fit_detA_expansion(sol)


class TestJacobiExpansion:
    """Tests for fit_jacobi_expansion."""

    @pytest.fixture
    def mixed_solution(self):
        profile = ConstantProfile(np.diag([-1.0, 0.5]))
        return solve_jacobi(profile, ModelConstants(0.0, 3), 0.5, tol=1e-12)

    def test_sectional_estimates(self, mixed_solution):
        """Test K = tidal_ii / epsilon from the cubic coefficient of each frame field."""
        first = fit_jacobi_expansion(mixed_solution, 0)
        second = fit_jacobi_expansion(mixed_solution, 1)
        assert first.epsilon == -1
        assert first.diagonal_coefficient == pytest.approx(1.0 / 6.0, abs=1e-5)
        assert first.sectional_estimate == pytest.approx(1.0, abs=1e-4)
        assert second.sectional_estimate == pytest.approx(-0.5, abs=1e-4)

    def test_off_diagonal_is_cubic(self, mixed_solution):
        """Test that a diagonal profile has no linear off-diagonal terms."""
        report = fit_jacobi_expansion(mixed_solution, 0)
        assert report.off_diagonal_cubic
        assert len(report.off_diagonal_linear) == 1

    def test_index_out_of_range(self, mixed_solution):
        """Test that the frame index must exist."""
        with pytest.raises(IndexError):
            fit_jacobi_expansion(mixed_solution, 2)


class TestLocalComparison:
    """Tests for local_comparison."""

    def test_de_sitter_against_minkowski(self, cone_spec, minkowski2):
        """Test Ric = -1 < 0 orders det A and the small volumes the other way."""
        de_sitter = build_grw_metric(grw_from_params("cosh", (1.0, 1.0), m=1))
        report = local_comparison(
            de_sitter, minkowski2, np.zeros(2), np.zeros(2), cone_spec(chi_max=0.5), t_window=0.5
        )
        assert report.ricci_1 == pytest.approx(-1.0, abs=1e-6)
        assert report.ricci_2 == pytest.approx(0.0, abs=1e-12)
        assert report.expected == "vol_1 > vol_2"
        assert report.crossings == []
        assert report.delta == pytest.approx(0.5)
        assert report.vol_1 > report.vol_2
        assert report.holds

    def test_opposite_orderings_for_flat_against_unit_curvature(self, cone_spec, minkowski2):
        """Test c = 0 against c = 1 orders a timelike cone and a Riemannian section oppositely."""
        de_sitter = build_grw_metric(grw_from_params("cosh", (1.0, 1.0), m=1))
        cone = local_comparison(
            minkowski2, de_sitter, np.zeros(2), np.zeros(2), cone_spec(chi_max=0.5), t_window=0.5
        )
        section_spec = SCLVSpec(ModelConstants(0.0, 2, SignatureMode.RIEMANNIAN), ConstantCut(1.0))
        section = local_comparison(
            euclidean(2),
            riemannian_space_form(1.0, 2),
            np.zeros(2),
            np.zeros(2),
            section_spec,
            t_window=0.5,
        )
        assert cone.expected == "vol_1 < vol_2"
        assert cone.vol_1 < cone.vol_2
        assert cone.holds
        assert section.mode is SignatureMode.RIEMANNIAN
        assert section.ricci_2 == pytest.approx(1.0, abs=1e-6)
        assert section.expected == "vol_1 > vol_2"
        assert section.vol_1 > section.vol_2
        assert section.holds

    def test_equal_ricci(self, cone_spec, minkowski2):
        """Test that equal Ricci curvatures give no strict ordering."""
        with pytest.raises(RicciEqualError):
            local_comparison(minkowski2, minkowski2, np.zeros(2), np.zeros(2), cone_spec())


class TestBallComparison:
    """Tests for riemannian_ball_comparison."""

    def test_sphere_against_plane(self):
        """Test geodesic discs on the unit sphere are smaller than Euclidean discs."""
        report = riemannian_ball_comparison(
            riemannian_space_form(1.0, 2), euclidean(2), np.zeros(2), np.zeros(2), [0.1, 0.2, 0.3]
        )
        assert report.expected == "vol_1 < vol_2"
        assert report.radii == [0.1, 0.2, 0.3]
        assert report.skipped_radii == []
        assert report.epsilon == pytest.approx(0.3)
        for r, v1, v2 in zip(report.radii, report.vol_1, report.vol_2):
            assert v1 == pytest.approx(2.0 * math.pi * (1.0 - math.cos(r)), rel=1e-8)
            assert v2 == pytest.approx(math.pi * r**2, rel=1e-10)
        assert report.holds

    def test_three_dimensional_closed_forms(self):
        """Test unit 3-sphere and Euclidean balls against their closed-form volumes."""
        report = riemannian_ball_comparison(
            riemannian_space_form(1.0, 3), euclidean(3), np.zeros(3), np.zeros(3), [0.2, 0.5]
        )
        assert report.expected == "vol_1 < vol_2"
        assert report.radii == [0.2, 0.5]
        for r, v1, v2 in zip(report.radii, report.vol_1, report.vol_2):
            assert v1 == pytest.approx(2.0 * math.pi * (r - math.sin(r) * math.cos(r)), rel=1e-6)
            assert v2 == pytest.approx(4.0 * math.pi * r**3 / 3.0, rel=1e-6)
        assert report.holds

    def test_hyperbolic_plane_is_larger(self):
        """Test geodesic discs of curvature -1 are larger than Euclidean discs."""
        report = riemannian_ball_comparison(
            riemannian_space_form(-1.0, 2), euclidean(2), np.zeros(2), np.zeros(2), [0.1, 0.2]
        )
        assert report.expected == "vol_1 > vol_2"
        assert report.holds

    def test_lorentzian_metric_rejected(self, minkowski2):
        """Test that both metrics must be Riemannian."""
        with pytest.raises(UnsupportedModeError):
            riemannian_ball_comparison(
                minkowski2, euclidean(2), np.zeros(2), np.zeros(2), [0.1]
            )
