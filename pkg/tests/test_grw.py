"""Tests for GRW spacetimes and their curvature conditions."""

import math

import numpy as np
import pytest

from src.exceptions import InputDomainError, ModelDomainError, UnsupportedDimensionError
from src.families import (
    GRWData,
    WarpingFunction,
    build_grw_metric,
    find_bound_violation,
    grw_from_params,
    grw_ricci_conditions,
    grw_ricci_timelike,
    grw_sectional_conditions,
    grw_timelike_plane_curvature,
    ricci_parabola,
    sectional_parabola,
)


class TestWarpingFunction:
    """Tests for WarpingFunction."""

    def test_cosh_derivatives(self):
        """Test f, f' and f'' of a cosh(b t)."""
        w = WarpingFunction("cosh", (2.0, 0.5))
        assert w.f(1.0) == pytest.approx(2.0 * math.cosh(0.5))
        assert w.df(1.0) == pytest.approx(math.sinh(0.5))
        assert w.d2f(1.0) == pytest.approx(0.5 * math.cosh(0.5))

    def test_cos_derivatives(self):
        """Test the signs of the cos form derivatives."""
        w = WarpingFunction("cos", (1.0, 2.0))
        assert w.df(0.3) == pytest.approx(-2.0 * math.sin(0.6))
        assert w.d2f(0.3) == pytest.approx(-4.0 * math.cos(0.6))

    def test_polynomial(self):
        """Test polynomial coefficients in increasing degree."""
        w = WarpingFunction("poly", (1.0, 0.0, 0.5))
        assert w.f(2.0) == pytest.approx(3.0)
        assert w.d2f(2.0) == pytest.approx(1.0)

    def test_vectorized(self):
        """Test that array input gives array output."""
        w = WarpingFunction("exp", (1.0, 1.0))
        assert np.allclose(w.f(np.array([0.0, 1.0])), [1.0, math.e])

    def test_unknown_form(self):
        """Test that unknown forms are rejected."""
        with pytest.raises(InputDomainError):
            WarpingFunction("sin", (1.0, 1.0))
        with pytest.raises(InputDomainError):
            WarpingFunction("cosh", (1.0,))


class TestGRWData:
    """Tests for GRWData validation."""

    def test_non_positive_warping(self):
        """Test that f must stay positive on the interval."""
        with pytest.raises(ModelDomainError):
            GRWData(WarpingFunction("poly", (0.5, 1.0)), m=2, interval=(-3.0, 3.0))

    def test_cos_interval_default(self):
        """Test that the cos form gets an interval inside the zeros of f."""
        data = grw_from_params("cos", (1.0, 0.5), m=2, k_F=1.0)
        lo, hi = data.interval
        assert -math.pi < lo < 0 < hi < math.pi
        assert np.all(np.asarray(data.warping.f(data.sample_times())) > 0)

    def test_base_point(self):
        """Test the base point sits at t = 0 and the fiber origin."""
        data = grw_from_params("cosh", (1.0, 1.0), m=3, k_F=1.0)
        assert np.array_equal(data.base_point(), np.zeros(4))
        shifted = grw_from_params("exp", (1.0, 1.0), m=1, interval=(1.0, 2.0))
        assert shifted.base_point()[0] == pytest.approx(1.5)


class TestCurvatureFormulas:
    """Tests for the closed-form GRW curvature."""

    def test_de_sitter_ricci(self, cosh_grw_data):
        """Test Ric(d_t, d_t) = -m for de Sitter space."""
        assert grw_ricci_timelike(cosh_grw_data, 0.0) == pytest.approx(-3.0)
        assert grw_ricci_timelike(cosh_grw_data, 1.3) == pytest.approx(-3.0)

    def test_null_limit_ricci(self, cosh_grw_data):
        """Test Ric vanishes on the null limit lam = 1/f in an Einstein spacetime."""
        assert grw_ricci_timelike(cosh_grw_data, 0.0, lam=1.0) == pytest.approx(0.0, abs=1e-12)

    def test_spacelike_vector_rejected(self, cosh_grw_data):
        """Test that lam^2 f^2 > 1 is rejected."""
        with pytest.raises(ModelDomainError):
            grw_ricci_timelike(cosh_grw_data, 0.0, lam=1.5)

    def test_outside_interval(self, cosh_grw_data):
        """Test that t must lie in the interval."""
        with pytest.raises(ModelDomainError):
            grw_ricci_timelike(cosh_grw_data, 5.0)

    @pytest.mark.parametrize("t,lam", [(0.0, 0.0), (0.5, 0.5), (-1.0, 0.3)])
    def test_de_sitter_plane_curvature(self, cosh_grw_data, t, lam):
        """Test every timelike plane of de Sitter space has curvature 1."""
        assert grw_timelike_plane_curvature(cosh_grw_data, t, lam) == pytest.approx(1.0)

    def test_tilted_plane_needs_two_fiber_dimensions(self):
        """Test that a tilted plane needs m >= 2."""
        data = grw_from_params("cosh", (1.0, 1.0), m=1)
        with pytest.raises(UnsupportedDimensionError):
            grw_timelike_plane_curvature(data, 0.0, lam=0.5)

    def test_parabolas(self, cosh_grw_data):
        """Test the quadratic margins against their coefficients."""
        ric = ricci_parabola(cosh_grw_data, 0.0, 1.0)
        assert ric.a == pytest.approx(0.0) and ric.b == pytest.approx(0.0)
        sec = sectional_parabola(cosh_grw_data, 0.0, 0.5)
        assert sec.a == pytest.approx(0.5)
        assert sec.b == pytest.approx(-0.5)
        assert sec.lam_max == pytest.approx(1.0)
        assert sec.endpoint == pytest.approx(0.0)
        assert sec.minimum == pytest.approx(0.0)
        assert sec(0.5) == pytest.approx(0.375)


class TestConditions:
    """Tests for the warping-function conditions."""

    def test_ricci_conditions_equality(self, cosh_grw_data):
        """Test de Sitter space meets the Ricci conditions at c = 1 with equality."""
        verdict = grw_ricci_conditions(cosh_grw_data, 1.0)
        assert verdict.condition_a_holds and verdict.condition_b_holds
        assert verdict.condition_a_equality and verdict.condition_b_equality
        assert not verdict.condition_b_vacuous

    def test_ricci_condition_a_fails_below(self, cosh_grw_data):
        """Test f''/f <= c fails for c = 0.5."""
        verdict = grw_ricci_conditions(cosh_grw_data, 0.5)
        assert not verdict.condition_a_holds
        assert verdict.worst_a_margin == pytest.approx(-0.5)
        assert len(verdict.failures_a) > 0

    @pytest.mark.parametrize("k_F,holds", [(1.0, True), (0.5, True), (1.2, False)])
    def test_sectional_condition_b(self, k_F, holds):
        """Test K_F <= f f'' - f'^2 = 1 for f = cosh t."""
        data = GRWData(WarpingFunction("cosh", (1.0, 1.0)), m=3, k_F=k_F)
        verdict = grw_sectional_conditions(data, 0.5)
        assert verdict.condition_a_holds
        assert verdict.condition_b_holds is holds
        assert verdict.condition_b_equality is (k_F == 1.0)

    def test_one_dimensional_fiber_is_vacuous(self):
        """Test condition (B) holds automatically for m = 1."""
        data = grw_from_params("exp", (1.0, 1.0), m=1)
        verdict = grw_sectional_conditions(data, 1.0)
        assert verdict.condition_b_vacuous and verdict.condition_b_holds


class TestAssembledChart:
    """Tests for the assembled GRW chart."""

    def test_chart_curvature_matches_closed_form(self, cosh_grw, cosh_grw_data):
        """Test metric.ricci against the closed-form Ric(d_t, d_t)."""
        x = np.array([0.4, 0.1, -0.2, 0.05])
        ric = cosh_grw.ricci(x)
        assert ric[0, 0] == pytest.approx(grw_ricci_timelike(cosh_grw_data, 0.4), abs=1e-6)

    def test_unsupported_fiber_dimension(self):
        """Test that fiber dimensions above 3 have no builtin chart."""
        data = GRWData(WarpingFunction("cosh", (1.0, 1.0)), m=4, k_F=1.0)
        with pytest.raises(UnsupportedDimensionError):
            build_grw_metric(data)

    def test_ricci_bound_violation(self, cosh_grw_data, cosh_grw):
        """Test sampling finds Ric(X, X) < 3 c g(X, X) for c = 0.5 at lam = 0."""
        found = find_bound_violation(cosh_grw_data, 0.5, "ricci", metric=cosh_grw, t_samples=5)
        assert found.violated
        assert found.lam == 0.0
        assert found.margin == pytest.approx(-1.5, abs=1e-5)

    def test_ricci_bound_holds(self, cosh_grw_data, cosh_grw):
        """Test that the Ricci bound holds for c = 1.5."""
        found = find_bound_violation(
            cosh_grw_data, 1.5, "ricci", metric=cosh_grw, t_samples=5, slack=1e-6
        )
        assert not found.violated

    def test_sectional_bound_violation(self, cosh_grw_data, cosh_grw):
        """Test sampling finds K < 1.5 on de Sitter space."""
        found = find_bound_violation(cosh_grw_data, 1.5, "sectional", metric=cosh_grw, t_samples=5)
        assert found.violated
        assert found.margin == pytest.approx(-0.5, abs=1e-5)

    def test_unknown_kind(self, cosh_grw_data):
        """Test that only ricci and sectional are sampled."""
        with pytest.raises(InputDomainError):
            find_bound_violation(cosh_grw_data, 1.0, "scalar")
