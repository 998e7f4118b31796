"""Shared fixtures for SCLV Lab tests."""

import math

import numpy as np
import pytest

from src.families import GRWData, WarpingFunction, build_grw_metric, minkowski
from src.geometry import ModelConstants
from src.models import SignatureMode
from src.volumes import ConstantCut, SCLVSpec


@pytest.fixture
def minkowski2():
    return minkowski(2)


@pytest.fixture
def minkowski3():
    return minkowski(3)


@pytest.fixture
def origin3():
    return np.zeros(3)


@pytest.fixture
def cosh_grw_data():
    """f = cosh t over the unit 3-sphere: de Sitter space of curvature 1."""
    return GRWData(WarpingFunction("cosh", (1.0, 1.0)), m=3, k_F=1.0)


@pytest.fixture
def cosh_grw(cosh_grw_data):
    return build_grw_metric(cosh_grw_data)


@pytest.fixture
def cone_spec():
    """Future cone of rapidity 1 in dimension 2, cut at 1."""

    def make(c: float = 0.0, n: int = 2, chi_max: float = 1.0, cut: float = 1.0, **kwargs):
        return SCLVSpec(
            ModelConstants(c, n, SignatureMode.LORENTZIAN_TIMELIKE),
            ConstantCut(cut),
            chi_max=chi_max,
            **kwargs,
        )

    return make


def cone_area_2d(chi_max: float, cut: float = 1.0) -> float:
    """Coordinate area of {s (cosh x, sinh x): 0 < s < cut, |x| <= chi_max}."""
    return cut**2 * chi_max


def hyperbolic_disc_measure(chi_max: float) -> float:
    return 2.0 * math.pi * (math.cosh(chi_max) - 1.0)
