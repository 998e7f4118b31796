"""SCLV Lab - Numerical laboratory for volume comparison of star-shaped tangent subsets."""

__version__ = "0.1.0"
