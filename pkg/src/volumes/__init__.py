"""Volumes of star-shaped tangent subsets by polar quadrature and Monte-Carlo."""

from .oracle import mc_volume_oracle
from .sclv import (
    ConstantCut,
    CutFunction,
    DirectionGrid,
    DirectionRun,
    SCLVSpec,
    TableCut,
    TwoLevelCut,
    check_compatible,
    direction_measure,
    flat_model_volume,
    ratio_curve,
    solve_directions,
    summarize_ratio,
    summarize_volume,
    volume,
)

__all__ = [
    "ConstantCut",
    "CutFunction",
    "DirectionGrid",
    "DirectionRun",
    "SCLVSpec",
    "TableCut",
    "TwoLevelCut",
    "check_compatible",
    "direction_measure",
    "flat_model_volume",
    "mc_volume_oracle",
    "ratio_curve",
    "solve_directions",
    "summarize_ratio",
    "summarize_volume",
    "volume",
]
