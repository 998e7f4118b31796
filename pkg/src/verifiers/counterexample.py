"""Exact arithmetic showing that termwise ratio bounds do not survive summation.

Given positive a_i, b_i, c_i, d_i with a_i/b_i >= c_i/d_i for every i, the sums can still
satisfy sum(a)/sum(b) < sum(c)/sum(d). Reading a_i, b_i as radial integrals up to r and
c_i, d_i as radial integrals up to R > r, this is why directionwise monotonicity of
det A / s_c^(n-1) does not by itself make V(r) non-increasing.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

from ..models import CounterexampleDataSet, CounterexampleReport

logger = logging.getLogger(__name__)

DEFAULT_M = 10


def _fmt(values: Sequence[Fraction]) -> list[str]:
    return [str(v) for v in values]


def ratio_sum_reversal(
    label: str,
    a: Sequence[Fraction],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
    d: Sequence[Fraction],
    side_conditions: bool = False,
) -> CounterexampleDataSet:
    """Evaluate one data set in exact rational arithmetic.

    Args:
        label: Name of the data set.
        a, b, c, d: Positive numbers of equal length.
        side_conditions: Also check a_i < c_i < d_i and a_i < b_i < d_i.

    Raises:
        ValueError: If the sequences differ in length or contain non-positive entries.
    """
    if not len(a) == len(b) == len(c) == len(d) or not a:
        raise ValueError("data set needs four non-empty sequences of equal length")
    if any(x <= 0 for seq in (a, b, c, d) for x in seq):
        raise ValueError("data set entries must be positive")

    ratios_ab = [ai / bi for ai, bi in zip(a, b)]
    ratios_cd = [ci / di for ci, di in zip(c, d)]
    sum_ab = Fraction(sum(a)) / Fraction(sum(b))
    sum_cd = Fraction(sum(c)) / Fraction(sum(d))
    side: Optional[bool] = None
    if side_conditions:
        side = all(ai < ci < di and ai < bi < di for ai, bi, ci, di in zip(a, b, c, d))

    data = CounterexampleDataSet(
        label=label,
        a=_fmt(a),
        b=_fmt(b),
        c=_fmt(c),
        d=_fmt(d),
        ratios_ab=_fmt(ratios_ab),
        ratios_cd=_fmt(ratios_cd),
        termwise_dominates=all(x >= y for x, y in zip(ratios_ab, ratios_cd)),
        sum_ratio_ab=str(sum_ab),
        sum_ratio_cd=str(sum_cd),
        sum_inequality_reversed=sum_ab < sum_cd,
        side_conditions=side,
    )
    logger.debug(f"{label}: {data.sum_ratio_ab} vs {data.sum_ratio_cd}, {data.verdict}")
    return data


def ratio_sum_counterexample(M: int = DEFAULT_M) -> CounterexampleReport:
    """Both classical data sets: the large-M one and the one with a_i < c_i < d_i, a_i < b_i < d_i."""
    F = Fraction
    large_m = ratio_sum_reversal(
        f"large-M (M={M})",
        a=[F(2), F(2)],
        b=[F(1), F(1, M)],
        c=[F(1), F(M)],
        d=[F(1), F(1)],
    )
    bounded = ratio_sum_reversal(
        "bounded",
        a=[F(3, 10), F(1, 99)],
        b=[F(1, 2), F(1, 90)],
        c=[F(1, 2), F(9, 10)],
        d=[F(1), F(1)],
        side_conditions=True,
    )
    report = CounterexampleReport(data_sets=[large_m, bounded])
    logger.info(f"Ratio-sum counterexample reversed in every data set: {report.reversed_everywhere}")
    return report
