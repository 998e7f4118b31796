"""Report formatter for SCLV Lab.

JSON output has sorted keys, two-space indentation and LF line endings; floats are written
as shortest round-trip decimals. CSV output uses the same float representation.
"""

import csv
import io
import json
import logging
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from ..geometry import JacobiSolution, model_density
from ..models import (
    ComparisonVerdict,
    CounterexampleReport,
    ExpansionReport,
    OracleResult,
    RatioCurve,
    SearchReport,
    VolumeReport,
)

logger = logging.getLogger(__name__)

RATIO_COLUMNS = ("r", "vol_Ur", "vol_U0r", "V")
DUMP_COLUMNS = ("t", "detA", "s_c_pow", "psi", "Phi")
DIRECTION_COLUMNS = ("index", "weight", "cut", "detA_integral", "model_integral", "radial_error")
EXPANSION_COLUMNS = ("index", "ricci_estimate", "ricci_metric", "leading_check", "residual")
SEARCH_COLUMNS = ("label", "evaluated", "skipped_reason", "max_increase")


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def _jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {str(k): _jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_jsonable(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return payload.tolist()
    if isinstance(payload, np.generic):
        return payload.item()
    return payload


class ReportFormatter:
    """Formats lab reports as JSON, CSV and plain text."""

    def to_json(self, payload: Any) -> str:
        """Serialize a report, a list of reports or a dict of reports."""
        return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"

    def _csv(self, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buffer.getvalue()

    def ratio_csv(self, curve: RatioCurve) -> str:
        return self._csv(RATIO_COLUMNS, ((p.r, p.vol_Ur, p.vol_U0r, p.V) for p in curve.points))

    def direction_dump_csv(self, solution: JacobiSolution) -> str:
        """Per-direction dump of det A, s_c^(n-1), psi and Phi on the solution grid."""
        t = solution.grid
        s_pow = np.asarray(model_density(solution.consts, t))
        rows = zip(t, solution.detA, s_pow, solution.psi, solution.Phi)
        return self._csv(DUMP_COLUMNS, rows)

    def per_direction_csv(self, report: VolumeReport) -> str:
        rows = (
            (k, d.weight, d.cut, d.detA_integral, d.model_integral, d.radial_error)
            for k, d in enumerate(report.per_direction)
        )
        return self._csv(DIRECTION_COLUMNS, rows)

    def expansion_csv(self, report: ExpansionReport) -> str:
        rows = (
            (k, f.ricci_estimate, ric, f.leading_check, f.residual)
            for k, (f, ric) in enumerate(zip(report.fits, report.ricci_metric))
        )
        return self._csv(EXPANSION_COLUMNS, rows)

    def search_csv(self, report: SearchReport) -> str:
        rows = (
            (i.label, i.evaluated, i.skipped_reason, i.max_increase) for i in report.instances
        )
        return self._csv(SEARCH_COLUMNS, rows)

    def format_counterexample(self, report: CounterexampleReport) -> str:
        lines = []
        for data in report.data_sets:
            lines.append(f"[{data.label}]")
            lines.append(f"  a/b termwise: {', '.join(data.ratios_ab)}")
            lines.append(f"  c/d termwise: {', '.join(data.ratios_cd)}")
            lines.append(f"  sum a / sum b = {data.sum_ratio_ab}")
            lines.append(f"  sum c / sum d = {data.sum_ratio_cd}")
            if data.side_conditions is not None:
                side = "yes" if data.side_conditions else "no"
                lines.append(f"  a < c < d and a < b < d: {side}")
            lines.append(f"  {data.verdict}")
        return "\n".join(lines) + "\n"

    def format_verdict(self, verdict: ComparisonVerdict) -> str:
        audit = verdict.hypothesis_audit
        lines = [
            f"{verdict.theorem.value}: {verdict.status.value}",
            f"  {audit.kind} audit vs bound {audit.bound:g}: "
            f"{'passed' if audit.passed else 'failed'} (worst margin {audit.worst_margin:.3e})",
        ]
        if verdict.vol_U is not None and verdict.vol_U0 is not None:
            lines.append(f"  vol(U) = {verdict.vol_U:.12g}, vol(U0) = {verdict.vol_U0:.12g}")
        if verdict.ratio_curve is not None:
            lines.append(f"  max ratio increase {verdict.ratio_curve.max_increase:.3e}")
        if verdict.equality:
            lines.append("  equality case")
        lines.extend(f"  note: {note}" for note in verdict.notes)
        return "\n".join(lines) + "\n"

    def format_summary(self, command: str, report: Any) -> str:
        """One-screen plain-text summary of a command result."""
        if isinstance(report, CounterexampleReport):
            return self.format_counterexample(report)
        if isinstance(report, ComparisonVerdict):
            return self.format_verdict(report)
        if isinstance(report, VolumeReport):
            return (
                f"vol(U) = {report.vol_U:.12g}\nvol(U0) = {report.vol_U0:.12g}\n"
                f"quadrature error estimate {report.quadrature_error_estimate:.3e} "
                f"over {report.direction_count} directions\n"
            )
        if isinstance(report, RatioCurve):
            body = "".join(f"  r={p.r:g}  V={p.V:.12g}\n" for p in report.points)
            flag = "non-increasing" if report.non_increasing else "increasing somewhere"
            return f"ratio curve ({flag}, max increase {report.max_increase:.3e})\n{body}"
        if isinstance(report, SearchReport):
            return f"search: {report.evaluated} of {report.budget} evaluated, {report.summary}\n"
        if isinstance(report, ExpansionReport):
            text = (
                f"expansion fits: {len(report.fits)}, "
                f"max |Ric fit - Ric| = {report.max_ricci_error:.3e}\n"
            )
            if report.local_comparison is not None:
                lc = report.local_comparison
                text += f"local comparison: expected {lc.expected}, holds={lc.holds}\n"
            if report.ball_comparison is not None:
                bc = report.ball_comparison
                text += f"ball comparison: expected {bc.expected}, holds={bc.holds}\n"
            return text
        if isinstance(report, OracleResult):
            return (
                f"oracle ({report.method}): {report.estimate:.10g} +/- {report.standard_error:.3e} "
                f"[{report.ci_low:.10g}, {report.ci_high:.10g}]\n"
            )
        if isinstance(report, list):
            return "".join(self.format_summary(command, item) for item in report)
        logger.debug(f"No summary layout for {type(report).__name__}")
        return f"{command}: done\n"
