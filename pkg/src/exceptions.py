"""Exception hierarchy for SCLV Lab.

Library code raises these; only the orchestrator and CLI translate them into exit codes.
"""

from typing import Optional


class LabError(Exception):
    """Base class for all errors raised by the laboratory."""

    pass


class ConfigError(LabError):
    """Exception raised when a run configuration cannot be parsed or validated."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class InputDomainError(LabError):
    """A hypothesis or domain condition of a computation is not met."""

    pass


class ModelDomainError(InputDomainError):
    """Model-space quantity evaluated outside its domain (pole of s_c, diam condition)."""

    pass


class ConjugatePointError(InputDomainError):
    """A conjugate point appears before the end of the requested radial range."""

    def __init__(self, message: str, time: float, direction: Optional[list[float]] = None):
        self.time = time
        self.direction = direction
        super().__init__(message)


class ChartExitError(InputDomainError):
    """A radial geodesic left the coordinate chart before the requested time."""

    def __init__(self, message: str, exit_time: float):
        self.exit_time = exit_time
        super().__init__(message)


class OutOfChartError(InputDomainError):
    """A point lies outside the chart domain (or too close to its boundary)."""

    pass


class DegeneratePlaneError(InputDomainError):
    """A tangent plane has a (numerically) vanishing Gram determinant."""

    pass


class ProfileRangeError(InputDomainError):
    """A tidal profile was evaluated beyond the range it was built on."""

    pass


class HypothesisViolatedError(InputDomainError):
    """A curvature hypothesis of a comparison theorem fails."""

    pass


class ConditionNotMetError(InputDomainError):
    """Condition (A) or (B) of the ratio monotonicity theorem is not met."""

    pass


class RicciEqualError(InputDomainError):
    """Ricci curvatures coincide where a strict ordering is required."""

    pass


class SearchWindowError(InputDomainError):
    """No positive radius with the required strict ordering was found."""

    pass


class OracleUnavailableError(InputDomainError):
    """The Monte-Carlo oracle cannot realise the exponential map for this input."""

    pass


class UnsupportedDimensionError(InputDomainError):
    """Dimension outside the range supported by a builtin grid or chart."""

    pass


class UnsupportedModeError(InputDomainError):
    """Signature mode not supported by the requested operation."""

    pass


class BaseNotSupportedError(InputDomainError):
    """Conformal deformation requested over an unsupported base metric."""

    pass


class ExpansionWindowError(InputDomainError):
    """The solution does not resolve the small-t fit window."""

    pass


class CutGridMismatchError(InputDomainError):
    """Tabulated cut values do not match the quadrature grid."""

    pass


class NumericalError(LabError):
    """Internal numerical failure (pipeline bug or unstable integration)."""

    pass


class IntegrationStallError(NumericalError):
    """The adaptive integrator failed to advance (step-size collapse)."""

    pass


class SingularMetricError(NumericalError):
    """The metric matrix is not invertible at the queried point."""

    pass
