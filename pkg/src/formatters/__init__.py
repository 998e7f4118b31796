"""Report formatters for SCLV Lab."""

from .report import ReportFormatter

__all__ = ["ReportFormatter"]
