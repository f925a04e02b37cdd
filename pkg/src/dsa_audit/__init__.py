"""Consistency auditing of DSA transparency reports, statements of reasons and risk assessments."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import AuditError
from .model import Finding, Level, MetricKey, MetricTable, MetricValue, RuleConfig, Severity
from .rules import AuditBundle, FindingSet, run_all

__all__ = [
    "AuditBundle",
    "AuditError",
    "Finding",
    "FindingSet",
    "Level",
    "MetricKey",
    "MetricTable",
    "MetricValue",
    "RuleConfig",
    "Severity",
    "__version__",
    "run_all",
]
