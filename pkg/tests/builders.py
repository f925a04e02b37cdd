"""Terse constructors for in-memory report documents."""

from __future__ import annotations

from collections.abc import Mapping
from datetime import date

from dsa_audit.model import (
    ALL,
    Action,
    Detection,
    Mechanism,
    MetricKey,
    MetricTable,
    MetricValue,
    ReportingPeriod,
    TransparencyReportDoc,
)

TR = Mechanism.TRANSPARENCY_REPORT
SOR = Mechanism.SOR_DB


def value(key: MetricKey, count: int | None) -> MetricValue:
    return MetricValue.absent(key) if count is None else MetricValue(key, count)


def make_doc(
    label: str,
    removals: Mapping[str, int | None],
    total: int | None,
    *,
    automated: Mapping[str, int | None] | None = None,
    total_automated: int | None = None,
    notices: Mapping[str, tuple[int | None, int | None, int | None]] | None = None,
    notice_totals: tuple[int | None, int | None, int | None] | None = None,
    terminations: int | None = None,
    reviewers: Mapping[str, int] | None = None,
    start: date | None = None,
    end: date | None = None,
) -> TransparencyReportDoc:
    def key(cat: str, action: Action = Action.REMOVAL, det: Detection = Detection.ANY) -> MetricKey:
        return MetricKey(TR, label, cat, action, det)

    entries = [value(key(c), n) for c, n in removals.items()]
    entries += [value(key(c, det=Detection.AUTOMATED), n) for c, n in (automated or {}).items()]
    notice_entries = []
    columns = (Action.NOTICE_SUBMITTED, Action.NOTICE_REMOVED, Action.NOTICE_RESTRICTED)
    for cat, cells in (notices or {}).items():
        notice_entries += [value(key(cat, a), n) for a, n in zip(columns, cells)]
    if notice_totals is not None:
        notice_entries += [value(key(ALL, a), n) for a, n in zip(columns, notice_totals)]
    return TransparencyReportDoc(
        period=ReportingPeriod(label, start, end),
        removals=MetricTable(tuple(entries)),
        declared_total=value(key(ALL), total),
        declared_total_automated=value(key(ALL, det=Detection.AUTOMATED), total_automated),
        notices=MetricTable(tuple(notice_entries)),
        terminations=value(key(ALL, Action.ACCOUNT_TERMINATION), terminations),
        reviewer_counts=tuple((reviewers or {}).items()),
    )


def sor_value(label: str, count: int | None, action: Action = Action.ACCOUNT_TERMINATION) -> MetricValue:
    return value(MetricKey(SOR, label, ALL, action), count)
