"""The consistency engine: internal, external, historical and cross-mechanism checks."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import timedelta
from decimal import Decimal
from enum import Enum
from fractions import Fraction

from .errors import InputError, KeyMismatchError, PeriodError, VocabularyError
from .model import (
    ALL,
    Action,
    AutomationMetric,
    AutomationMetricName,
    Detection,
    Finding,
    Level,
    Mechanism,
    MetricKey,
    MetricTable,
    MetricValue,
    ReportingPeriod,
    RuleConfig,
    Severity,
    SraRiskEntry,
    TransparencyReportDoc,
    format_fraction,
    ordered_periods,
    round_fraction,
)
from .taxonomy import (
    CrosswalkRelation,
    LifecycleKind,
    RelationKind,
    Registry,
    Taxonomy,
    default_taxonomy,
    detect_lifecycle,
)

TR = Mechanism.TRANSPARENCY_REPORT
SOR = Mechanism.SOR_DB


class ChangeStatus(str, Enum):
    DEFINED = "DEFINED"
    UNDEFINED_NEW = "UNDEFINED_NEW"
    UNDEFINED_GONE = "UNDEFINED_GONE"


@dataclass(frozen=True)
class PercentChange:
    previous: int | None
    current: int | None
    status: ChangeStatus
    exact: Fraction | None = None

    @property
    def value(self) -> Decimal | None:
        """Percent change rounded half-even to 2 dp, or None when undefined."""
        return None if self.exact is None else round_fraction(self.exact, 2)

    @property
    def defined(self) -> bool:
        return self.status is ChangeStatus.DEFINED

    def __str__(self) -> str:
        if self.exact is None:
            return self.status.value
        return f"{self.value:+.2f}%"


def percent_change(previous: MetricValue, current: MetricValue) -> PercentChange:
    a, b = previous.key, current.key
    if (a.mechanism, a.category, a.action, a.detection) != (b.mechanism, b.category, b.action, b.detection):
        raise KeyMismatchError(f"cannot compare {a} with {b}")
    if not current.reported:
        return PercentChange(previous.count, None, ChangeStatus.UNDEFINED_GONE)
    if not previous.reported or previous.count == 0:
        return PercentChange(previous.count, current.count, ChangeStatus.UNDEFINED_NEW)
    p, c = previous.count, current.count
    return PercentChange(p, c, ChangeStatus.DEFINED, Fraction(100 * (c - p), p))  # type: ignore[operator]


def graded(ratio: Fraction, warn: Fraction, error: Fraction) -> Severity:
    if ratio <= warn:
        return Severity.INFO
    if ratio <= error:
        return Severity.WARN
    return Severity.ERROR


def residual_severity(residual: int, total: int, config: RuleConfig) -> Severity:
    # a negative residual means the categories overshoot the total: double counting
    if residual < 0:
        return Severity.ERROR
    share = Fraction(residual, max(total, 1))
    return graded(share, config.residual_warn_share, config.residual_error_share)


def gap_severity(delta: int, a: int, b: int, config: RuleConfig) -> Severity:
    gap = Fraction(abs(delta), max(a, b, 1))
    return graded(gap, config.external_warn_rel, config.external_error_rel)


def _pct(value: Fraction) -> str:
    return format_fraction(value * 100, 2)


# -- internal ----------------------------------------------------------------------------

_NOTICE_COLUMNS = (
    ("submitted", Action.NOTICE_SUBMITTED),
    ("removed", Action.NOTICE_REMOVED),
    ("restricted", Action.NOTICE_RESTRICTED),
)


def _residual_finding(
    rule_id: str, declared: MetricValue, parts: list[MetricValue], what: str, config: RuleConfig
) -> Finding:
    assert declared.count is not None
    subtotal = sum(v.count for v in parts)  # type: ignore[misc]
    residual = declared.count - subtotal
    share = Fraction(residual, max(declared.count, 1))
    severity = residual_severity(residual, declared.count, config)
    if residual < 0:
        message = f"{what}: categories sum to {subtotal:,}, exceeding the declared total {declared.count:,}"
    elif residual == 0:
        message = f"{what}: categories sum exactly to the declared total {declared.count:,}"
    else:
        message = (
            f"{what}: declared total {declared.count:,} exceeds the sum of {len(parts)} "
            f"categories by {residual:,} ({_pct(share)}% unattributed)"
        )
    return Finding(
        rule_id=rule_id,
        level=Level.INTERNAL,
        severity=severity,
        keys=(declared.key,),
        expected=subtotal,
        observed=declared.count,
        delta=residual,
        message=message,
        detail=(("categories", str(len(parts))), ("residual_share_pct", _pct(share))),
    )


def check_internal_sums(doc: TransparencyReportDoc, config: RuleConfig = RuleConfig()) -> list[Finding]:
    """Declared totals against the sum of their REPORTED parts, per column.

    The finding's ``delta`` is the residual: declared total minus the sum.
    """
    if not doc.declared_total.reported:
        raise InputError(f"{doc.label}: missing declared_total", field="declared_total")
    removals_any = [
        v for v in doc.removals if v.reported and v.key.detection is Detection.ANY and v.key.category != ALL
    ]
    if not removals_any:
        raise InputError(f"{doc.label}: no reported removal categories")
    findings = [
        _residual_finding(
            "internal.residual.removals", doc.declared_total, removals_any, f"{doc.label} removals", config
        )
    ]
    if doc.declared_total_automated.reported:
        automated = [
            v
            for v in doc.removals
            if v.reported and v.key.detection is Detection.AUTOMATED and v.key.category != ALL
        ]
        if automated:
            findings.append(
                _residual_finding(
                    "internal.residual.removals_automated",
                    doc.declared_total_automated,
                    automated,
                    f"{doc.label} automated removals",
                    config,
                )
            )
    for column, action in _NOTICE_COLUMNS:
        total = doc.notices.get(MetricKey(TR, doc.label, ALL, action))
        parts = [v for v in doc.notices if v.reported and v.key.action is action and v.key.category != ALL]
        if total is not None and total.reported and parts:
            findings.append(
                _residual_finding(
                    f"internal.residual.notices_{column}", total, parts, f"{doc.label} notices {column}", config
                )
            )
    return findings


def check_notice_funnel(doc: TransparencyReportDoc) -> list[Finding]:
    """removed + restricted <= submitted per notice type and in total; automated <= total per removal row."""
    if not len(doc.notices):
        raise InputError(f"{doc.label}: no notices table", field="notices")
    findings: list[Finding] = []
    label = doc.label
    for category in [ALL, *doc.notices.categories()]:
        cells = {a: doc.notices.get(MetricKey(TR, label, category, a)) for _, a in _NOTICE_COLUMNS}
        submitted = cells[Action.NOTICE_SUBMITTED]
        if submitted is None or not submitted.reported:
            continue
        actioned = [cells[a] for a in (Action.NOTICE_REMOVED, Action.NOTICE_RESTRICTED)]
        actioned = [v for v in actioned if v is not None and v.reported]
        if not actioned:
            continue
        handled = sum(v.count for v in actioned)  # type: ignore[misc]
        if handled > submitted.count:  # type: ignore[operator]
            findings.append(
                Finding(
                    rule_id="internal.funnel.notices",
                    level=Level.INTERNAL,
                    severity=Severity.ERROR,
                    keys=(submitted.key, *(v.key for v in actioned)),
                    expected=submitted.count,
                    observed=handled,
                    message=(
                        f"{label} {category}: {handled:,} notices actioned (removed + restricted) "
                        f"but only {submitted.count:,} submitted"
                    ),
                )
            )
    for category in [ALL, *doc.removals.categories()]:
        if category == ALL:
            total, automated = doc.declared_total, doc.declared_total_automated
        else:
            total, automated = doc.removal(category), doc.removal(category, Detection.AUTOMATED)
        if total.reported and automated.reported and automated.count > total.count:  # type: ignore[operator]
            findings.append(
                Finding(
                    rule_id="internal.funnel.automated",
                    level=Level.INTERNAL,
                    severity=Severity.ERROR,
                    keys=(automated.key, total.key),
                    expected=total.count,
                    observed=automated.count,
                    message=f"{label} {category}: automated removals {automated.count:,} exceed total {total.count:,}",
                )
            )
    return findings


def automation_share(total: MetricValue, automated: MetricValue) -> tuple[AutomationMetric, Finding | None]:
    """AUTOMATION_SHARE = automated / total, exact.

    Undefined (``value is None``) when either cell is ABSENT or the total is
    zero; an automated count above the total is undefined and comes with an
    ERROR finding.
    """
    a, b = total.key, automated.key
    if (a.mechanism, a.period, a.category, a.action) != (b.mechanism, b.period, b.category, b.action) or (
        b.detection is not Detection.AUTOMATED
    ):
        raise KeyMismatchError(f"{b} is not the automated facet of {a}")
    scope = None if a.category == ALL else a.category
    undefined = AutomationMetric(AutomationMetricName.AUTOMATION_SHARE, None, scope)
    if not (total.reported and automated.reported) or total.count == 0:
        return undefined, None
    if automated.count > total.count:  # type: ignore[operator]
        return undefined, Finding(
            rule_id="internal.funnel.automated",
            level=Level.INTERNAL,
            severity=Severity.ERROR,
            keys=(b, a),
            expected=total.count,
            observed=automated.count,
            message=f"{a.period} {a.category}: automated removals {automated.count:,} exceed total {total.count:,}",
        )
    value = Fraction(automated.count, total.count)  # type: ignore[arg-type]
    return AutomationMetric(AutomationMetricName.AUTOMATION_SHARE, value, scope), None


# -- external ----------------------------------------------------------------------------


def _periods_match(a: str, b: str, periods: Mapping[str, ReportingPeriod] | None, slack: int) -> bool:
    if a == b:
        return True
    if not periods or a not in periods or b not in periods:
        return False
    pa, pb = periods[a], periods[b]
    if not (pa.has_dates and pb.has_dates):
        return False
    limit = timedelta(days=slack)
    return abs(pa.start - pb.start) <= limit and abs(pa.end - pb.end) <= limit  # type: ignore[operator]


def _comparable(a: MetricValue, b: MetricValue, relation: CrosswalkRelation, registry: Registry | None) -> str | None:
    """Reason the pair cannot be compared, or None."""
    if relation.kind is RelationKind.NONE:
        return f"no crosswalk from {a.key.quantity_id!r} to {b.key.mechanism.value}"
    if relation.source.id != a.key.quantity_id:
        return f"relation starts at {relation.source.id!r}, not {a.key.quantity_id!r}"
    if a.key.detection is not b.key.detection:
        return "detection facets differ"
    target = b.key.quantity_id
    family = None
    if registry is not None:
        try:
            family = registry.category(target, b.key.mechanism).family
        except VocabularyError:
            family = None
    if target not in relation.target_ids and family not in relation.target_ids:
        return f"{target!r} is not among the crosswalk targets {list(relation.target_ids)}"
    if not (a.reported and b.reported):
        return "one side is not reported"
    return None


def reconcile_external(
    a: MetricValue,
    b: MetricValue,
    relation: CrosswalkRelation,
    config: RuleConfig = RuleConfig(),
    periods: Mapping[str, ReportingPeriod] | None = None,
    registry: Registry | None = None,
) -> Finding:
    """Compare one quantity across two mechanisms; ``delta = a - b`` keeps its sign."""
    if not _periods_match(a.key.period, b.key.period, periods, config.period_date_slack_days):
        raise PeriodError(
            f"periods {a.key.period} and {b.key.period} differ by more than "
            f"{config.period_date_slack_days} day(s)"
        )
    if registry is None:
        registry = default_taxonomy().registry
    reason = _comparable(a, b, relation, registry)
    if reason is not None:
        return Finding(
            rule_id="external.incomparable",
            level=Level.EXTERNAL,
            severity=Severity.NOTICE,
            keys=(a.key, b.key),
            message=f"{a.key.period}: {a.key.mechanism.value} vs {b.key.mechanism.value} not comparable: {reason}",
        )
    assert a.count is not None and b.count is not None
    delta = a.count - b.count
    gap = Fraction(abs(delta), max(a.count, b.count, 1))
    severity = gap_severity(delta, a.count, b.count, config)
    return Finding(
        rule_id="external.reconcile",
        level=Level.EXTERNAL,
        severity=severity,
        keys=(a.key, b.key),
        expected=b.count,
        observed=a.count,
        delta=delta,
        message=(
            f"{a.key.period} {a.key.quantity_id}: {a.key.mechanism.value} {a.count:,} vs "
            f"{b.key.mechanism.value} {b.count:,} (difference {delta:+,}, {_pct(gap)}% relative gap, "
            f"crosswalk {relation.kind.value})"
        ),
        detail=(("relative_gap_pct", _pct(gap)), ("relation", relation.kind.value)),
    )


# -- historical --------------------------------------------------------------------------


def _check_order(series: Sequence[TransparencyReportDoc]) -> None:
    periods = [d.period for d in series]
    labels = [p.label for p in periods]
    if ordered_periods(periods) != periods or len(set(labels)) != len(labels):
        raise InputError("report series must be strictly ordered by period: " + ", ".join(d.label for d in series))


def _change_finding(
    rule_id: str, prev: MetricValue, cur: MetricValue, change: PercentChange, severity: Severity, what: str
) -> Finding:
    detail = [("change", change.status.value), ("previous_period", prev.key.period)]
    if change.defined:
        detail.append(("percent_change", f"{change.value:+.2f}"))
        message = (
            f"{what} {prev.key.period}->{cur.key.period}: {prev.count:,} -> {cur.count:,} ({change})"
            + (", unexplained fluctuation" if severity is Severity.NOTICE else "")
        )
    else:
        message = f"{what} {prev.key.period}->{cur.key.period}: change undefined ({change.status.value})"
    return Finding(
        rule_id=rule_id,
        level=Level.HISTORICAL,
        severity=severity,
        keys=(cur.key, prev.key),
        expected=prev.count if prev.reported else None,
        observed=cur.count if cur.reported else None,
        message=message,
        detail=tuple(detail),
    )


def check_historical(
    series: Sequence[TransparencyReportDoc],
    config: RuleConfig = RuleConfig(),
    taxonomy: Taxonomy | None = None,
    include_stable: bool = False,
) -> list[Finding]:
    """Percent changes across each consecutive pair of reports.

    Categories are flagged NOTICE when the absolute change reaches
    ``historical_notice_pct``; every non-zero change of the declared totals is
    reported (INFO below the threshold) since that series is the headline
    figure. Undefined changes become NOTICE findings naming the lifecycle event.
    With ``include_stable`` every defined change is reported, INFO below the
    threshold, giving the full pairwise table.
    """
    if len(series) < 2:
        raise InputError("historical checks need at least two reports")
    _check_order(series)
    taxonomy = taxonomy or default_taxonomy()
    events = {(e.category, e.period): e for e in detect_lifecycle(series, taxonomy.crosswalk)}
    threshold = config.historical_notice_pct
    findings: list[Finding] = []
    for prev, cur in zip(series, series[1:]):
        categories = sorted(set(prev.removals.categories()) | set(cur.removals.categories()))
        for category in categories:
            for detection in (Detection.ANY, Detection.AUTOMATED):
                before, after = prev.removal(category, detection), cur.removal(category, detection)
                if not before.reported and not after.reported:
                    continue
                change = percent_change(before, after)
                what = f"{category}" + (" (automated)" if detection is Detection.AUTOMATED else "")
                if change.defined:
                    notable = abs(change.exact) >= threshold  # type: ignore[arg-type]
                    if notable or include_stable:
                        severity = Severity.NOTICE if notable else Severity.INFO
                        findings.append(
                            _change_finding("historical.change.removals", before, after, change, severity, what)
                        )
                elif detection is Detection.ANY:
                    f = _change_finding("historical.lifecycle", before, after, change, Severity.NOTICE, what)
                    event = events.get((category, cur.label))
                    if event is not None:
                        extra = f"; lifecycle {event.kind.value}"
                        if event.counterpart:
                            extra += " (" + ", ".join(event.counterpart) + ")"
                        f = Finding(
                            **{**_fields(f), "message": f.message + extra,
                               "detail": f.detail + (("lifecycle", event.kind.value),)}
                        )
                    findings.append(f)
        for before, after, what in (
            (prev.declared_total, cur.declared_total, "total"),
            (prev.declared_total_automated, cur.declared_total_automated, "total (automated)"),
        ):
            if not before.reported and not after.reported:
                continue
            change = percent_change(before, after)
            if change.defined:
                if change.exact == 0 and not include_stable:
                    continue
                severity = Severity.NOTICE if abs(change.exact) >= threshold else Severity.INFO  # type: ignore[arg-type]
            else:
                severity = Severity.NOTICE
            findings.append(_change_finding("historical.change.total", before, after, change, severity, what))
        prev_staff, cur_staff = dict(prev.reviewer_counts), dict(cur.reviewer_counts)
        for name in sorted(set(prev_staff) & set(cur_staff)):
            k0 = MetricKey(TR, prev.label, ALL, Action.ANY)
            before = MetricValue(k0, prev_staff[name])
            after = MetricValue(MetricKey(TR, cur.label, ALL, Action.ANY), cur_staff[name])
            change = percent_change(before, after)
            if not change.defined:
                continue
            notable = abs(change.exact) >= threshold  # type: ignore[arg-type]
            if notable or include_stable:
                severity = Severity.NOTICE if notable else Severity.INFO
                f = _change_finding(
                    "historical.change.reviewers", before, after, change, severity, f"reviewers[{name}]"
                )
                findings.append(Finding(**{**_fields(f), "detail": f.detail + (("reviewer_group", name),)}))
    return findings


def _fields(f: Finding) -> dict:
    return {k: getattr(f, k) for k in Finding.__dataclass_fields__}


# -- cross-mechanism ---------------------------------------------------------------------


def evaluate_traceability(
    matrix: Iterable[SraRiskEntry], registry: Registry | None = None
) -> list[Finding]:
    """Grade each systemic risk by how far it maps onto SOR and report categories."""
    registry = registry or default_taxonomy().registry
    findings: list[Finding] = []
    for risk in matrix:
        resolved = {}
        for side, labels, mechanism, scope in (
            ("SOR", risk.sor_categories, SOR, "categories"),
            ("TR", risk.tr_categories, TR, "removals"),
        ):
            ids = []
            for label in labels:
                cid = registry.try_resolve(label, mechanism, scope=scope)
                if cid is None:
                    findings.append(
                        Finding(
                            rule_id="cross_mechanism.dangling_reference",
                            level=Level.CROSS_MECHANISM,
                            severity=Severity.WARN,
                            keys=(risk.risk_name,),
                            message=f"{risk.risk_name}: {side} category {label!r} is not in the {side} vocabulary",
                            detail=(("reference", label), ("side", side)),
                        )
                    )
                else:
                    ids.append(cid)
            resolved[side] = sorted(set(ids))
        sor_ids, tr_ids = resolved["SOR"], resolved["TR"]
        detail = (("sor_categories", ",".join(sor_ids)), ("tr_categories", ",".join(tr_ids)))
        if not sor_ids and not tr_ids:
            rule, severity, text = "cross_mechanism.untraceable", Severity.ERROR, "UNTRACEABLE: no SOR or report category"
        elif not sor_ids or not tr_ids:
            missing = "SOR" if not sor_ids else "report"
            rule, severity, text = (
                "cross_mechanism.partially_traceable",
                Severity.WARN,
                f"PARTIALLY_TRACEABLE: no {missing} category",
            )
        else:
            rule, severity, text = (
                "cross_mechanism.traceable",
                Severity.INFO,
                f"traceable to {len(sor_ids)} SOR and {len(tr_ids)} report categories",
            )
        findings.append(
            Finding(
                rule_id=rule,
                level=Level.CROSS_MECHANISM,
                severity=severity,
                keys=(risk.risk_name,),
                message=f"{risk.risk_name}: {text}",
                detail=detail,
            )
        )
    return findings


# -- orchestration -----------------------------------------------------------------------


@dataclass(frozen=True)
class AuditBundle:
    reports: tuple[TransparencyReportDoc, ...] = ()
    sor_tables: tuple[MetricTable, ...] = ()
    sra_matrix: tuple[SraRiskEntry, ...] | None = None

    @property
    def empty(self) -> bool:
        return not self.reports and not self.sor_tables and self.sra_matrix is None

    def provenance(self) -> list[str]:
        out = [d.source or d.label for d in self.reports]
        out += [str(t.provenance) for t in self.sor_tables]
        if self.sra_matrix is not None:
            out.append("sra-matrix")
        return sorted(out)


@dataclass(frozen=True)
class FindingSet:
    findings: tuple[Finding, ...]
    config: RuleConfig = field(default_factory=RuleConfig)
    run_metadata: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "findings", tuple(sorted(self.findings, key=Finding.sort_key)))

    def __len__(self) -> int:
        return len(self.findings)

    def __iter__(self):
        return iter(self.findings)

    def summary(self) -> dict[str, dict[str, int]]:
        counts = Counter((f.level, f.severity) for f in self.findings)
        return {lvl.value: {sev.value: counts[(lvl, sev)] for sev in Severity} for lvl in Level}

    def by_level(self, level: Level) -> list[Finding]:
        return [f for f in self.findings if f.level is level]


def _skipped(level: Level, reason: str) -> Finding:
    family = level.value.lower()
    return Finding(
        rule_id=f"{family}.skipped",
        level=level,
        severity=Severity.INFO,
        message=f"SKIPPED: {reason}",
    )


def run_all(
    bundle: AuditBundle,
    config: RuleConfig = RuleConfig(),
    taxonomy: Taxonomy | None = None,
    run_metadata: Mapping[str, str] | None = None,
) -> FindingSet:
    """Run every rule family the bundle supports; the rest are reported SKIPPED."""
    if bundle.empty:
        raise InputError("nothing to audit: the bundle is empty")
    taxonomy = taxonomy or default_taxonomy()
    by_label = {d.label: d for d in bundle.reports}
    labels = [d.label for d in bundle.reports]
    if len(set(labels)) != len(labels):
        raise InputError(f"duplicate report periods: {sorted(labels)}")
    reports = [by_label[p.label] for p in ordered_periods(d.period for d in bundle.reports)]
    findings: list[Finding] = []

    if reports:
        for doc in reports:
            try:
                findings += check_internal_sums(doc, config)
            except InputError as exc:
                findings.append(_skipped(Level.INTERNAL, f"residual check: {exc}"))
            if len(doc.notices):
                findings += check_notice_funnel(doc)
    else:
        findings.append(_skipped(Level.INTERNAL, "no transparency reports"))

    if reports and bundle.sor_tables:
        findings += _external(reports, bundle.sor_tables, config, taxonomy)
    else:
        missing = "SOR aggregate tables" if reports else "transparency reports"
        findings.append(_skipped(Level.EXTERNAL, f"no {missing}"))

    if len(reports) >= 2:
        findings += check_historical(reports, config, taxonomy)
    else:
        findings.append(_skipped(Level.HISTORICAL, "fewer than two transparency reports"))

    if bundle.sra_matrix is not None:
        findings += evaluate_traceability(bundle.sra_matrix, taxonomy.registry)
    else:
        findings.append(_skipped(Level.CROSS_MECHANISM, "no SRA traceability matrix"))

    metadata = {"inputs": ";".join(bundle.provenance())}
    metadata.update(run_metadata or {})
    return FindingSet(tuple(findings), config, tuple(sorted(metadata.items())))


def _external(
    reports: list[TransparencyReportDoc],
    tables: Sequence[MetricTable],
    config: RuleConfig,
    taxonomy: Taxonomy,
) -> list[Finding]:
    lookup: dict[MetricKey, MetricValue] = {}
    for table in tables:
        for v in table:
            if v.key in lookup:
                raise InputError(f"SOR key {v.key} appears in more than one table")
            lookup[v.key] = v
    periods = {d.label: d.period for d in reports}
    findings = []
    for doc in reports:
        mine = doc.terminations
        if not mine.reported:
            continue
        relation = taxonomy.crosswalk.lookup(mine.key.quantity_id, TR, SOR)
        theirs = lookup.get(MetricKey(SOR, doc.label, ALL, Action.ACCOUNT_TERMINATION))
        if theirs is None:
            findings.append(
                Finding(
                    rule_id="external.missing_counterpart",
                    level=Level.EXTERNAL,
                    severity=Severity.NOTICE,
                    keys=(mine.key,),
                    message=f"{doc.label}: no SOR aggregate for account terminations",
                )
            )
            continue
        findings.append(reconcile_external(mine, theirs, relation, config, periods, taxonomy.registry))
    return findings


# re-exported for callers that only need the lifecycle kinds alongside findings
__all__ = [
    "AuditBundle",
    "ChangeStatus",
    "FindingSet",
    "LifecycleKind",
    "PercentChange",
    "automation_share",
    "check_historical",
    "check_internal_sums",
    "check_notice_funnel",
    "evaluate_traceability",
    "percent_change",
    "reconcile_external",
    "run_all",
]
