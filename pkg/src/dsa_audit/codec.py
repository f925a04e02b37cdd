"""Interchange form: JSON-shaped dicts, ``schema_version`` "1".

Field names follow the domain types. Exact numbers survive the trip:
counts are JSON integers, rationals are ``"num/den"`` strings and rounded
decimals are strings such as ``"-51.45"``.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable, Mapping
from datetime import date
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any

from .errors import AuditError, DuplicateError, InvalidValueError, SchemaError
from .model import (
    ALL,
    SCHEMA_VERSION,
    AccountAction,
    Action,
    AutomationMetric,
    AutomationMetricName,
    CanonicalCategory,
    Detection,
    Finding,
    Level,
    Mechanism,
    MetricKey,
    MetricTable,
    MetricValue,
    Presence,
    Provenance,
    ReportingPeriod,
    RuleConfig,
    Severity,
    SorRecord,
    SraRiskEntry,
    TransparencyReportDoc,
)

TR = Mechanism.TRANSPARENCY_REPORT
NOTICE_COLUMNS = {
    "submitted": Action.NOTICE_SUBMITTED,
    "removed": Action.NOTICE_REMOVED,
    "restricted": Action.NOTICE_RESTRICTED,
}
REMOVAL_COLUMNS = {"total": Detection.ANY, "automated": Detection.AUTOMATED}


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- scalars ---------------------------------------------------------------------


def fraction_to_data(value: Fraction | None) -> str | None:
    # integers stay bare ("50"); everything else is "p/q"
    return None if value is None else str(value)


def fraction_from_data(value: Any, field: str = "value") -> Fraction | None:
    if value is None:
        return None
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidValueError(f"{field}: rationals must be given as integers or 'p/q' strings", field=field)
    try:
        return Fraction(value) if isinstance(value, int) else Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InvalidValueError(f"{field}: not a rational: {value!r}", field=field) from None


def number_to_data(value: int | Decimal | None) -> int | str | None:
    if value is None or isinstance(value, int):
        return value
    return str(value)


def number_from_data(value: Any, field: str) -> int | Decimal | None:
    if value is None:
        return None
    if isinstance(value, bool):
        raise InvalidValueError(f"{field}: expected a number", field=field)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return Decimal(value)
        except InvalidOperation:
            pass
    raise InvalidValueError(f"{field}: expected an integer or decimal string, got {value!r}", field=field)


def date_from_data(value: Any, field: str) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError):
        raise InvalidValueError(f"{field}: not an ISO date: {value!r}", field=field) from None


def count_from_data(value: Any, field: str) -> int | None:
    """``None`` means ABSENT; anything else must be a non-negative integer."""
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidValueError(f"{field}: count must be an integer, got {value!r}", field=field)
    if value < 0:
        raise InvalidValueError(f"{field}: negative count {value}", field=field)
    return value


# -- small types -------------------------------------------------------------------


def period_to_data(p: ReportingPeriod) -> dict:
    return {
        "label": p.label,
        "start": p.start.isoformat() if p.start else None,
        "end": p.end.isoformat() if p.end else None,
    }


def period_from_data(d: Mapping) -> ReportingPeriod:
    return ReportingPeriod(
        str(d["label"]),
        date_from_data(d.get("start"), "period.start"),
        date_from_data(d.get("end"), "period.end"),
    )


def category_to_data(c: CanonicalCategory) -> dict:
    return {
        "id": c.id,
        "display_name": c.display_name,
        "mechanism_vocabulary": c.mechanism_vocabulary.value,
        "first_period": c.first_period,
        "last_period": c.last_period,
        "aliases": list(c.aliases),
        "family": c.family,
    }


def category_from_data(d: Mapping) -> CanonicalCategory:
    return CanonicalCategory(
        id=d["id"],
        display_name=d["display_name"],
        mechanism_vocabulary=Mechanism(d["mechanism_vocabulary"]),
        first_period=d.get("first_period"),
        last_period=d.get("last_period"),
        aliases=tuple(d.get("aliases", ())),
        family=d.get("family"),
    )


def key_to_data(k: MetricKey) -> dict:
    return {
        "mechanism": k.mechanism.value,
        "period": k.period,
        "category": k.category,
        "action": k.action.value,
        "detection": k.detection.value,
    }


def key_from_data(d: Mapping) -> MetricKey:
    return MetricKey(
        Mechanism(d["mechanism"]),
        str(d["period"]),
        str(d["category"]),
        Action(d["action"]),
        Detection(d.get("detection", "ANY")),
    )


def value_to_data(v: MetricValue) -> dict:
    return {"key": key_to_data(v.key), "count": v.count, "presence": v.presence.value}


def value_from_data(d: Mapping) -> MetricValue:
    presence = Presence(d.get("presence", "REPORTED" if d.get("count") is not None else "ABSENT"))
    return MetricValue(key_from_data(d["key"]), count_from_data(d.get("count"), "count"), presence)


def provenance_to_data(p: Provenance) -> dict:
    return {"source": p.source, "table_id": p.table_id}


def provenance_from_data(d: Mapping | None) -> Provenance:
    d = d or {}
    return Provenance(str(d.get("source", "")), str(d.get("table_id", "")))


def table_to_data(t: MetricTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "metric_table",
        "provenance": provenance_to_data(t.provenance),
        "entries": [value_to_data(v) for v in t.entries],
    }


def table_from_data(d: Mapping) -> MetricTable:
    require_version(d, "metric_table")
    return MetricTable(
        tuple(value_from_data(e) for e in d.get("entries", ())),
        provenance_from_data(d.get("provenance")),
    )


def automation_to_data(m: AutomationMetric) -> dict:
    return {"name": m.name.value, "value": fraction_to_data(m.value), "scope": m.scope}


def automation_from_data(d: Mapping) -> AutomationMetric:
    return AutomationMetric(
        AutomationMetricName(d["name"]),
        fraction_from_data(d.get("value"), "automation_metrics.value"),
        d.get("scope"),
    )


def sor_record_to_data(r: SorRecord) -> dict:
    return {
        "decision_id": r.decision_id,
        "platform": r.platform,
        "category": r.category,
        "account_action": r.account_action.value if r.account_action else None,
        "visibility_action": r.visibility_action,
        "automated_detection": r.automated_detection,
        "automated_decision": r.automated_decision,
        "application_date": r.application_date.isoformat(),
        "territorial_scope": list(r.territorial_scope) if r.territorial_scope is not None else None,
        "content_date": r.content_date.isoformat() if r.content_date else None,
    }


def sor_record_from_data(d: Mapping) -> SorRecord:
    scope = d.get("territorial_scope")
    return SorRecord(
        decision_id=d["decision_id"],
        platform=d["platform"],
        category=d["category"],
        account_action=AccountAction(d["account_action"]) if d.get("account_action") else None,
        visibility_action=d.get("visibility_action"),
        automated_detection=bool(d["automated_detection"]),
        automated_decision=bool(d["automated_decision"]),
        application_date=date_from_data(d["application_date"], "application_date"),
        territorial_scope=tuple(scope) if scope is not None else None,
        content_date=date_from_data(d.get("content_date"), "content_date"),
    )


def risk_to_data(r: SraRiskEntry) -> dict:
    return {
        "risk_name": r.risk_name,
        "mitigations": list(r.mitigations),
        "sor_categories": list(r.sor_categories),
        "tr_categories": list(r.tr_categories),
    }


def risk_from_data(d: Mapping) -> SraRiskEntry:
    return SraRiskEntry(
        str(d["risk_name"]),
        tuple(d.get("mitigations", ())),
        tuple(d.get("sor_categories", ())),
        tuple(d.get("tr_categories", ())),
    )


def matrix_to_data(risks: Iterable[SraRiskEntry], source: str = "") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "sra_matrix",
        "source": source,
        "risks": [risk_to_data(r) for r in risks],
    }


def matrix_from_data(d: Mapping) -> list[SraRiskEntry]:
    require_version(d, "sra_matrix")
    seen: set[str] = set()
    out = []
    for raw in d.get("risks", ()):
        entry = risk_from_data(raw)
        if entry.risk_name in seen:
            raise DuplicateError(f"duplicate risk {entry.risk_name!r}", field="risk_name")
        seen.add(entry.risk_name)
        out.append(entry)
    return out


def finding_to_data(f: Finding) -> dict:
    return {
        "rule_id": f.rule_id,
        "level": f.level.value,
        "severity": f.severity.value,
        "keys": [key_to_data(k) if isinstance(k, MetricKey) else k for k in f.keys],
        "expected": number_to_data(f.expected),
        "observed": number_to_data(f.observed),
        "delta": number_to_data(f.delta),
        "message": f.message,
        "detail": dict(f.detail),
    }


def finding_from_data(d: Mapping) -> Finding:
    return Finding(
        rule_id=d["rule_id"],
        level=Level(d["level"]),
        severity=Severity(d["severity"]),
        keys=tuple(key_from_data(k) if isinstance(k, Mapping) else str(k) for k in d.get("keys", ())),
        expected=number_from_data(d.get("expected"), "expected"),
        observed=number_from_data(d.get("observed"), "observed"),
        delta=number_from_data(d.get("delta"), "delta"),
        message=d.get("message", ""),
        detail=tuple((str(k), str(v)) for k, v in d.get("detail", {}).items()),
    )


CONFIG_FIELDS = (
    "residual_warn_share",
    "residual_error_share",
    "external_warn_rel",
    "external_error_rel",
    "historical_notice_pct",
)


def config_to_data(c: RuleConfig) -> dict:
    data: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "kind": "rule_config"}
    for name in CONFIG_FIELDS:
        data[name] = fraction_to_data(getattr(c, name))
    data["period_date_slack_days"] = c.period_date_slack_days
    return data


def config_from_data(d: Mapping) -> RuleConfig:
    kwargs: dict[str, Any] = {}
    for name in CONFIG_FIELDS:
        if name in d:
            kwargs[name] = fraction_from_data(d[name], name)
    if "period_date_slack_days" in d:
        kwargs["period_date_slack_days"] = d["period_date_slack_days"]
    unknown = set(d) - set(CONFIG_FIELDS) - {"period_date_slack_days", "schema_version", "kind"}
    if unknown:
        raise SchemaError(f"unknown config keys: {sorted(unknown)}", field=sorted(unknown)[0])
    return RuleConfig(**kwargs)


# -- transparency report documents -------------------------------------------------------


def require_version(d: Any, kind: str) -> None:
    if not isinstance(d, Mapping):
        raise SchemaError(f"{kind}: expected a JSON object")
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{kind}: unsupported schema_version {version!r}", field="schema_version")
    if "kind" in d and d["kind"] != kind:
        raise SchemaError(f"expected a {kind} document, got {d['kind']!r}", field="kind")


def report_to_data(doc: TransparencyReportDoc) -> dict:
    """Encode with canonical category ids as row labels."""

    def rows(table: MetricTable, columns: Mapping[str, Any], facet: str, label: str) -> list[dict]:
        by_cat: dict[str, dict] = {}
        for v in table:
            if v.key.category == ALL:
                continue
            col = next(c for c, f in columns.items() if getattr(v.key, facet) == f)
            by_cat.setdefault(v.key.category, {})[col] = v.count
        return [{label: c, **by_cat[c]} for c in sorted(by_cat)]

    notice_totals = {
        col: v.count
        for v in doc.notices
        if v.key.category == ALL
        for col, action in NOTICE_COLUMNS.items()
        if v.key.action is action
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "transparency_report",
        "source": doc.source,
        "period": period_to_data(doc.period),
        "removals": {
            "table_id": doc.removals.provenance.table_id,
            "rows": rows(doc.removals, REMOVAL_COLUMNS, "detection", "category"),
        },
        "declared_total": doc.declared_total.count,
        "declared_total_automated": doc.declared_total_automated.count,
        "notices": {
            "table_id": doc.notices.provenance.table_id,
            "rows": rows(doc.notices, NOTICE_COLUMNS, "action", "type"),
            "totals": notice_totals,
        },
        "terminations": {
            "table_id": doc.terminations_table_id,
            "count": doc.terminations.count,
        },
        "reviewer_counts": dict(doc.reviewer_counts),
        "automation_metrics": [automation_to_data(m) for m in doc.automation_metrics],
    }


def report_from_data(d: Mapping, registry=None) -> TransparencyReportDoc:
    """Build a report document, resolving row labels through ``registry``."""
    from .taxonomy import default_registry

    registry = registry or default_registry()
    require_version(d, "transparency_report")
    for required in ("period", "removals", "declared_total"):
        if required not in d:
            raise SchemaError(f"missing required field {required!r}", field=required)
    period = period_from_data(d["period"])
    label = period.label
    source = str(d.get("source", ""))

    def key(category: str, action: Action, detection: Detection = Detection.ANY) -> MetricKey:
        return MetricKey(TR, label, category, action, detection)

    def val(k: MetricKey, raw: Any, field: str) -> MetricValue:
        count = count_from_data(raw, field)
        return MetricValue.absent(k) if count is None else MetricValue(k, count)

    def category_rows(section: Mapping, label_field: str, scope: str, columns, build) -> list[MetricValue]:
        values: list[MetricValue] = []
        seen: dict[str, str] = {}
        for i, row in enumerate(section.get("rows", ())):
            raw_label = row.get(label_field, row.get("category"))
            if not isinstance(raw_label, str):
                raise SchemaError(f"row {i} has no {label_field!r}", field=label_field)
            cid = registry.resolve(raw_label, TR, label, scope)
            if cid in seen:
                raise DuplicateError(
                    f"duplicate row for category {cid!r} ({seen[cid]!r} and {raw_label!r})",
                    field=label_field,
                )
            seen[cid] = raw_label
            for col, facet in columns.items():
                if col in row:
                    values.append(val(build(cid, facet), row[col], f"{scope}.{cid}.{col}"))
        return values

    removals = d["removals"] or {}
    removal_values = category_rows(
        removals, "category", "removals", REMOVAL_COLUMNS, lambda c, f: key(c, Action.REMOVAL, f)
    )
    notices = d.get("notices") or {}
    notice_values = category_rows(notices, "type", "notices", NOTICE_COLUMNS, lambda c, a: key(c, a))
    for col, action in NOTICE_COLUMNS.items():
        totals = notices.get("totals") or {}
        if col in totals:
            notice_values.append(val(key(ALL, action), totals[col], f"notices.totals.{col}"))
    terminations = d.get("terminations") or {}
    try:
        doc = TransparencyReportDoc(
            period=period,
            removals=MetricTable(tuple(removal_values), Provenance(source, removals.get("table_id", ""))),
            declared_total=val(key(ALL, Action.REMOVAL), d["declared_total"], "declared_total"),
            declared_total_automated=val(
                key(ALL, Action.REMOVAL, Detection.AUTOMATED),
                d.get("declared_total_automated"),
                "declared_total_automated",
            ),
            notices=MetricTable(tuple(notice_values), Provenance(source, notices.get("table_id", ""))),
            terminations=val(
                key(ALL, Action.ACCOUNT_TERMINATION), terminations.get("count"), "terminations.count"
            ),
            reviewer_counts=tuple((str(k), v) for k, v in (d.get("reviewer_counts") or {}).items()),
            automation_metrics=tuple(automation_from_data(m) for m in d.get("automation_metrics") or ()),
            source=source,
            terminations_table_id=str(terminations.get("table_id", "")),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed report document: {exc!r}") from None
    return doc


# -- generic dispatch --------------------------------------------------------------------

_ENCODERS: dict[type, Callable[[Any], Any]] = {
    ReportingPeriod: period_to_data,
    CanonicalCategory: category_to_data,
    MetricKey: key_to_data,
    MetricValue: value_to_data,
    MetricTable: table_to_data,
    AutomationMetric: automation_to_data,
    SorRecord: sor_record_to_data,
    SraRiskEntry: risk_to_data,
    Finding: finding_to_data,
    RuleConfig: config_to_data,
}
_DECODERS: dict[type, Callable[[Any], Any]] = {
    ReportingPeriod: period_from_data,
    CanonicalCategory: category_from_data,
    MetricKey: key_from_data,
    MetricValue: value_from_data,
    MetricTable: table_from_data,
    AutomationMetric: automation_from_data,
    SorRecord: sor_record_from_data,
    SraRiskEntry: risk_from_data,
    Finding: finding_from_data,
    RuleConfig: config_from_data,
}


def to_data(obj: Any) -> Any:
    if isinstance(obj, TransparencyReportDoc):
        return report_to_data(obj)
    try:
        return _ENCODERS[type(obj)](obj)
    except KeyError:
        raise TypeError(f"no interchange encoding for {type(obj).__name__}") from None


def from_data(cls: type, data: Any) -> Any:
    if cls is TransparencyReportDoc:
        return report_from_data(data)
    try:
        decoder = _DECODERS[cls]
    except KeyError:
        raise TypeError(f"no interchange decoding for {cls.__name__}") from None
    try:
        return decoder(data)
    except AuditError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {cls.__name__}: {exc!r}") from None
