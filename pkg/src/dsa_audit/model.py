"""Canonical domain types shared across the auditor.

Everything here is immutable and free of I/O. Counts are exact integers and
ratios are :class:`fractions.Fraction`; nothing is ever stored as a float.
"""

from __future__ import annotations

import re
from collections.abc import Collection, Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from datetime import date
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DuplicateError, InvalidValueError, VocabularyError

SCHEMA_VERSION = "1"
ALL = "ALL"

_SLUG_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")


class Mechanism(str, Enum):
    TRANSPARENCY_REPORT = "TRANSPARENCY_REPORT"
    SOR_DB = "SOR_DB"
    SRA = "SRA"
    AUDIT = "AUDIT"


class Action(str, Enum):
    REMOVAL = "REMOVAL"
    DEMOTION = "DEMOTION"
    ACCOUNT_TERMINATION = "ACCOUNT_TERMINATION"
    ACCOUNT_RESTRICTION = "ACCOUNT_RESTRICTION"
    NOTICE_SUBMITTED = "NOTICE_SUBMITTED"
    NOTICE_REMOVED = "NOTICE_REMOVED"
    NOTICE_RESTRICTED = "NOTICE_RESTRICTED"
    # only produced by SOR aggregation: decisions without an account action,
    # and tallies that were not grouped by account action at all
    NONE = "NONE"
    ANY = "ANY"


# Slugs used when an action, rather than a content category, is the quantity
# being crosswalked (e.g. TR "account-termination" vs SOR "account-restriction").
ACTION_SLUGS: Mapping[Action, str] = {
    Action.REMOVAL: "removal",
    Action.DEMOTION: "demotion",
    Action.ACCOUNT_TERMINATION: "account-termination",
    Action.ACCOUNT_RESTRICTION: "account-suspension",
    Action.NOTICE_SUBMITTED: "notice-submitted",
    Action.NOTICE_REMOVED: "notice-removed",
    Action.NOTICE_RESTRICTED: "notice-restricted",
    Action.NONE: "no-account-action",
    Action.ANY: "any-action",
}


class Detection(str, Enum):
    ANY = "ANY"
    AUTOMATED = "AUTOMATED"
    MANUAL = "MANUAL"


class Presence(str, Enum):
    REPORTED = "REPORTED"
    ABSENT = "ABSENT"


class AccountAction(str, Enum):
    SUSPENDED = "SUSPENDED"
    TERMINATED = "TERMINATED"
    NONE = "NONE"


class AutomationMetricName(str, Enum):
    OVERTURN_RATE = "OVERTURN_RATE"
    SPECIFIC_ACCURACY = "SPECIFIC_ACCURACY"
    ERROR_RATE = "ERROR_RATE"
    AUTOMATION_SHARE = "AUTOMATION_SHARE"


class Level(str, Enum):
    INTERNAL = "INTERNAL"
    EXTERNAL = "EXTERNAL"
    HISTORICAL = "HISTORICAL"
    CROSS_MECHANISM = "CROSS_MECHANISM"

    @property
    def rank(self) -> int:
        return _LEVEL_ORDER.index(self)


class Severity(str, Enum):
    INFO = "INFO"
    NOTICE = "NOTICE"
    WARN = "WARN"
    ERROR = "ERROR"

    @property
    def rank(self) -> int:
        return _SEVERITY_ORDER.index(self)

    def __ge__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank >= other.rank

    def __gt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank > other.rank

    def __le__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank <= other.rank

    def __lt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, Severity):
            return NotImplemented
        return self.rank < other.rank


_LEVEL_ORDER = list(Level)
_SEVERITY_ORDER = list(Severity)


def is_slug(value: str) -> bool:
    return bool(_SLUG_RE.match(value))


def natural_key(label: str) -> tuple:
    """Sort key that orders ``R2`` before ``R10``."""
    parts = re.split(r"(\d+)", label)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


@dataclass(frozen=True)
class ReportingPeriod:
    label: str
    start: date | None = None
    end: date | None = None

    def __post_init__(self) -> None:
        if not self.label:
            raise InvalidValueError("period label must be non-empty", field="label")
        if self.start is not None and self.end is not None and not self.start < self.end:
            raise InvalidValueError(
                f"period {self.label}: start {self.start} is not before end {self.end}",
                field="start",
            )

    @property
    def has_dates(self) -> bool:
        return self.start is not None and self.end is not None

    def contains(self, day: date) -> bool:
        return self.has_dates and self.start <= day <= self.end  # type: ignore[operator]


def period_sort_key(period: ReportingPeriod) -> tuple:
    return (period.start or date.min, natural_key(period.label))


def ordered_periods(periods: Iterable[ReportingPeriod]) -> list[ReportingPeriod]:
    """Chronological order: by start date when every period is dated, else by label."""
    items = list(periods)
    if all(p.has_dates for p in items):
        return sorted(items, key=period_sort_key)
    return sorted(items, key=lambda p: natural_key(p.label))


@dataclass(frozen=True)
class CanonicalCategory:
    id: str
    display_name: str
    mechanism_vocabulary: Mechanism
    first_period: str | None = None
    last_period: str | None = None
    aliases: tuple[str, ...] = ()
    family: str | None = None

    def __post_init__(self) -> None:
        if not is_slug(self.id):
            raise InvalidValueError(f"category id {self.id!r} is not a slug", field="id")


@dataclass(frozen=True, order=False)
class MetricKey:
    mechanism: Mechanism
    period: str
    category: str
    action: Action
    detection: Detection = Detection.ANY

    def sort_key(self) -> tuple:
        return (
            self.mechanism.value,
            natural_key(self.period),
            self.category != ALL,
            self.category,
            self.action.value,
            self.detection.value,
        )

    @property
    def quantity_id(self) -> str:
        """Id a crosswalk relation refers to: the category, or the action for ALL."""
        return ACTION_SLUGS[self.action] if self.category == ALL else self.category

    def with_detection(self, detection: Detection) -> MetricKey:
        return replace(self, detection=detection)


def make_metric_key(
    mechanism: Mechanism | str,
    period: str,
    category: str,
    action: Action | str,
    detection: Detection | str = Detection.ANY,
    *,
    vocabulary: Collection[str] | None = None,
) -> MetricKey:
    """Build a normalized key, rejecting categories unknown to ``mechanism``.

    ``vocabulary`` is the set of valid category ids; when omitted the shipped
    registry supplies the ids for ``mechanism``.
    """
    mechanism = Mechanism(mechanism)
    action = Action(action)
    detection = Detection(detection)
    period = period.strip()
    if not period:
        raise InvalidValueError("period label must be non-empty", field="period")
    category = category.strip()
    if category.upper() == ALL:
        category = ALL
    else:
        if vocabulary is None:
            from .taxonomy import default_registry

            vocabulary = default_registry().ids(mechanism)
        if category not in vocabulary:
            raise VocabularyError(
                f"unknown {mechanism.value} category {category!r}", field="category"
            )
    return MetricKey(mechanism, period, category, action, detection)


@dataclass(frozen=True)
class MetricValue:
    key: MetricKey
    count: int | None
    presence: Presence = Presence.REPORTED

    def __post_init__(self) -> None:
        if self.presence is Presence.ABSENT:
            if self.count is not None:
                raise InvalidValueError("ABSENT value must not carry a count", field="count")
        else:
            if type(self.count) is not int:
                raise InvalidValueError(
                    f"count must be an exact integer, got {self.count!r}", field="count"
                )
            if self.count < 0:
                raise InvalidValueError(f"negative count {self.count}", field="count")

    @classmethod
    def absent(cls, key: MetricKey) -> MetricValue:
        return cls(key, None, Presence.ABSENT)

    @property
    def reported(self) -> bool:
        return self.presence is Presence.REPORTED


@dataclass(frozen=True)
class Provenance:
    source: str
    table_id: str = ""

    def __str__(self) -> str:
        return f"{self.source}#{self.table_id}" if self.table_id else self.source


@dataclass(frozen=True)
class MetricTable:
    """A set of metric values with unique keys, held in canonical key order."""

    entries: tuple[MetricValue, ...] = ()
    provenance: Provenance = Provenance("")
    _index: Mapping[MetricKey, MetricValue] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        index: dict[MetricKey, MetricValue] = {}
        for value in self.entries:
            if value.key in index:
                raise DuplicateError(f"duplicate metric key {value.key}")
            index[value.key] = value
        ordered = tuple(sorted(self.entries, key=lambda v: v.key.sort_key()))
        object.__setattr__(self, "entries", ordered)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[MetricValue]:
        return iter(self.entries)

    def __contains__(self, key: object) -> bool:
        return key in self._index

    def get(self, key: MetricKey) -> MetricValue | None:
        return self._index.get(key)

    def with_value(self, value: MetricValue) -> MetricTable:
        if value.key in self._index:
            raise DuplicateError(f"duplicate metric key {value.key}")
        return MetricTable(self.entries + (value,), self.provenance)

    def categories(self) -> list[str]:
        return sorted({v.key.category for v in self.entries if v.key.category != ALL})

    def select(self, **facets: object) -> list[MetricValue]:
        return [
            v for v in self.entries if all(getattr(v.key, k) == f for k, f in facets.items())
        ]


@dataclass(frozen=True)
class AutomationMetric:
    name: AutomationMetricName
    value: Fraction | None
    scope: str | None = None

    def __post_init__(self) -> None:
        if self.value is not None:
            if not isinstance(self.value, Fraction):
                raise InvalidValueError("automation metric must be an exact rational", field="value")
            if not 0 <= self.value <= 1:
                raise InvalidValueError(f"{self.name.value} outside [0, 1]", field="value")

    @property
    def defined(self) -> bool:
        return self.value is not None

    def rendered(self, places: int = 4) -> str | None:
        if self.value is None:
            return None
        return format_fraction(self.value, places)


def check_automation_metrics(metrics: Iterable[AutomationMetric]) -> None:
    """ERROR_RATE and SPECIFIC_ACCURACY for one scope must sum to exactly 1."""
    by_scope: dict[tuple[str | None, AutomationMetricName], Fraction | None] = {}
    for m in metrics:
        slot = (m.scope, m.name)
        if slot in by_scope:
            raise DuplicateError(f"duplicate automation metric {m.name.value} for scope {m.scope}")
        by_scope[slot] = m.value
    for (scope, name), value in by_scope.items():
        if name is not AutomationMetricName.ERROR_RATE or value is None:
            continue
        accuracy = by_scope.get((scope, AutomationMetricName.SPECIFIC_ACCURACY))
        if accuracy is not None and accuracy + value != 1:
            raise InvalidValueError(
                f"ERROR_RATE + SPECIFIC_ACCURACY != 1 for scope {scope}", field="automation_metrics"
            )


@dataclass(frozen=True)
class TransparencyReportDoc:
    period: ReportingPeriod
    removals: MetricTable
    declared_total: MetricValue
    declared_total_automated: MetricValue
    notices: MetricTable
    terminations: MetricValue
    reviewer_counts: tuple[tuple[str, int], ...] = ()
    automation_metrics: tuple[AutomationMetric, ...] = ()
    source: str = ""
    terminations_table_id: str = ""

    def __post_init__(self) -> None:
        label = self.period.label
        values = [
            *self.removals,
            *self.notices,
            self.declared_total,
            self.declared_total_automated,
            self.terminations,
        ]
        for v in values:
            if v.key.period != label:
                raise InvalidValueError(
                    f"metric {v.key} does not belong to period {label}", field="period"
                )
        object.__setattr__(self, "reviewer_counts", tuple(sorted(self.reviewer_counts)))
        for name, n in self.reviewer_counts:
            if type(n) is not int or n < 0:
                raise InvalidValueError(f"reviewer count {name} must be a non-negative integer")
        check_automation_metrics(self.automation_metrics)

    @property
    def label(self) -> str:
        return self.period.label

    def removal(self, category: str, detection: Detection = Detection.ANY) -> MetricValue:
        key = MetricKey(Mechanism.TRANSPARENCY_REPORT, self.label, category, Action.REMOVAL, detection)
        return self.removals.get(key) or MetricValue.absent(key)

    def reported_categories(self) -> list[str]:
        return sorted(
            v.key.category
            for v in self.removals
            if v.reported and v.key.detection is Detection.ANY and v.key.category != ALL
        )


class SorRecord(NamedTuple):
    """One moderation decision from a SOR dump."""

    decision_id: str
    platform: str
    category: str
    account_action: AccountAction | None
    visibility_action: str | None
    automated_detection: bool
    automated_decision: bool
    application_date: date
    territorial_scope: tuple[str, ...] | None = None
    content_date: date | None = None


@dataclass(frozen=True)
class SraRiskEntry:
    risk_name: str
    mitigations: tuple[str, ...] = ()
    sor_categories: tuple[str, ...] = ()
    tr_categories: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.risk_name.strip():
            raise InvalidValueError("risk_name must be non-empty", field="risk_name")


Number = Union[int, Decimal]


@dataclass(frozen=True)
class Finding:
    rule_id: str
    level: Level
    severity: Severity
    keys: tuple[MetricKey | str, ...] = ()
    expected: Number | None = None
    observed: Number | None = None
    delta: Number | None = None
    message: str = ""
    detail: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        for name in ("expected", "observed", "delta"):
            v = getattr(self, name)
            if v is not None and not isinstance(v, (int, Decimal)) or isinstance(v, bool):
                raise InvalidValueError(f"{name} must be an exact number", field=name)
        if self.expected is not None and self.observed is not None:
            delta = self.observed - self.expected
            if self.delta is None:
                object.__setattr__(self, "delta", delta)
            elif self.delta != delta:
                raise InvalidValueError("delta must equal observed - expected", field="delta")
        object.__setattr__(self, "detail", tuple(sorted(self.detail)))

    @property
    def period(self) -> str:
        for k in self.keys:
            if isinstance(k, MetricKey):
                return k.period
        return ""

    @property
    def category(self) -> str:
        for k in self.keys:
            return k.category if isinstance(k, MetricKey) else k
        return ""

    def sort_key(self) -> tuple:
        return (
            self.level.rank,
            self.rule_id,
            natural_key(self.period),
            self.category,
            tuple(k.sort_key() if isinstance(k, MetricKey) else (k,) for k in self.keys),
            -self.severity.rank,
            self.message,
            self.detail,
        )


@dataclass(frozen=True)
class RuleConfig:
    residual_warn_share: Fraction = Fraction(1, 100)
    residual_error_share: Fraction = Fraction(1, 10)
    external_warn_rel: Fraction = Fraction(5, 100)
    external_error_rel: Fraction = Fraction(25, 100)
    historical_notice_pct: Fraction = Fraction(50)
    period_date_slack_days: int = 0

    def __post_init__(self) -> None:
        for name in (
            "residual_warn_share",
            "residual_error_share",
            "external_warn_rel",
            "external_error_rel",
            "historical_notice_pct",
        ):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                try:
                    value = Fraction(str(value))
                except (ValueError, ZeroDivisionError) as exc:
                    raise InvalidValueError(f"{name}: {exc}", field=name) from None
                object.__setattr__(self, name, value)
            if value < 0:
                raise InvalidValueError(f"{name} must be non-negative", field=name)
        if type(self.period_date_slack_days) is not int or self.period_date_slack_days < 0:
            raise InvalidValueError(
                "period_date_slack_days must be a non-negative integer",
                field="period_date_slack_days",
            )
        if self.residual_warn_share > self.residual_error_share:
            raise InvalidValueError("residual_warn_share exceeds residual_error_share")
        if self.external_warn_rel > self.external_error_rel:
            raise InvalidValueError("external_warn_rel exceeds external_error_rel")


def format_fraction(value: Fraction, places: int) -> str:
    """Round half-even to ``places`` decimals and render with a fixed width."""
    return f"{round_fraction(value, places):.{places}f}"


def round_fraction(value: Fraction, places: int) -> Decimal:
    # round() on a Fraction rounds half to even; the shift keeps it exact at any magnitude
    scaled = round(value * 10**places)
    return Decimal(f"{scaled}E-{places}")
