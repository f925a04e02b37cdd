"""Reading artifacts: report documents, SOR dumps, SRA matrices, period bounds.

SOR dumps are streamed row by row; the reader holds one decode buffer of
``buffer_size`` bytes plus the current row, whatever the file size.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import IO, Any, Union

import jsonschema

from .codec import (
    matrix_from_data,
    period_from_data,
    report_from_data,
    table_from_data,
)
from .errors import (
    AuditError,
    InputError,
    InvalidValueError,
    RowError,
    SchemaError,
)
from .model import (
    ALL,
    SCHEMA_VERSION,
    AccountAction,
    Action,
    Detection,
    Mechanism,
    MetricKey,
    MetricTable,
    MetricValue,
    Provenance,
    ReportingPeriod,
    SorRecord,
    SraRiskEntry,
    TransparencyReportDoc,
    period_sort_key,
)
from .taxonomy import Registry, default_registry, normalize_label

log = logging.getLogger(__name__)

Source = Union[bytes, IO[bytes], str, "os.PathLike[str]"]

DEFAULT_BUFFER_SIZE = 64 * 1024
MAX_RECORDED_ERRORS = 100


class ParseMode(str, Enum):
    STRICT = "STRICT"
    LENIENT = "LENIENT"


# -- interchange documents -------------------------------------------------------------


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        try:
            return Path(source).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc.strerror}") from None
    return source.read()


def load_json(source: Source) -> Any:
    raw = _read_bytes(source)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"not UTF-8: invalid byte at offset {exc.start}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


@lru_cache(maxsize=None)
def _schema(kind: str) -> dict:
    path = resources.files("dsa_audit") / "schemas" / f"{kind}.schema.json"
    return json.loads(path.read_text(encoding="utf-8"))


SCHEMA_KINDS = (
    "transparency_report",
    "metric_table",
    "sra_matrix",
    "vocabulary",
    "crosswalk",
    "period_bounds",
    "rule_config",
    "findings",
)


@dataclass(frozen=True)
class Diagnostic:
    field: str
    message: str
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.field or '<document>'}: {self.message}"


def schema_diagnostics(data: Any, kind: str | None = None) -> list[Diagnostic]:
    """Structural problems of an interchange document, in document order."""
    if not isinstance(data, dict):
        return [Diagnostic("", "expected a JSON object")]
    kind = kind or data.get("kind")
    if kind not in SCHEMA_KINDS:
        return [Diagnostic("kind", f"unknown document kind {kind!r}; expected one of {list(SCHEMA_KINDS)}")]
    if data.get("schema_version") != SCHEMA_VERSION:
        return [Diagnostic("schema_version", f"unsupported schema_version {data.get('schema_version')!r}")]
    validator = jsonschema.Draft202012Validator(_schema(kind))
    out = []
    for err in sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path]):
        path = ".".join(str(p) for p in err.absolute_path)
        if err.validator == "required":
            # name the missing property itself, not its parent object
            missing = err.message.split("'")[1] if "'" in err.message else ""
            path = ".".join(p for p in (path, missing) if p)
        out.append(Diagnostic(path, err.message))
    return out


def validate_document(data: Any, kind: str) -> None:
    problems = schema_diagnostics(data, kind)
    if problems:
        first = problems[0]
        raise SchemaError(str(first), field=first.field)


def parse_report_document(
    source: Source,
    schema_version: str = SCHEMA_VERSION,
    registry: Registry | None = None,
) -> TransparencyReportDoc:
    if schema_version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {schema_version!r}", field="schema_version")
    data = load_json(source)
    if isinstance(data, dict) and data.get("schema_version") != schema_version:
        raise SchemaError(
            f"document declares schema_version {data.get('schema_version')!r}, expected {schema_version!r}",
            field="schema_version",
        )
    validate_document(data, "transparency_report")
    return report_from_data(data, registry)


def load_metric_table(source: Source) -> MetricTable:
    data = load_json(source)
    validate_document(data, "metric_table")
    return table_from_data(data)


def load_sra_matrix(source: Source) -> list[SraRiskEntry]:
    data = load_json(source)
    validate_document(data, "sra_matrix")
    return matrix_from_data(data)


def load_period_bounds(source: Source) -> list[ReportingPeriod]:
    data = load_json(source)
    validate_document(data, "period_bounds")
    periods = [period_from_data(p) for p in data["periods"]]
    check_period_bounds(periods)
    return periods


def check_period_bounds(periods: Iterable[ReportingPeriod]) -> None:
    periods = list(periods)
    labels = [p.label for p in periods]
    if len(set(labels)) != len(labels):
        raise InputError("period labels must be unique")
    dated = sorted((p for p in periods if p.has_dates), key=period_sort_key)
    for a, b in zip(dated, dated[1:]):
        if b.start <= a.end:  # type: ignore[operator]
            raise InputError(f"periods {a.label} and {b.label} overlap")


# -- SOR dump streaming ------------------------------------------------------------------

# canonical field -> accepted header names (the public dump uses the second spelling)
COLUMN_ALIASES: Mapping[str, tuple[str, ...]] = {
    "decision_id": ("decision_id", "uuid"),
    "platform": ("platform", "platform_name"),
    "category": ("category",),
    "account_action": ("account_action", "decision_account"),
    "visibility_action": ("visibility_action", "decision_visibility"),
    "automated_detection": ("automated_detection",),
    "automated_decision": ("automated_decision",),
    "application_date": ("application_date",),
    "territorial_scope": ("territorial_scope",),
    "content_date": ("content_date",),
}
REQUIRED_COLUMNS = (
    "decision_id",
    "platform",
    "category",
    "automated_detection",
    "automated_decision",
    "application_date",
)

_BOOLS = {
    "yes": True,
    "no": False,
    "true": True,
    "false": False,
    "1": True,
    "0": False,
    "automated_decision_fully": True,
    "automated_decision_partially": True,
    "automated_decision_not_automated": False,
    "fully": True,
    "partially": True,
    "not_automated": False,
}
_ACCOUNT_ACTIONS = {
    "": None,
    "none": AccountAction.NONE,
    "suspended": AccountAction.SUSPENDED,
    "terminated": AccountAction.TERMINATED,
    "decision_account_suspended": AccountAction.SUSPENDED,
    "decision_account_terminated": AccountAction.TERMINATED,
}


@dataclass
class ParseStats:
    rows_read: int = 0
    yielded: int = 0
    skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)
    ignored_columns: tuple[str, ...] = ()

    def record_error(self, line: int, message: str) -> None:
        self.skipped += 1
        if len(self.errors) < MAX_RECORDED_ERRORS:
            self.errors.append((line, message))

    def merge(self, other: ParseStats) -> ParseStats:
        return ParseStats(
            self.rows_read + other.rows_read,
            self.yielded + other.yielded,
            self.skipped + other.skipped,
            (self.errors + other.errors)[:MAX_RECORDED_ERRORS],
            tuple(sorted(set(self.ignored_columns) | set(other.ignored_columns))),
        )


class _BadRow(Exception):
    pass


class SorStream:
    """Lazy, single-pass iterator of :class:`SorRecord`; ``stats`` fills as it is consumed.

    The header is read eagerly so a missing column fails at construction.
    """

    def __init__(
        self,
        source: Source,
        mode: ParseMode = ParseMode.LENIENT,
        buffer_size: int = DEFAULT_BUFFER_SIZE,
    ) -> None:
        if buffer_size < 1024:
            raise InvalidValueError("buffer_size must be at least 1 KiB", field="buffer_size")
        self.mode = ParseMode(mode)
        self.buffer_size = buffer_size
        self.stats = ParseStats()
        if isinstance(source, (str, os.PathLike)):
            try:
                source = open(source, "rb", buffering=buffer_size)
            except OSError as exc:
                raise InputError(f"cannot read {source}: {exc.strerror}") from None
        raw = io.BytesIO(source) if isinstance(source, bytes) else source
        if not isinstance(raw, io.BufferedIOBase):
            raw = io.BufferedReader(raw, buffer_size)  # type: ignore[arg-type]
        # surrogateescape keeps a bad byte local to its row instead of killing the stream
        self._text = io.TextIOWrapper(raw, encoding="utf-8", errors="surrogateescape", newline="")
        self._text._CHUNK_SIZE = buffer_size  # type: ignore[attr-defined]
        self._reader = csv.reader(self._text)
        self._columns = self._read_header()
        self._consumed = False
        self._date_cache: dict[str, date] = {}
        self._bool_cache: dict[str, bool] = {}
        self._account_cache: dict[str, AccountAction | None] = {}
        self._index = tuple(self._columns.get(name) for name in COLUMN_ALIASES)

    def _read_header(self) -> dict[str, int]:
        try:
            header = next(self._reader)
        except StopIteration:
            raise SchemaError("SOR dump is empty; a header row is mandatory") from None
        except csv.Error as exc:
            raise SchemaError(f"unreadable header: {exc}") from None
        names = [h.strip().lstrip("\ufeff").lower() for h in header]
        self._width = len(names)
        positions: dict[str, int] = {}
        known: set[str] = set()
        for canonical, aliases in COLUMN_ALIASES.items():
            for alias in aliases:
                if alias in names:
                    positions[canonical] = names.index(alias)
                    known.add(alias)
                    break
        missing = [c for c in REQUIRED_COLUMNS if c not in positions]
        if missing:
            raise SchemaError(f"SOR dump is missing required column(s): {', '.join(missing)}", field=missing[0])
        extra = tuple(n for n in names if n not in known)
        self.stats.ignored_columns = extra
        if extra:
            log.info("NOTICE: ignoring unknown SOR columns: %s", ", ".join(extra))
        return positions

    def __iter__(self) -> Iterator[SorRecord]:
        if self._consumed:
            raise InputError("SOR stream can only be consumed once")
        self._consumed = True
        return self._records()

    def _records(self) -> Iterator[SorRecord]:
        reader = self._reader
        stats = self.stats
        strict = self.mode is ParseMode.STRICT
        parse = self._parse_row
        while True:
            try:
                row = next(reader)
            except StopIteration:
                return
            except csv.Error as exc:
                stats.rows_read += 1
                if strict:
                    raise RowError(str(exc), row=reader.line_num) from None
                stats.record_error(reader.line_num, str(exc))
                continue
            if not row:
                continue  # blank line
            stats.rows_read += 1
            try:
                record = parse(row)
            except _BadRow as exc:
                if strict:
                    raise RowError(str(exc), row=reader.line_num) from None
                stats.record_error(reader.line_num, str(exc))
                continue
            stats.yielded += 1
            yield record

    def _parse_row(self, row: list[str]) -> SorRecord:
        if len(row) != self._width:
            raise _BadRow(f"expected {self._width} fields, found {len(row)}")
        if not "".join(row).isascii():
            for value in row:
                try:
                    value.encode("utf-8")
                except UnicodeEncodeError:
                    raise _BadRow("invalid UTF-8") from None
        i_id, i_platform, i_cat, i_account, i_vis, i_det, i_dec, i_app, i_scope, i_content = self._index
        decision_id = row[i_id].strip()
        if not decision_id:
            raise _BadRow("empty decision id")
        category = row[i_cat].strip()
        if not category:
            raise _BadRow("empty category")
        account = self._account(row[i_account]) if i_account is not None else None
        visibility = (row[i_vis].strip() or None) if i_vis is not None else None
        scope = _parse_scope(row[i_scope]) if i_scope is not None else None
        content_date = None
        if i_content is not None and row[i_content].strip():
            content_date = self._date(row[i_content], "content_date")
        return SorRecord(
            decision_id,
            row[i_platform].strip(),
            category,
            account,
            visibility,
            self._bool(row[i_det], "automated_detection"),
            self._bool(row[i_dec], "automated_decision"),
            self._date(row[i_app], "application_date"),
            scope,
            content_date,
        )

    # raw cell -> parsed value caches; dumps repeat a handful of spellings millions of times
    def _bool(self, raw: str, name: str) -> bool:
        try:
            return self._bool_cache[raw]
        except KeyError:
            value = _bool(raw, name)
            if len(self._bool_cache) < 1024:
                self._bool_cache[raw] = value
            return value

    def _account(self, raw: str) -> AccountAction | None:
        try:
            return self._account_cache[raw]
        except KeyError:
            try:
                value = _ACCOUNT_ACTIONS[raw.strip().lower()]
            except KeyError:
                raise _BadRow(f"unknown account action {raw!r}") from None
            if len(self._account_cache) < 1024:
                self._account_cache[raw] = value
            return value

    def _date(self, raw: str, name: str) -> date:
        cached = self._date_cache.get(raw)
        if cached is not None:
            return cached
        text = raw.strip()
        head, rest = text[:10], text[10:]
        try:
            if rest and rest[0] not in " T":
                raise ValueError
            value = date.fromisoformat(head)
        except ValueError:
            raise _BadRow(f"{name}: not an ISO-8601 date: {raw!r}") from None
        if len(self._date_cache) < 100_000:
            self._date_cache[raw] = value
        return value


def _bool(raw: str, name: str) -> bool:
    try:
        return _BOOLS[raw.strip().lower()]
    except KeyError:
        raise _BadRow(f"{name}: not a boolean: {raw!r}") from None


@lru_cache(maxsize=4096)
def _parse_scope(raw: str) -> tuple[str, ...] | None:
    text = raw.strip()
    if not text:
        return None
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError:
            raise _BadRow(f"territorial_scope: malformed list {raw!r}") from None
        if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
            raise _BadRow(f"territorial_scope: malformed list {raw!r}")
        return tuple(items)
    return tuple(p.strip() for p in text.replace(";", ",").split(",") if p.strip())


def stream_sor_records(
    source: Source,
    mode: ParseMode = ParseMode.LENIENT,
    buffer_size: int = DEFAULT_BUFFER_SIZE,
) -> SorStream:
    return SorStream(source, mode, buffer_size)


# -- aggregation -------------------------------------------------------------------------

GROUP_FIELDS = frozenset({"period", "category", "account_action", "automated_detection"})
_ACTION_FOR = {
    AccountAction.TERMINATED: Action.ACCOUNT_TERMINATION,
    AccountAction.SUSPENDED: Action.ACCOUNT_RESTRICTION,
    AccountAction.NONE: Action.NONE,
    None: Action.NONE,
}


@dataclass(frozen=True)
class AggregationSpec:
    group_by: frozenset[str]
    period_bounds: tuple[ReportingPeriod, ...] = ()
    platform: str | None = None
    date_from: date | None = None
    date_to: date | None = None
    date_field: str = "application_date"

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_by", frozenset(self.group_by))
        object.__setattr__(self, "period_bounds", tuple(self.period_bounds))
        if not self.group_by:
            raise InputError("group_by must name at least one field")
        unknown = self.group_by - GROUP_FIELDS
        if unknown:
            raise InputError(f"cannot group by {sorted(unknown)}; choose from {sorted(GROUP_FIELDS)}")
        if self.date_field not in ("application_date", "content_date"):
            raise InputError(f"unknown date field {self.date_field!r}")
        check_period_bounds(self.period_bounds)
        undated = [p.label for p in self.period_bounds if not p.has_dates]
        if undated:
            raise InputError(f"period bounds need start and end dates: {undated}")
        if "period" in self.group_by and not self.period_bounds:
            raise InputError("grouping by period requires period bounds")


@dataclass(frozen=True)
class SorAggregate:
    table: MetricTable
    out_of_range: int = 0
    filtered_out: int = 0
    matched: int = 0
    unresolved_categories: tuple[str, ...] = ()


def aggregate_sor(
    records: Iterable[SorRecord],
    spec: AggregationSpec,
    registry: Registry | None = None,
    provenance: Provenance = Provenance("sor-aggregate"),
) -> SorAggregate:
    """Count records per occupied group of ``spec.group_by``.

    Records dated outside every period bound are tallied in ``out_of_range``
    rather than dropped; records rejected by the platform/date filter are
    tallied in ``filtered_out``.
    """
    registry = registry or default_registry()
    by_period = "period" in spec.group_by
    by_category = "category" in spec.group_by
    by_action = "account_action" in spec.group_by
    by_detection = "automated_detection" in spec.group_by
    bounds = sorted(spec.period_bounds, key=period_sort_key)
    use_content_date = spec.date_field == "content_date"
    platform = spec.platform.casefold() if spec.platform else None

    period_cache: dict[date, str | None] = {}
    category_cache: dict[str, str] = {}
    unresolved: set[str] = set()
    tallies: dict[tuple, int] = {}
    out_of_range = filtered = matched = 0

    def period_of(day: date) -> str | None:
        try:
            return period_cache[day]
        except KeyError:
            label = next((p.label for p in bounds if p.contains(day)), None)
            period_cache[day] = label
            return label

    def category_of(raw: str) -> str:
        try:
            return category_cache[raw]
        except KeyError:
            cid = registry.try_resolve(raw, Mechanism.SOR_DB, scope="categories")
            if cid is None:
                unresolved.add(raw)
                cid = normalize_label(raw).replace(" ", "-") or "unknown"
            category_cache[raw] = cid
            return cid

    for r in records:
        day = (r.content_date or r.application_date) if use_content_date else r.application_date
        if platform is not None and r.platform.casefold() != platform:
            filtered += 1
            continue
        if (spec.date_from and day < spec.date_from) or (spec.date_to and day > spec.date_to):
            filtered += 1
            continue
        label = ALL
        if bounds:
            found = period_of(day)
            if found is None:
                out_of_range += 1
                continue
            if by_period:
                label = found
        group = (
            label,
            category_of(r.category) if by_category else ALL,
            _ACTION_FOR[r.account_action] if by_action else Action.ANY,
            (Detection.AUTOMATED if r.automated_detection else Detection.MANUAL)
            if by_detection
            else Detection.ANY,
        )
        tallies[group] = tallies.get(group, 0) + 1
        matched += 1

    table = MetricTable(
        tuple(
            MetricValue(MetricKey(Mechanism.SOR_DB, p, c, a, d), n)
            for (p, c, a, d), n in tallies.items()
        ),
        provenance,
    )
    return SorAggregate(table, out_of_range, filtered, matched, tuple(sorted(unresolved)))


def merge_tables(tables: Iterable[MetricTable], provenance: Provenance | None = None) -> MetricTable:
    """Additive merge; associative and order-independent (output is key-sorted)."""
    totals: dict[MetricKey, int] = {}
    absent: set[MetricKey] = set()
    sources: list[str] = []
    for t in tables:
        sources.append(str(t.provenance))
        for v in t:
            if v.reported:
                totals[v.key] = totals.get(v.key, 0) + v.count  # type: ignore[operator]
            else:
                absent.add(v.key)
    values = [MetricValue(k, n) for k, n in totals.items()]
    values += [MetricValue.absent(k) for k in absent - totals.keys()]
    if provenance is None:
        provenance = Provenance("+".join(sorted(set(sources))))
    return MetricTable(tuple(values), provenance)


def merge_aggregates(parts: Iterable[SorAggregate]) -> SorAggregate:
    parts = list(parts)
    return SorAggregate(
        merge_tables((p.table for p in parts), parts[0].table.provenance if parts else None),
        sum(p.out_of_range for p in parts),
        sum(p.filtered_out for p in parts),
        sum(p.matched for p in parts),
        tuple(sorted({u for p in parts for u in p.unresolved_categories})),
    )


def load_any(source: Source) -> tuple[str, Any]:
    """Decode any interchange document; returns ``(kind, value)``."""
    data = load_json(source)
    kind = data.get("kind") if isinstance(data, dict) else None
    try:
        if kind == "transparency_report":
            validate_document(data, kind)
            return kind, report_from_data(data)
        if kind == "metric_table":
            validate_document(data, kind)
            return kind, table_from_data(data)
        if kind == "sra_matrix":
            validate_document(data, kind)
            return kind, matrix_from_data(data)
    except AuditError:
        raise
    problems = schema_diagnostics(data)
    if problems:
        raise SchemaError(str(problems[0]), field=problems[0].field)
    return str(kind), data
