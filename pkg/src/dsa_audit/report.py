"""Rendering FindingSets as canonical JSON or Markdown, and mapping them to exit codes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .codec import config_to_data, dumps, finding_to_data
from .model import SCHEMA_VERSION, Finding, Level, MetricKey, Severity
from .rules import FindingSet

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

LEVEL_ORDER = (Level.INTERNAL, Level.EXTERNAL, Level.HISTORICAL, Level.CROSS_MECHANISM)

_TITLES = {
    Level.INTERNAL: "Internal consistency",
    Level.EXTERNAL: "External consistency",
    Level.HISTORICAL: "Historical consistency",
    Level.CROSS_MECHANISM: "Cross-mechanism traceability",
}


class OutputFormat(str, Enum):
    JSON = "JSON"
    MARKDOWN = "MARKDOWN"


@dataclass(frozen=True)
class RenderedReport:
    format: OutputFormat
    body: bytes
    summary: dict[str, dict[str, int]]

    @property
    def total(self) -> int:
        return sum(n for row in self.summary.values() for n in row.values())

    def text(self) -> str:
        return self.body.decode("utf-8")


def _summary(findings: FindingSet, three_level: bool) -> dict[str, dict[str, int]]:
    summary = findings.summary()
    if three_level:
        merged = summary.pop(Level.CROSS_MECHANISM.value)
        for sev, n in merged.items():
            summary[Level.EXTERNAL.value][sev] += n
    return summary


def render(
    findings: FindingSet,
    format: OutputFormat | str = OutputFormat.JSON,
    include_metadata: bool = False,
    three_level: bool = False,
) -> RenderedReport:
    """Deterministic rendering; run metadata only appears when asked for.

    ``three_level`` folds the cross-mechanism family into EXTERNAL, matching
    the three-level framing of the consistency model.
    """
    fmt = parse_format(format)
    summary = _summary(findings, three_level)
    if fmt is OutputFormat.JSON:
        body = _json(findings, summary, include_metadata)
    else:
        body = _markdown(findings, summary, include_metadata, three_level)
    return RenderedReport(fmt, body.encode("utf-8"), summary)


def parse_format(value: OutputFormat | str) -> OutputFormat:
    # OutputFormat is a str, so enum members pass through here as well
    return OutputFormat.MARKDOWN if value.lower() in ("md", "markdown") else OutputFormat(value.upper())


def _json(findings: FindingSet, summary: dict, include_metadata: bool) -> str:
    data = {
        "schema_version": SCHEMA_VERSION,
        "kind": "findings",
        "summary": summary,
        "total": len(findings),
        "config": config_to_data(findings.config),
        "findings": [finding_to_data(f) for f in findings],
    }
    if include_metadata:
        data["metadata"] = dict(findings.run_metadata)
    return dumps(data)


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return f"{value:,}"
    return str(value).replace("|", "\\|").replace("\n", " ")


def _is_skipped(f: Finding) -> bool:
    return f.rule_id.endswith(".skipped")


def _markdown(findings: FindingSet, summary: dict, include_metadata: bool, three_level: bool) -> str:
    out = ["# DSA consistency audit", ""]
    out.append(f"Findings: {len(findings)}")
    out.append("")
    severities = [s.value for s in Severity]
    out.append("| Level | " + " | ".join(severities) + " |")
    out.append("|---" * (len(severities) + 1) + "|")
    for level, row in summary.items():
        out.append(f"| {level} | " + " | ".join(str(row[s]) for s in severities) + " |")
    out.append("")
    levels = [lvl for lvl in LEVEL_ORDER if not (three_level and lvl is Level.CROSS_MECHANISM)]
    for level in levels:
        members = [Level.EXTERNAL, Level.CROSS_MECHANISM] if three_level and level is Level.EXTERNAL else [level]
        title = _TITLES[level] + (" (incl. cross-mechanism)" if len(members) > 1 else "")
        out.append(f"## {level.value}: {title}")
        out.append("")
        for member in members:
            items = findings.by_level(member)
            skipped = [f for f in items if _is_skipped(f)]
            rows = [f for f in items if not _is_skipped(f)]
            for f in skipped:
                out.append(f"**SKIPPED** ({member.value}): {_cell(f.message.removeprefix('SKIPPED: '))}")
                out.append("")
            if not rows:
                if not skipped:
                    out.append(f"No {member.value} findings.")
                    out.append("")
                continue
            out.append("| Severity | Rule | Period | Subject | Expected | Observed | Delta | Message | Detail |")
            out.append("|---|---|---|---|---|---|---|---|---|")
            for f in rows:
                subject = f.keys[0].quantity_id if f.keys and isinstance(f.keys[0], MetricKey) else f.category
                out.append(
                    "| "
                    + " | ".join(
                        _cell(v)
                        for v in (
                            f.severity.value,
                            f.rule_id,
                            f.period,
                            subject,
                            f.expected,
                            f.observed,
                            f.delta,
                            f.message,
                            ", ".join(f"{k}={v}" for k, v in f.detail),
                        )
                    )
                    + " |"
                )
            out.append("")
    if include_metadata and findings.run_metadata:
        out.append("## Run metadata")
        out.append("")
        for k, v in findings.run_metadata:
            out.append(f"- {k}: {_cell(v)}")
        out.append("")
    return "\n".join(out)


def exit_code(findings: FindingSet | list[Finding], fail_on: Severity | str = Severity.WARN) -> int:
    """0 when nothing reaches ``fail_on``, 1 otherwise. 2 is left to the CLI for operational errors."""
    threshold = Severity(fail_on.upper()) if isinstance(fail_on, str) else fail_on
    return EXIT_FINDINGS if any(f.severity >= threshold for f in findings) else EXIT_CLEAN
