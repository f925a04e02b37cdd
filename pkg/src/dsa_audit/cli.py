"""Command-line entry point: check, aggregate, trace, diff and validate."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from contextlib import contextmanager
from dataclasses import replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .codec import config_from_data, dumps, table_to_data
from .errors import AuditError, InputError, SchemaError
from .ingest import (
    AggregationSpec,
    ParseMode,
    ParseStats,
    aggregate_sor,
    load_json,
    load_metric_table,
    load_period_bounds,
    load_sra_matrix,
    merge_aggregates,
    parse_report_document,
    schema_diagnostics,
    stream_sor_records,
)
from .model import Provenance, RuleConfig, Severity, ordered_periods
from .report import EXIT_CLEAN, EXIT_ERROR, exit_code, parse_format, render
from .rules import AuditBundle, FindingSet, check_historical, evaluate_traceability, run_all
from .taxonomy import Taxonomy, default_taxonomy, load_taxonomy

log = logging.getLogger("dsa_audit")

CONFIG_ENV = "DSA_AUDIT_CONFIG"

# flag -> RuleConfig field; every threshold can be overridden from the command line
THRESHOLD_FLAGS = {
    "--residual-warn-share": "residual_warn_share",
    "--residual-error-share": "residual_error_share",
    "--external-warn-rel": "external_warn_rel",
    "--external-error-rel": "external_error_rel",
    "--historical-notice-pct": "historical_notice_pct",
}


class UsageError(AuditError):
    code = "USAGE_ERROR"


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _output_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output")
    g.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    g.add_argument("--format", choices=["json", "md"], default="json", help="report format (default: json)")
    g.add_argument(
        "--fail-on",
        choices=["info", "notice", "warn", "error"],
        default="warn",
        help="exit 1 when a finding reaches this severity (default: warn)",
    )
    g.add_argument("--with-metadata", action="store_true", help="include run metadata (inputs, timestamp)")
    g.add_argument(
        "--three-level",
        action="store_true",
        help="fold cross-mechanism findings into the EXTERNAL section",
    )
    return p


def _rule_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("rules")
    g.add_argument("--config", metavar="PATH", help=f"rule config JSON (fallback: ${CONFIG_ENV})")
    g.add_argument("--vocab", metavar="DIR", help="taxonomy directory replacing the shipped vocabularies")
    for flag, name in THRESHOLD_FLAGS.items():
        g.add_argument(flag, type=_fraction, metavar="X", dest=name, help=f"override {name}")
    g.add_argument("--period-slack-days", type=int, metavar="N", dest="period_date_slack_days",
                   help="override period_date_slack_days")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsa-audit",
        description="Consistency audits of DSA transparency reports, SOR aggregates and risk assessments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    out, rules = _output_options(), _rule_options()

    p = sub.add_parser("check", parents=[out, rules], help="run every applicable rule family")
    p.add_argument("reports", nargs="+", metavar="REPORT", help="transparency report documents")
    p.add_argument("--sor", action="append", default=[], metavar="PATH", help="SOR aggregate table (repeatable)")
    p.add_argument("--sra", metavar="PATH", help="SRA traceability matrix")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("aggregate", help="stream SOR dumps into a metric table")
    p.add_argument("dumps", nargs="+", metavar="DUMP", help="SOR CSV dumps, merged additively")
    p.add_argument("--out", metavar="PATH", help="write the table here instead of stdout")
    p.add_argument("--period-bounds", metavar="PATH", help="period bounds document")
    p.add_argument(
        "--group-by",
        default="period,account_action",
        metavar="LIST",
        help="comma-separated grouping fields (default: period,account_action)",
    )
    p.add_argument("--mode", choices=["strict", "lenient"], default="lenient", help="bad-row policy")
    p.add_argument("--platform", metavar="NAME", help="keep only this platform's records")
    p.add_argument("--vocab", metavar="DIR", help="taxonomy directory replacing the shipped vocabularies")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("trace", parents=[out, rules], help="grade SRA risks for cross-mechanism traceability")
    p.add_argument("matrix", metavar="MATRIX", help="SRA traceability matrix")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("diff", parents=[out, rules], help="historical findings for one report transition")
    p.add_argument("reports", nargs=2, metavar="REPORT", help="two transparency report documents")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("validate", help="check interchange documents against their schemas")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_validate)
    return parser


# -- shared plumbing ---------------------------------------------------------------------


@contextmanager
def _reading(path: str):
    """Attribute any error raised while handling ``path`` to that file."""
    try:
        yield
    except OSError as exc:
        err = InputError(f"cannot read: {exc.strerror}")
        err.source = path
        raise err from None
    except AuditError as exc:
        if exc.source is None:
            exc.source = path
        raise


def _load(path: str, loader):
    with _reading(path):
        return loader(Path(path).read_bytes())


def load_config(args: argparse.Namespace) -> RuleConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        data = _load(path, load_json)
        with _reading(path):
            if not isinstance(data, dict):
                raise SchemaError("config must be a JSON object")
            problems = schema_diagnostics({"kind": "rule_config", "schema_version": "1", **data}, "rule_config")
            if problems:
                raise SchemaError(str(problems[0]), field=problems[0].field)
            config = config_from_data(data)
    else:
        config = RuleConfig()
    overrides = {
        name: getattr(args, name)
        for name in [*THRESHOLD_FLAGS.values(), "period_date_slack_days"]
        if getattr(args, name, None) is not None
    }
    return replace(config, **overrides) if overrides else config


def load_vocab(args: argparse.Namespace) -> Taxonomy:
    return load_taxonomy(args.vocab) if getattr(args, "vocab", None) else default_taxonomy()


def _reports(paths: Sequence[str], taxonomy: Taxonomy):
    return [_load(p, lambda b: parse_report_document(b, registry=taxonomy.registry)) for p in paths]


def _metadata(args: argparse.Namespace) -> dict[str, str]:
    if not args.with_metadata:
        return {}
    return {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"), "version": __version__}


def _emit(body: bytes, out: str | None) -> None:
    if out:
        try:
            Path(out).write_bytes(body)
        except OSError as exc:
            raise InputError(f"{out}: cannot write: {exc.strerror}") from None
    else:
        sys.stdout.buffer.write(body)
        sys.stdout.flush()


def _finish(findings: FindingSet, args: argparse.Namespace) -> int:
    rendered = render(findings, parse_format(args.format), args.with_metadata, args.three_level)
    _emit(rendered.body, args.out)
    counts = {s.value: sum(row[s.value] for row in rendered.summary.values()) for s in Severity}
    log.info("findings: %s", ", ".join(f"{k}={v}" for k, v in counts.items()))
    return exit_code(findings, Severity(args.fail_on.upper()))


# -- commands ----------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    config = load_config(args)
    taxonomy = load_vocab(args)
    reports = _reports(args.reports, taxonomy)
    tables = tuple(_load(p, load_metric_table) for p in args.sor)
    matrix = tuple(_load(args.sra, load_sra_matrix)) if args.sra else None
    bundle = AuditBundle(tuple(reports), tables, matrix)
    findings = run_all(bundle, config, taxonomy, _metadata(args))
    return _finish(findings, args)


def cmd_aggregate(args: argparse.Namespace) -> int:
    taxonomy = load_vocab(args)
    bounds = _load(args.period_bounds, load_period_bounds) if args.period_bounds else ()
    group_by = {g.strip() for g in args.group_by.split(",") if g.strip()}
    if "period" in group_by and not bounds:
        group_by.discard("period")
        log.warning("no --period-bounds given; not grouping by period")
    spec = AggregationSpec(frozenset(group_by), tuple(bounds), platform=args.platform)
    mode = ParseMode(args.mode.upper())
    parts, stats = [], ParseStats()
    for path in args.dumps:
        with _reading(path):
            stream = stream_sor_records(path, mode)
            parts.append(aggregate_sor(stream, spec, taxonomy.registry, Provenance(Path(path).name)))
        stats = stats.merge(stream.stats)
    merged = merge_aggregates(parts)
    provenance = Provenance("+".join(Path(p).name for p in args.dumps), "sor-aggregate")
    table = type(merged.table)(merged.table.entries, provenance)
    _emit(dumps(table_to_data(table)).encode("utf-8"), args.out)
    print(
        f"rows read: {stats.rows_read}, parsed: {stats.yielded}, skipped: {stats.skipped}, "
        f"matched: {merged.matched}, out of range: {merged.out_of_range}, filtered: {merged.filtered_out}",
        file=sys.stderr,
    )
    for line, message in stats.errors:
        print(f"  row {line}: {message}", file=sys.stderr)
    if stats.ignored_columns:
        print(f"ignored columns: {', '.join(stats.ignored_columns)}", file=sys.stderr)
    if merged.unresolved_categories:
        print(f"unresolved categories: {', '.join(merged.unresolved_categories)}", file=sys.stderr)
    return EXIT_CLEAN


def cmd_trace(args: argparse.Namespace) -> int:
    taxonomy = load_vocab(args)
    matrix = _load(args.matrix, load_sra_matrix)
    findings = FindingSet(tuple(evaluate_traceability(matrix, taxonomy.registry)), load_config(args), _meta_items(args))
    return _finish(findings, args)


def cmd_diff(args: argparse.Namespace) -> int:
    config = load_config(args)
    taxonomy = load_vocab(args)
    docs = _reports(args.reports, taxonomy)
    if docs[0].label == docs[1].label:
        raise UsageError(f"both reports cover period {docs[0].label}; diff needs two distinct periods")
    order = [p.label for p in ordered_periods(d.period for d in docs)]
    docs.sort(key=lambda d: order.index(d.label))
    findings = check_historical(docs, config, taxonomy, include_stable=True)
    return _finish(FindingSet(tuple(findings), config, _meta_items(args)), args)


def _meta_items(args: argparse.Namespace) -> tuple[tuple[str, str], ...]:
    return tuple(sorted(_metadata(args).items()))


def cmd_validate(args: argparse.Namespace) -> int:
    status = EXIT_CLEAN
    for path in args.files:
        try:
            data = _load(path, load_json)
        except AuditError as exc:
            print(exc.describe(), file=sys.stderr)
            status = EXIT_ERROR
            continue
        problems = [str(d) for d in schema_diagnostics(data)]
        if not problems and data.get("kind") == "transparency_report":
            # structurally valid; labels must still resolve and values must agree
            try:
                parse_report_document(Path(path).read_bytes())
            except AuditError as exc:
                problems = [f"{exc.field or '<document>'}: {exc}"]
        if problems:
            status = EXIT_ERROR
            for p in problems:
                print(f"{path}: {p}", file=sys.stderr)
        else:
            print(f"{path}: ok", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # a private handler, so output does not depend on how the host configured logging
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"error: [{exc.code}] {exc.describe()}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
