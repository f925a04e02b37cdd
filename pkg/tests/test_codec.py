from __future__ import annotations

import copy
import json
from datetime import date
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import make_doc
from dsa_audit.codec import (
    config_from_data,
    config_to_data,
    dumps,
    fraction_from_data,
    fraction_to_data,
    from_data,
    matrix_from_data,
    matrix_to_data,
    report_from_data,
    report_to_data,
    to_data,
)
from dsa_audit.errors import DuplicateError, InvalidValueError, SchemaError, VocabularyError
from dsa_audit.ingest import schema_diagnostics
from dsa_audit.model import (
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
    Provenance,
    ReportingPeriod,
    RuleConfig,
    Severity,
    SorRecord,
    SraRiskEntry,
)

_SETTINGS = settings(max_examples=150, deadline=None, derandomize=True, database=None)

keys = st.builds(
    MetricKey,
    st.sampled_from(list(Mechanism)),
    st.sampled_from(["R1", "R2", "R10", "2024-H1"]),
    st.sampled_from(["hate-speech", "spam", "ALL", "violent-graphic"]),
    st.sampled_from(list(Action)),
    st.sampled_from(list(Detection)),
)
values = st.one_of(
    st.builds(MetricValue, keys, st.integers(min_value=0, max_value=10**15)),
    keys.map(MetricValue.absent),
)
exact = st.one_of(
    st.none(),
    st.integers(-(10**12), 10**12),
    st.decimals(min_value=-(10**9), max_value=10**9, places=2),
)


@st.composite
def findings(draw):
    expected = draw(exact)
    observed = draw(exact)
    delta = None if expected is None or observed is None else observed - expected
    if expected is None or observed is None:
        delta = draw(exact)
    return Finding(
        rule_id=draw(st.sampled_from(["internal.residual.removals", "external.reconcile", "x.y"])),
        level=draw(st.sampled_from(list(Level))),
        severity=draw(st.sampled_from(list(Severity))),
        keys=tuple(draw(st.lists(st.one_of(keys, st.sampled_from(["hate-speech", "R1"])), max_size=3))),
        expected=expected,
        observed=observed,
        delta=delta,
        message=draw(st.text(max_size=20)),
        detail=tuple(draw(st.dictionaries(st.sampled_from("abc"), st.text(max_size=5), max_size=3)).items()),
    )


def _round_trip(obj):
    data = json.loads(dumps(to_data(obj)))
    return from_data(type(obj), data)


@_SETTINGS
@given(keys)
def test_key_round_trip(k):
    assert _round_trip(k) == k


@_SETTINGS
@given(values)
def test_value_round_trip(v):
    assert _round_trip(v) == v


@_SETTINGS
@given(st.lists(values, max_size=8, unique_by=lambda v: v.key))
def test_table_round_trip(vs):
    table = MetricTable(tuple(vs), Provenance("src", "t1"))
    assert _round_trip(table) == table


@_SETTINGS
@given(findings())
def test_finding_round_trip(f):
    assert _round_trip(f) == f


@_SETTINGS
@given(st.fractions(min_value=0, max_value=1), st.fractions(min_value=0, max_value=1000), st.integers(0, 60))
def test_config_round_trip(share, pct, slack):
    cfg = RuleConfig(
        residual_warn_share=share / 10, historical_notice_pct=pct, period_date_slack_days=slack
    )
    assert _round_trip(cfg) == cfg


@pytest.mark.parametrize(
    "obj",
    [
        ReportingPeriod("R2", date(2024, 1, 1), date(2024, 6, 30)),
        ReportingPeriod("R1"),
        CanonicalCategory("hate-speech", "Hate Speech", Mechanism.TRANSPARENCY_REPORT, aliases=("hs",)),
        AutomationMetric(AutomationMetricName.AUTOMATION_SHARE, Fraction(9998, 10000), "spam"),
        SorRecord(
            "u1", "Instagram", "STATEMENT_CATEGORY_SCAMS_AND_FRAUD", AccountAction.TERMINATED,
            None, True, False, date(2024, 3, 1), ("DE",), date(2024, 2, 28),
        ),
        SraRiskEntry("Electoral risk", ("m1",), ("a",), ()),
    ],
)
def test_small_types_round_trip(obj):
    assert _round_trip(obj) == obj


def test_published_reports_round_trip(published_reports):
    for doc in published_reports:
        data = json.loads(dumps(report_to_data(doc)))
        assert report_from_data(data) == doc


def test_report_encoding_is_canonical(published_reports):
    doc = published_reports[0]
    assert dumps(report_to_data(doc)) == dumps(report_to_data(report_from_data(report_to_data(doc))))


def test_dumps_is_sorted_and_terminated():
    text = dumps({"b": 1, "a": [1, 2]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')


def test_fraction_encoding_is_exact():
    assert fraction_to_data(Fraction(1, 3)) == "1/3"
    assert fraction_from_data("1/3") == Fraction(1, 3)
    assert fraction_from_data(5) == 5
    assert fraction_from_data("0.05") == Fraction(1, 20)


@pytest.mark.parametrize("raw", [0.5, True, "abc", "1/0"])
def test_fraction_rejects_inexact(raw):
    with pytest.raises(InvalidValueError):
        fraction_from_data(raw)


def test_decimal_survives_as_string():
    f = Finding("x", Level.HISTORICAL, Severity.INFO, expected=Decimal("-51.45"), observed=Decimal("0.00"))
    data = to_data(f)
    assert data["expected"] == "-51.45"
    assert from_data(Finding, data).expected == Decimal("-51.45")


def test_unknown_type_rejected():
    with pytest.raises(TypeError):
        to_data(object())


# -- transparency report decoding errors ------------------------------------------------


def _doc_data():
    return report_to_data(make_doc("R2", {"hate-speech": 10, "spam": 5}, 20, terminations=3))


def test_missing_declared_total_names_the_field():
    data = _doc_data()
    del data["declared_total"]
    with pytest.raises(SchemaError) as info:
        report_from_data(data)
    assert info.value.field == "declared_total"
    diags = schema_diagnostics(data)
    assert [d.field for d in diags] == ["declared_total"]


def test_negative_count_names_the_field():
    data = _doc_data()
    data["removals"]["rows"][0]["total"] = -1
    with pytest.raises(InvalidValueError) as info:
        report_from_data(data)
    assert "hate-speech" in info.value.field
    assert any(d.field == "removals.rows.0.total" for d in schema_diagnostics(data))


def test_float_count_rejected():
    data = _doc_data()
    data["declared_total"] = 20.0
    with pytest.raises(InvalidValueError):
        report_from_data(data)


def test_duplicate_category_after_resolution():
    data = _doc_data()
    data["removals"]["rows"].append({"category": "Hate  speech", "total": 1})
    with pytest.raises(DuplicateError):
        report_from_data(data)


def test_unknown_category_label():
    data = _doc_data()
    data["removals"]["rows"].append({"category": "Electoral Content", "total": 1})
    with pytest.raises(VocabularyError):
        report_from_data(data)


def test_wrong_schema_version():
    data = _doc_data()
    data["schema_version"] = "2"
    with pytest.raises(SchemaError) as info:
        report_from_data(data)
    assert info.value.field == "schema_version"


def test_wrong_kind():
    data = _doc_data()
    data["kind"] = "metric_table"
    with pytest.raises(SchemaError):
        report_from_data(data)


def test_bad_date():
    data = _doc_data()
    data["period"]["start"] = "2024-13-01"
    with pytest.raises(InvalidValueError) as info:
        report_from_data(data)
    assert info.value.field == "period.start"


def test_null_counts_are_absent():
    data = _doc_data()
    data["removals"]["rows"][1]["total"] = None
    doc = report_from_data(copy.deepcopy(data))
    spam = MetricKey(Mechanism.TRANSPARENCY_REPORT, "R2", "spam", Action.REMOVAL, Detection.ANY)
    assert not doc.removals.get(spam).reported
    assert "spam" in doc.removals.categories()
    assert "spam" not in doc.reported_categories()


# -- other documents ----------------------------------------------------------------------


def test_matrix_round_trip(sra_matrix):
    assert matrix_from_data(matrix_to_data(sra_matrix)) == sra_matrix


def test_matrix_duplicate_risk():
    entry = SraRiskEntry("r", (), ("a",), ())
    with pytest.raises(DuplicateError):
        matrix_from_data(matrix_to_data([entry, entry]))


def test_config_defaults_and_unknown_keys():
    assert config_from_data({}) == RuleConfig()
    with pytest.raises(SchemaError) as info:
        config_from_data({"residual_warn": "1/100"})
    assert info.value.field == "residual_warn"
    assert config_to_data(RuleConfig())["external_error_rel"] == "1/4"
