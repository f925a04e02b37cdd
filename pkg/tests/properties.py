"""The four invariants gated by the acceptance suite, each run on 1,000 generated cases.

Each property function counts the examples it actually executed so the
acceptance line can report the number.
"""

from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from builders import make_doc, sor_value, value
from dsa_audit.model import ALL, Action, CanonicalCategory, Mechanism, MetricKey, RuleConfig
from dsa_audit.rules import check_internal_sums, percent_change, reconcile_external
from dsa_audit.taxonomy import (
    CategoryRef,
    CrosswalkRelation,
    CrosswalkTable,
    Registry,
    RelationKind,
    Vocabulary,
    default_crosswalk,
)

EXAMPLES = 1000
PROPERTY_SETTINGS = settings(
    max_examples=EXAMPLES,
    deadline=None,
    derandomize=True,
    database=None,
    suppress_health_check=[HealthCheck.too_slow],
)
TR = Mechanism.TRANSPARENCY_REPORT
counts = st.integers(min_value=0, max_value=10**12)
CATEGORIES = [f"cat-{i}" for i in range(20)]


def ratios():
    return st.fractions(min_value=0, max_value=1, max_denominator=1000)


@st.composite
def configs(draw):
    rw, re_ = sorted(draw(st.lists(ratios(), min_size=2, max_size=2)))
    ew, ee = sorted(draw(st.lists(ratios(), min_size=2, max_size=2)))
    return RuleConfig(rw, re_, ew, ee, Fraction(50))


# -- residual identity -------------------------------------------------------------------

residual_cases = st.tuples(
    st.dictionaries(st.sampled_from(CATEGORIES), st.one_of(st.none(), counts), min_size=1, max_size=20).filter(
        lambda d: any(v is not None for v in d.values())
    ),
    counts,
)


def residual_identity(counter: list[int]):
    @PROPERTY_SETTINGS
    @given(residual_cases)
    def prop(case):
        removals, total = case
        counter.append(1)
        finding = check_internal_sums(make_doc("P1", removals, total))[0]
        reported = sum(v for v in removals.values() if v is not None)
        assert total == reported + finding.delta
        assert finding.delta == finding.observed - finding.expected
        assert finding.observed == total and finding.expected == reported

    return prop


# -- percent change round trip -----------------------------------------------------------


def percent_round_trip(counter: list[int]):
    @PROPERTY_SETTINGS
    @given(st.integers(min_value=1, max_value=10**12), counts)
    def prop(previous, current):
        counter.append(1)
        change = percent_change(value(_key("P1"), previous), value(_key("P2"), current))
        assert change.defined
        assert previous * (1 + change.exact / 100) == current
        # the rounded value is the half-even rounding of the exact one
        assert abs(Fraction(change.value) - change.exact) <= Fraction(1, 200)

    return prop


def _key(period: str) -> MetricKey:
    return MetricKey(TR, period, ALL, Action.REMOVAL)


# -- severity monotonicity ---------------------------------------------------------------


def severity_monotonic(counter: list[int]):
    @PROPERTY_SETTINGS
    @given(configs(), st.integers(min_value=1, max_value=10**9), st.data())
    def prop(config, total, data):
        counter.append(1)
        r1 = data.draw(st.integers(min_value=0, max_value=total))
        r2 = data.draw(st.integers(min_value=r1, max_value=total))
        # residual: fixed total, growing residual
        low = check_internal_sums(make_doc("P1", {"a": total - r1}, total), config)[0]
        high = check_internal_sums(make_doc("P1", {"a": total - r2}, total), config)[0]
        assert low.severity <= high.severity
        # overshoot (negative residual) sits at the top of the scale
        over = data.draw(st.integers(min_value=1, max_value=10**9))
        overshoot = check_internal_sums(make_doc("P1", {"a": total + over}, total), config)[0]
        assert overshoot.severity >= high.severity
        # external: fixed SOR side, TR side moving away from it
        b = data.draw(st.integers(min_value=0, max_value=10**9))
        d1 = data.draw(st.integers(min_value=0, max_value=10**9))
        d2 = data.draw(st.integers(min_value=d1, max_value=10**9))
        relation = default_crosswalk().lookup("account-termination", TR, Mechanism.SOR_DB)
        tr_key = MetricKey(TR, "P1", ALL, Action.ACCOUNT_TERMINATION)
        near = reconcile_external(value(tr_key, b + d1), sor_value("P1", b), relation, config)
        far = reconcile_external(value(tr_key, b + d2), sor_value("P1", b), relation, config)
        assert Fraction(d1, max(b + d1, 1)) <= Fraction(d2, max(b + d2, 1))
        assert near.severity <= far.severity

    return prop


# -- crosswalk inverse consistency -------------------------------------------------------


@st.composite
def crosswalks(draw):
    """Random SPLIT/MERGE/RENAME declarations between two disjoint vocabularies."""
    n_old = draw(st.integers(min_value=1, max_value=8))
    n_new = draw(st.integers(min_value=1, max_value=8))
    old = [f"old-{i}" for i in range(n_old)]
    new = [f"new-{i}" for i in range(n_new)]
    vocabs = [
        Vocabulary("v-old", TR, ("P1",), tuple(CanonicalCategory(c, c, TR) for c in old)),
        Vocabulary("v-new", TR, ("P2",), tuple(CanonicalCategory(c, c, TR) for c in new)),
    ]
    relations = []
    free_new = list(new)
    for src in old:
        kind = draw(st.sampled_from([RelationKind.SPLIT, RelationKind.MERGE, RelationKind.RENAME, None]))
        if kind is None or not free_new:
            continue
        if kind is RelationKind.SPLIT:
            k = draw(st.integers(min_value=1, max_value=len(free_new)))
            targets = [free_new.pop() for _ in range(k)]
        elif kind is RelationKind.RENAME:
            targets = [free_new.pop()]
        else:
            # several sources may merge into one target; reuse the last merge target when possible
            merge_targets = [r.targets[0].id for r in relations if r.kind is RelationKind.MERGE]
            if merge_targets and draw(st.booleans()):
                targets = [merge_targets[-1]]
            else:
                targets = [free_new.pop()]
        relations.append(
            CrosswalkRelation(CategoryRef("v-old", src), tuple(CategoryRef("v-new", t) for t in targets), kind)
        )
    registry = Registry(vocabs)
    return registry, relations


def crosswalk_inverse(counter: list[int]):
    @PROPERTY_SETTINGS
    @given(crosswalks())
    def prop(case):
        registry, relations = case
        counter.append(1)
        table = CrosswalkTable(relations, registry)
        inverse_kind = {
            RelationKind.SPLIT: RelationKind.MERGE,
            RelationKind.MERGE: RelationKind.SPLIT,
            RelationKind.RENAME: RelationKind.RENAME,
            RelationKind.EXACT: RelationKind.EXACT,
        }
        for r in table.relations:
            for t in r.targets:
                back = table.between(t.id, t.vocabulary, r.source.vocabulary)
                assert back is not None, (r, t)
                assert back.kind is inverse_kind[r.kind]
                assert r.source in back.targets
        # declared relations survive unchanged
        for r in relations:
            assert table.between(r.source.id, "v-old", "v-new") == r

    return prop


PROPERTIES = {
    "residual integer identity": residual_identity,
    "percent-change round trip": percent_round_trip,
    "severity monotonicity": severity_monotonic,
    "crosswalk inverse consistency": crosswalk_inverse,
}
