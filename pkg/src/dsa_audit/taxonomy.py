"""Category vocabularies, label resolution, crosswalks and lifecycle detection."""

from __future__ import annotations

import json
import re
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import AmbiguityError, InputError, SchemaError, VocabularyError
from .model import (
    SCHEMA_VERSION,
    CanonicalCategory,
    Mechanism,
    TransparencyReportDoc,
    natural_key,
)

_PUNCT_RE = re.compile(r"[^\w\s]|_", re.UNICODE)
_WS_RE = re.compile(r"\s+")


def normalize_label(raw: str) -> str:
    """Lowercase, spell out ``&``, drop parentheses and punctuation, collapse whitespace."""
    text = raw.casefold().replace("&", " and ")
    text = _PUNCT_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


class RelationKind(str, Enum):
    EXACT = "EXACT"
    RENAME = "RENAME"
    MERGE = "MERGE"
    SPLIT = "SPLIT"
    NONE = "NONE"


class LifecycleKind(str, Enum):
    INTRODUCED = "INTRODUCED"
    DISCONTINUED = "DISCONTINUED"
    RENAMED = "RENAMED"
    MERGED_INTO = "MERGED_INTO"
    SPLIT_FROM = "SPLIT_FROM"
    CONTINUED = "CONTINUED"


@dataclass(frozen=True)
class Vocabulary:
    name: str
    mechanism: Mechanism
    periods: tuple[str, ...] | None
    categories: tuple[CanonicalCategory, ...]
    # what the labels classify within the mechanism: removals, notices, actions...
    scope: str = ""

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for c in self.categories:
            if c.id in seen:
                raise SchemaError(f"vocabulary {self.name}: duplicate category id {c.id!r}")
            if c.mechanism_vocabulary is not self.mechanism:
                raise SchemaError(f"vocabulary {self.name}: {c.id} belongs to another mechanism")
            seen.add(c.id)

    def covers(self, period: str | None) -> bool:
        return self.periods is None or period is None or period in self.periods

    def ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.categories)


@dataclass(frozen=True)
class CategoryRef:
    vocabulary: str
    id: str


@dataclass(frozen=True)
class CrosswalkRelation:
    source: CategoryRef
    targets: tuple[CategoryRef, ...]
    kind: RelationKind
    # names the target vocabulary of a NONE relation, which has no targets
    target_vocabulary: str = ""

    def __post_init__(self) -> None:
        if self.targets:
            object.__setattr__(self, "target_vocabulary", self.targets[0].vocabulary)
        n = len(self.targets)
        if self.kind is RelationKind.NONE and n:
            raise SchemaError(f"NONE relation for {self.source.id} must have no targets")
        if self.kind in (RelationKind.EXACT, RelationKind.RENAME) and n != 1:
            raise SchemaError(f"{self.kind.value} relation for {self.source.id} must be 1-to-1")
        if self.kind in (RelationKind.MERGE, RelationKind.SPLIT) and n == 0:
            raise SchemaError(f"{self.kind.value} relation for {self.source.id} needs targets")

    @property
    def target_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.targets)


class Registry:
    """Immutable set of vocabularies with a normalized-label index."""

    def __init__(self, vocabularies: Iterable[Vocabulary]) -> None:
        self._vocabs: dict[str, Vocabulary] = {}
        for v in vocabularies:
            if v.name in self._vocabs:
                raise SchemaError(f"duplicate vocabulary {v.name!r}")
            self._vocabs[v.name] = v
        self._index: dict[str, dict[str, set[str]]] = {}
        for v in self._vocabs.values():
            idx: dict[str, set[str]] = defaultdict(set)
            for c in v.categories:
                for label in (c.id, c.display_name, *c.aliases):
                    idx[normalize_label(label)].add(c.id)
            self._index[v.name] = dict(idx)

    @property
    def vocabularies(self) -> list[Vocabulary]:
        return [self._vocabs[k] for k in sorted(self._vocabs)]

    def vocabulary(self, name: str) -> Vocabulary:
        try:
            return self._vocabs[name]
        except KeyError:
            raise VocabularyError(f"unknown vocabulary {name!r}") from None

    def for_mechanism(
        self, mechanism: Mechanism, period: str | None = None, scope: str | None = None
    ) -> list[Vocabulary]:
        vocabs = [
            v
            for v in self.vocabularies
            if v.mechanism is mechanism and (scope is None or v.scope == scope)
        ]
        covering = [v for v in vocabs if v.covers(period)]
        # an unknown period label falls back to every era of the mechanism
        return covering or vocabs

    def ids(self, mechanism: Mechanism) -> frozenset[str]:
        out: set[str] = set()
        for v in self.for_mechanism(mechanism):
            out |= v.ids()
        return frozenset(out)

    def category(self, category_id: str, mechanism: Mechanism) -> CanonicalCategory:
        for v in self.for_mechanism(mechanism):
            for c in v.categories:
                if c.id == category_id:
                    return c
        raise VocabularyError(f"unknown {mechanism.value} category {category_id!r}")

    def resolve(
        self,
        raw_label: str,
        mechanism: Mechanism,
        period: str | None = None,
        scope: str | None = None,
    ) -> str:
        key = normalize_label(raw_label)
        if not key:
            raise VocabularyError("empty category label")
        hits: set[str] = set()
        for v in self.for_mechanism(mechanism, period, scope):
            hits |= self._index[v.name].get(key, set())
        if not hits:
            raise VocabularyError(
                f"{raw_label!r} does not match any {mechanism.value} category"
                + (f" for period {period}" if period else "")
            )
        if len(hits) > 1:
            raise AmbiguityError(f"{raw_label!r} matches several categories: {sorted(hits)}")
        return hits.pop()

    def try_resolve(
        self,
        raw_label: str,
        mechanism: Mechanism,
        period: str | None = None,
        scope: str | None = None,
    ) -> str | None:
        try:
            return self.resolve(raw_label, mechanism, period, scope)
        except (VocabularyError, AmbiguityError):
            return None


def resolve_category(
    raw_label: str,
    vocabulary: Mechanism,
    period: str | None = None,
    registry: Registry | None = None,
    scope: str | None = None,
) -> str:
    return (registry or default_registry()).resolve(raw_label, vocabulary, period, scope)


class CrosswalkTable:
    """Declared relations plus their derived inverses.

    A SPLIT of A into {B, C} implies B and C each MERGE into A when queried in
    the reverse direction, and a MERGE of several sources into T implies T
    SPLITs into those sources.
    """

    def __init__(self, relations: Iterable[CrosswalkRelation], registry: Registry) -> None:
        self.registry = registry
        self._rel: dict[tuple[str, str, str], CrosswalkRelation] = {}
        declared = list(relations)
        for r in declared:
            self._check_ref(r.source)
            for t in r.targets:
                self._check_ref(t)
                if t.vocabulary != r.targets[0].vocabulary:
                    raise SchemaError(f"relation for {r.source.id} spans several target vocabularies")
            slot = (r.source.vocabulary, r.source.id, self._target_vocab(r))
            if slot in self._rel:
                raise SchemaError(f"duplicate crosswalk relation for {r.source.id}")
            self._rel[slot] = r
        for slot, r in self._derive_inverses(declared).items():
            existing = self._rel.get(slot)
            if existing is None:
                self._rel[slot] = r
            elif (existing.kind, set(existing.targets)) != (r.kind, set(r.targets)):
                raise SchemaError(
                    f"declared relation for {r.source.id} contradicts the inverse of another relation"
                )

    def _check_ref(self, ref: CategoryRef) -> None:
        if ref.id not in self.registry.vocabulary(ref.vocabulary).ids():
            raise VocabularyError(f"crosswalk references unknown category {ref.vocabulary}:{ref.id}")

    @staticmethod
    def _target_vocab(r: CrosswalkRelation) -> str:
        return r.target_vocabulary

    def _derive_inverses(self, declared: list[CrosswalkRelation]) -> dict:
        grouped: dict[tuple[str, str, str], tuple[RelationKind, set[CategoryRef]]] = {}
        for r in declared:
            if r.kind is RelationKind.NONE:
                continue
            inverse_kind = {
                RelationKind.EXACT: RelationKind.EXACT,
                RelationKind.RENAME: RelationKind.RENAME,
                RelationKind.SPLIT: RelationKind.MERGE,
                RelationKind.MERGE: RelationKind.SPLIT,
            }[r.kind]
            for t in r.targets:
                slot = (t.vocabulary, t.id, r.source.vocabulary)
                kind, sources = grouped.setdefault(slot, (inverse_kind, set()))
                if kind is not inverse_kind:
                    raise SchemaError(f"{t.vocabulary}:{t.id} is both a merge and a split target")
                sources.add(r.source)
        out = {}
        for (vocab, cid, _), (kind, sources) in grouped.items():
            if kind in (RelationKind.EXACT, RelationKind.RENAME) and len(sources) > 1:
                raise SchemaError(f"{vocab}:{cid} is the target of several 1-to-1 relations")
            targets = tuple(sorted(sources, key=lambda s: (s.vocabulary, s.id)))
            out[(vocab, cid, targets[0].vocabulary)] = CrosswalkRelation(
                CategoryRef(vocab, cid), targets, kind
            )
        return out

    @property
    def relations(self) -> list[CrosswalkRelation]:
        return [self._rel[k] for k in sorted(self._rel)]

    def between(self, category: str, from_vocab: str, to_vocab: str) -> CrosswalkRelation | None:
        return self._rel.get((from_vocab, category, to_vocab))

    def lookup(self, category: str, from_mech: Mechanism, to_mech: Mechanism) -> CrosswalkRelation:
        source_vocabs = [v for v in self.registry.for_mechanism(from_mech) if category in v.ids()]
        if not source_vocabs:
            raise VocabularyError(f"unknown {from_mech.value} category {category!r}")
        if from_mech is to_mech:
            ref = CategoryRef(source_vocabs[-1].name, category)
            return CrosswalkRelation(ref, (ref,), RelationKind.EXACT)
        found = []
        for v in source_vocabs:
            for tv in self.registry.for_mechanism(to_mech):
                r = self.between(category, v.name, tv.name)
                if r is not None:
                    found.append(r)
        mapped = [r for r in found if r.kind is not RelationKind.NONE]
        if len(mapped) > 1:
            raise AmbiguityError(
                f"{category!r} has several {from_mech.value}->{to_mech.value} relations"
            )
        if mapped:
            return mapped[0]
        return CrosswalkRelation(CategoryRef(source_vocabs[0].name, category), (), RelationKind.NONE)

    def successors(self, category: str, mechanism: Mechanism) -> CrosswalkRelation | None:
        """Declared/derived same-mechanism era relation starting at ``category``, if any."""
        return self._same_mechanism(category, mechanism, forward=True)

    def predecessors(self, category: str, mechanism: Mechanism) -> CrosswalkRelation | None:
        return self._same_mechanism(category, mechanism, forward=False)

    def _same_mechanism(self, category: str, mechanism: Mechanism, forward: bool) -> CrosswalkRelation | None:
        vocabs = self.registry.for_mechanism(mechanism)
        order = {v.name: i for i, v in enumerate(sorted(vocabs, key=_era_key))}
        for (fv, cid, tv), r in sorted(self._rel.items()):
            if cid != category or fv not in order or tv not in order or fv == tv:
                continue
            if (order[tv] > order[fv]) == forward:
                return r
        return None


def _era_key(v: Vocabulary) -> tuple:
    first = min(v.periods, key=natural_key) if v.periods else ""
    return (natural_key(first), v.name)


def crosswalk(
    category: str,
    from_mechanism: Mechanism,
    to_mechanism: Mechanism,
    table: CrosswalkTable | None = None,
) -> CrosswalkRelation:
    return (table or default_crosswalk()).lookup(category, from_mechanism, to_mechanism)


@dataclass(frozen=True)
class LifecycleEvent:
    category: str
    period: str
    kind: LifecycleKind
    counterpart: tuple[str, ...] = ()


def detect_lifecycle(
    series: Sequence[TransparencyReportDoc],
    crosswalk_table: CrosswalkTable | None = None,
) -> list[LifecycleEvent]:
    """One event per (category, consecutive transition) over the union of categories.

    A category that stays absent across a transition is CONTINUED: its status
    did not change. Rename/merge/split are only reported when the crosswalk
    declares them; otherwise disappearance and appearance are DISCONTINUED and
    INTRODUCED.
    """
    if len(series) < 2:
        raise InputError("lifecycle detection needs at least two reports")
    table = crosswalk_table if crosswalk_table is not None else default_crosswalk()
    mech = Mechanism.TRANSPARENCY_REPORT
    union = sorted({c for doc in series for c in doc.removals.categories()})
    events: list[LifecycleEvent] = []
    for prev, cur in zip(series, series[1:]):
        before = set(prev.reported_categories())
        after = set(cur.reported_categories())
        for c in union:
            was, now = c in before, c in after
            if was == now:
                events.append(LifecycleEvent(c, cur.label, LifecycleKind.CONTINUED))
            elif was:
                events.append(_gone(c, cur.label, table.successors(c, mech)))
            else:
                events.append(_new(c, cur.label, table.predecessors(c, mech)))
    return events


def _gone(category: str, period: str, rel: CrosswalkRelation | None) -> LifecycleEvent:
    if rel is None or rel.kind is RelationKind.NONE:
        return LifecycleEvent(category, period, LifecycleKind.DISCONTINUED)
    kind = {
        RelationKind.MERGE: LifecycleKind.MERGED_INTO,
        RelationKind.RENAME: LifecycleKind.RENAMED,
        RelationKind.EXACT: LifecycleKind.RENAMED,
        # the parts of a split carry SPLIT_FROM; the dissolved parent is discontinued
        RelationKind.SPLIT: LifecycleKind.DISCONTINUED,
    }[rel.kind]
    return LifecycleEvent(category, period, kind, rel.target_ids)


def _new(category: str, period: str, rel: CrosswalkRelation | None) -> LifecycleEvent:
    # ``rel`` points backwards; a backwards MERGE means this category was split off
    if rel is not None and rel.kind is RelationKind.MERGE:
        return LifecycleEvent(category, period, LifecycleKind.SPLIT_FROM, rel.target_ids)
    counterpart = rel.target_ids if rel is not None else ()
    return LifecycleEvent(category, period, LifecycleKind.INTRODUCED, counterpart)


# -- loading -------------------------------------------------------------------


def _require_version(data: Mapping, what: str) -> None:
    if not isinstance(data, Mapping):
        raise SchemaError(f"{what}: expected a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"{what}: unsupported schema_version {data.get('schema_version')!r}",
            field="schema_version",
        )


def vocabulary_from_data(data: Mapping) -> Vocabulary:
    _require_version(data, "vocabulary")
    try:
        mechanism = Mechanism(data["mechanism"])
        periods = data.get("periods")
        cats = tuple(
            CanonicalCategory(
                id=c["id"],
                display_name=c["display_name"],
                mechanism_vocabulary=mechanism,
                first_period=c.get("first_period"),
                last_period=c.get("last_period"),
                aliases=tuple(c.get("aliases", ())),
                family=c.get("family"),
            )
            for c in data["categories"]
        )
        return Vocabulary(
            data["name"], mechanism, tuple(periods) if periods else None, cats, data.get("scope", "")
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed vocabulary: {exc!r}") from None


def vocabulary_to_data(vocab: Vocabulary) -> dict:
    cats = []
    for c in vocab.categories:
        entry = {
            "id": c.id,
            "display_name": c.display_name,
            "aliases": list(c.aliases),
            "first_period": c.first_period,
            "last_period": c.last_period,
        }
        if c.family:
            entry["family"] = c.family
        cats.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "vocabulary",
        "name": vocab.name,
        "mechanism": vocab.mechanism.value,
        "periods": list(vocab.periods) if vocab.periods else None,
        "scope": vocab.scope,
        "categories": cats,
    }


def relations_from_data(data: Mapping) -> list[CrosswalkRelation]:
    _require_version(data, "crosswalk")
    try:
        return [
            CrosswalkRelation(
                CategoryRef(r["from"]["vocabulary"], r["from"]["id"]),
                tuple(CategoryRef(t["vocabulary"], t["id"]) for t in r["to"]),
                RelationKind(r["kind"]),
                r.get("to_vocabulary", ""),
            )
            for r in data["relations"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed crosswalk: {exc!r}") from None


def relations_to_data(relations: Iterable[CrosswalkRelation], name: str = "") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "crosswalk",
        "name": name,
        "relations": [
            {
                "from": {"vocabulary": r.source.vocabulary, "id": r.source.id},
                "to": [{"vocabulary": t.vocabulary, "id": t.id} for t in r.targets],
                "to_vocabulary": r.target_vocabulary,
                "kind": r.kind.value,
            }
            for r in relations
        ],
    }


@dataclass(frozen=True)
class Taxonomy:
    registry: Registry
    crosswalk: CrosswalkTable


def load_taxonomy(directory: Path | str) -> Taxonomy:
    """Load ``vocab/*.json`` and ``crosswalk/*.json`` below ``directory``.

    A flat directory is accepted too; files are told apart by their ``kind``.
    """
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"{root}: not a directory")
    vocabs, relations = [], []
    for path in sorted(root.rglob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: {exc}") from None
        kind = data.get("kind") if isinstance(data, dict) else None
        if kind == "vocabulary":
            vocabs.append(vocabulary_from_data(data))
        elif kind == "crosswalk":
            relations.extend(relations_from_data(data))
    registry = Registry(vocabs)
    return Taxonomy(registry, CrosswalkTable(relations, registry))


@lru_cache(maxsize=1)
def default_taxonomy() -> Taxonomy:
    root = resources.files("dsa_audit") / "data"
    with resources.as_file(root) as path:
        return load_taxonomy(path)


def default_registry() -> Registry:
    return default_taxonomy().registry


def default_crosswalk() -> CrosswalkTable:
    return default_taxonomy().crosswalk
