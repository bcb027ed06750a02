"""Immutable multilingual knowledge graph store with flat-file ingestion.

Entities are language-independent IDs (Wikidata style) carrying per-language
names, aliases and descriptions; relational facts are (head, relation, tail)
ID triplets. The store is built in a single-writer ingestion phase and then
frozen: lookup indices are only available after freezing, and no mutation is
allowed afterwards, which makes the frozen store safe for concurrent readers.
"""

from __future__ import annotations

import json
import logging
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

from .textnorm import normalize

logger = logging.getLogger(__name__)

DEFAULT_LANGUAGES = ("ar", "de", "en", "es", "fr", "it", "ja", "ko", "th", "zh")

# reserved pseudo-relations used to phrase name/description queries as triplets
NAMES_PID = "_names"
DESCRIPTION_PID = "_description"

PSEUDO_RELATION_LABELS: dict[str, dict[str, str]] = {
    NAMES_PID: {
        "en": "names",
        "de": "namen",
        "es": "nombres",
        "fr": "noms",
        "it": "nomi",
        "ar": "أسماء",
        "ja": "名前",
        "ko": "이름",
        "th": "ชื่อ",
        "zh": "名称",
    },
    DESCRIPTION_PID: {
        "en": "description",
        "de": "beschreibung",
        "es": "descripción",
        "fr": "description",
        "it": "descrizione",
        "ar": "وصف",
        "ja": "説明",
        "ko": "설명",
        "th": "คำอธิบาย",
        "zh": "描述",
    },
}

_ID_NUM_RE = re.compile(r"^[QP](\d+)$")


class IngestError(Exception):
    """Fatal ingestion problem, e.g. an unreadable input file."""


class StoreStateError(RuntimeError):
    """Mutation of a frozen store, or an index lookup before freezing."""


class Tier(Enum):
    HEAD = "head"
    TORSO = "torso"
    TAIL = "tail"
    UNKNOWN = "unknown"


# tie-break order for linking: more popular tiers win
TIER_ORDER = {Tier.HEAD: 0, Tier.TORSO: 1, Tier.TAIL: 2, Tier.UNKNOWN: 3}


def qid_sort_key(qid: str) -> tuple[int, int, str]:
    """Sort key putting Q/P ids in numeric order, anything else lexicographic after."""
    m = _ID_NUM_RE.match(qid)
    if m:
        return (0, int(m.group(1)), qid)
    return (1, 0, qid)


@dataclass(frozen=True)
class Lexicalization:
    """Per-language textual facet of an entity."""

    primary_name: str
    aliases: tuple[str, ...] = ()
    description: Optional[str] = None

    def names(self) -> tuple[str, ...]:
        return (self.primary_name, *self.aliases)


@dataclass
class Entity:
    qid: str
    lex: dict[str, Lexicalization] = field(default_factory=dict)
    tier: Tier = Tier.UNKNOWN


@dataclass
class Relation:
    pid: str
    labels: dict[str, str] = field(default_factory=dict)


class Triplet(tuple):
    """A (head qid, relation pid, tail qid) fact."""

    __slots__ = ()

    def __new__(cls, head: str, rel: str, tail: str):
        return super().__new__(cls, (head, rel, tail))

    @property
    def head(self) -> str:
        return self[0]

    @property
    def rel(self) -> str:
        return self[1]

    @property
    def tail(self) -> str:
        return self[2]


@dataclass(frozen=True)
class BenchmarkRecord:
    """One human-curated evaluation item: gold/incorrect names for (entity, language)."""

    qid: str
    lang: str
    tier: Tier
    correct_names: tuple[str, ...]
    incorrect_names: tuple[str, ...] = ()
    gold_description: Optional[str] = None


class KnowledgeGraph:
    """Append-only during ingestion, immutable after :meth:`freeze`."""

    def __init__(self, languages: Iterable[str] = DEFAULT_LANGUAGES):
        self.languages: tuple[str, ...] = tuple(languages)
        for code in self.languages:
            if not (len(code) == 2 and code.islower()):
                raise ValueError(f"bad language code: {code!r}")
        self._lang_set = frozenset(self.languages)
        self.entities: dict[str, Entity] = {}
        self.relations: dict[str, Relation] = {}
        self.triplets: list[Triplet] = []
        self.adjacency: dict[tuple[str, str], set[str]] = {}
        self.name_index: dict[tuple[str, str], set[str]] = {}
        self.skip_report: Counter = Counter()
        self._frozen = False
        for pid, labels in PSEUDO_RELATION_LABELS.items():
            self.relations[pid] = Relation(pid, dict(labels))

    # -- state guards -------------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _require_mutable(self) -> None:
        if self._frozen:
            raise StoreStateError("store is frozen; no further ingestion allowed")

    def _require_frozen(self) -> None:
        if not self._frozen:
            raise StoreStateError("store must be frozen before lookups")

    def is_language(self, code: str) -> bool:
        return code in self._lang_set

    # -- programmatic construction -----------------------------------------

    def entity(self, qid: str) -> Entity:
        """Get or provisionally create an entity stub."""
        ent = self.entities.get(qid)
        if ent is None:
            self._require_mutable()
            ent = Entity(qid)
            self.entities[qid] = ent
        return ent

    def relation(self, pid: str) -> Relation:
        """Get or provisionally create a relation stub (no labels yet)."""
        rel = self.relations.get(pid)
        if rel is None:
            self._require_mutable()
            rel = Relation(pid)
            self.relations[pid] = rel
        return rel

    def add_triplet(self, head: str, rel: str, tail: str) -> None:
        self._require_mutable()
        head, rel, tail = sys.intern(head), sys.intern(rel), sys.intern(tail)
        self.entity(head)
        self.entity(tail)
        self.relation(rel)
        self.triplets.append(Triplet(head, rel, tail))
        self.adjacency.setdefault((head, rel), set()).add(tail)

    def add_lexicalization(
        self,
        qid: str,
        lang: str,
        name: str,
        aliases: Iterable[str] = (),
        description: Optional[str] = None,
    ) -> None:
        """Attach (or overwrite) the lexicalization of `qid` in `lang`.

        Aliases are deduplicated by normalized form and never repeat the
        primary name; empty alias strings are dropped.
        """
        self._require_mutable()
        if lang not in self._lang_set:
            raise ValueError(f"language {lang!r} is not in the configured set")
        if not name or not name.strip():
            raise ValueError("primary name must be non-empty")
        seen = {normalize(name, lang)}
        clean_aliases = []
        for alias in aliases:
            if not alias or not alias.strip():
                continue
            key = normalize(alias, lang)
            if key in seen:
                continue
            seen.add(key)
            clean_aliases.append(alias)
        if description is not None and not description.strip():
            description = None
        ent = self.entity(sys.intern(qid))
        ent.lex[lang] = Lexicalization(name, tuple(clean_aliases), description)

    def add_relation_labels(self, pid: str, labels: dict[str, str]) -> None:
        self._require_mutable()
        rel = self.relation(pid)
        for lang, label in labels.items():
            if lang not in self._lang_set:
                raise ValueError(f"language {lang!r} is not in the configured set")
            if not label or not label.strip():
                raise ValueError("relation label must be non-empty")
            rel.labels[lang] = label

    def set_tier(self, qid: str, tier: Tier) -> None:
        self._require_mutable()
        self.entity(qid).tier = tier

    def freeze(self) -> None:
        """Build the name index and seal the store. Idempotent."""
        if self._frozen:
            return
        for qid, ent in self.entities.items():
            for lang, lex in ent.lex.items():
                for nm in lex.names():
                    self.name_index.setdefault((lang, normalize(nm, lang)), set()).add(qid)
        self._frozen = True

    # -- flat-file ingestion --------------------------------------------------

    def ingest_triplets(self, path) -> int:
        """Load tab-separated `head<TAB>rel<TAB>tail` lines; returns triplets added.

        Malformed lines are skipped and counted in `skip_report`; IDs never
        seen before are created as empty stubs so relational structure is
        kept even when textual coverage is incomplete.
        """
        self._require_mutable()
        added = 0
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read triplet file {path}: {exc}") from exc
        with fh:
            for line in fh:
                line = line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3 or not all(p.strip() for p in parts):
                    self.skip_report["malformed_triplet"] += 1
                    continue
                head, rel, tail = (p.strip() for p in parts)
                self.add_triplet(head, rel, tail)
                added += 1
        return added

    def ingest_lexical(self, path) -> int:
        """Load line-delimited `{qid, lang, name, aliases[], description?}` records.

        Later records overwrite earlier ones for the same (qid, lang).
        Records in an unconfigured language are skipped with a warning.
        """
        self._require_mutable()
        added = 0
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read lexical file {path}: {exc}") from exc
        with fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    qid = rec["qid"]
                    lang = rec["lang"]
                    name = rec["name"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    self.skip_report["malformed_lexical"] += 1
                    logger.warning("%s:%d: malformed lexical record", path, lineno)
                    continue
                if lang not in self._lang_set:
                    self.skip_report["unknown_lang"] += 1
                    logger.warning("%s:%d: unknown language %r, record skipped", path, lineno, lang)
                    continue
                if not isinstance(name, str) or not name.strip():
                    self.skip_report["malformed_lexical"] += 1
                    logger.warning("%s:%d: empty primary name, record skipped", path, lineno)
                    continue
                aliases = rec.get("aliases") or []
                description = rec.get("description")
                self.add_lexicalization(qid, lang, name, aliases, description)
                added += 1
        return added

    def ingest_relation_labels(self, path) -> int:
        """Load line-delimited `{pid, lang, label}` records; returns labels added."""
        self._require_mutable()
        added = 0
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read relation label file {path}: {exc}") from exc
        with fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    pid, lang, label = rec["pid"], rec["lang"], rec["label"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    self.skip_report["malformed_relation_label"] += 1
                    logger.warning("%s:%d: malformed relation label record", path, lineno)
                    continue
                if lang not in self._lang_set:
                    self.skip_report["unknown_lang"] += 1
                    logger.warning("%s:%d: unknown language %r, record skipped", path, lineno, lang)
                    continue
                self.add_relation_labels(pid, {lang: label})
                added += 1
        return added

    # -- frozen lookups -----------------------------------------------------

    def lookup_name(self, lang: str, raw_name: str) -> set[str]:
        """All qids whose primary name or alias in `lang` normalizes to `raw_name`."""
        self._require_frozen()
        return set(self.name_index.get((lang, normalize(raw_name, lang)), ()))

    def known_tails(self, head: str, pid: str) -> set[str]:
        """Tail qids recorded for (head, pid); empty set for unseen pairs."""
        self._require_frozen()
        return set(self.adjacency.get((head, pid), ()))

    # -- bookkeeping ----------------------------------------------------------

    def stats(self) -> dict:
        return {
            "entities": len(self.entities),
            "relations": sum(1 for pid in self.relations if pid not in PSEUDO_RELATION_LABELS),
            "triplets": len(self.triplets),
            "lexicalizations": sum(len(e.lex) for e in self.entities.values()),
            "skipped": {k: self.skip_report[k] for k in sorted(self.skip_report)},
        }

    # -- snapshots ------------------------------------------------------------

    def save(self, path) -> None:
        """Serialize deterministically: identical stores produce identical bytes."""

        def dump(obj) -> str:
            return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))

        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump({"kind": "meta", "languages": list(self.languages), "frozen": self._frozen}) + "\n")
            for pid in sorted(self.relations, key=qid_sort_key):
                if pid in PSEUDO_RELATION_LABELS:
                    continue
                rel = self.relations[pid]
                fh.write(dump({"kind": "relation", "pid": pid, "labels": rel.labels}) + "\n")
            for qid in sorted(self.entities, key=qid_sort_key):
                ent = self.entities[qid]
                lex = {
                    lang: {
                        "name": lx.primary_name,
                        "aliases": list(lx.aliases),
                        "description": lx.description,
                    }
                    for lang, lx in sorted(ent.lex.items())
                }
                fh.write(dump({"kind": "entity", "qid": qid, "tier": ent.tier.value, "lex": lex}) + "\n")
            for t in self.triplets:
                fh.write(dump({"kind": "triplet", "h": t.head, "r": t.rel, "t": t.tail}) + "\n")

    @classmethod
    def load(cls, path) -> "KnowledgeGraph":
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read snapshot {path}: {exc}") from exc
        graph: Optional[KnowledgeGraph] = None
        was_frozen = False
        with fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                kind = rec["kind"]
                if kind == "meta":
                    graph = cls(languages=rec["languages"])
                    was_frozen = bool(rec.get("frozen"))
                    continue
                if graph is None:
                    raise IngestError(f"snapshot {path} is missing its meta record")
                if kind == "relation":
                    graph.relation(rec["pid"]).labels.update(rec["labels"])
                elif kind == "entity":
                    ent = graph.entity(rec["qid"])
                    ent.tier = Tier(rec["tier"])
                    for lang, lx in rec["lex"].items():
                        graph.add_lexicalization(
                            rec["qid"], lang, lx["name"], lx.get("aliases") or [], lx.get("description")
                        )
                elif kind == "triplet":
                    graph.add_triplet(rec["h"], rec["r"], rec["t"])
                else:
                    raise IngestError(f"snapshot {path}: unknown record kind {kind!r}")
        if graph is None:
            raise IngestError(f"snapshot {path} is empty")
        if was_frozen:
            graph.freeze()
        return graph


# -- benchmark files ----------------------------------------------------------


def read_benchmark(path, languages: Iterable[str] = DEFAULT_LANGUAGES) -> list[BenchmarkRecord]:
    """Read line-delimited benchmark records.

    Schema per line: `{qid, lang, tier, correct_names[], incorrect_names[],
    gold_description?}` with tier one of head/torso/tail. Malformed records
    are skipped with a warning.
    """
    lang_set = frozenset(languages)
    records: list[BenchmarkRecord] = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read benchmark file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                qid = rec["qid"]
                lang = rec["lang"]
                tier = Tier(rec["tier"])
                correct = tuple(rec["correct_names"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                logger.warning("%s:%d: malformed benchmark record, skipped", path, lineno)
                continue
            if lang not in lang_set or not correct:
                logger.warning("%s:%d: benchmark record rejected (lang/names), skipped", path, lineno)
                continue
            records.append(
                BenchmarkRecord(
                    qid=qid,
                    lang=lang,
                    tier=tier,
                    correct_names=correct,
                    incorrect_names=tuple(rec.get("incorrect_names") or ()),
                    gold_description=rec.get("gold_description"),
                )
            )
    return records


def apply_benchmark_tiers(graph: KnowledgeGraph, records: Iterable[BenchmarkRecord]) -> int:
    """Assign popularity tiers from benchmark metadata; first assignment wins."""
    assigned = 0
    for rec in records:
        ent = graph.entity(rec.qid)
        if ent.tier is Tier.UNKNOWN:
            ent.tier = rec.tier
            assigned += 1
    return assigned


def iter_test_qids(records: Iterable[BenchmarkRecord]) -> Iterator[str]:
    for rec in records:
        yield rec.qid
