"""Synthetic and demo data generators for tests, benchmarks and smoke runs."""

from __future__ import annotations

import random
from typing import Sequence

from .store import BenchmarkRecord, KnowledgeGraph, Tier

_TIER_CYCLE = (Tier.HEAD, Tier.TORSO, Tier.TAIL)


def write_synthetic_triplets(
    path, n_triplets: int, n_entities: int, n_relations: int, seed: int = 0
) -> None:
    """Random `head<TAB>rel<TAB>tail` lines over Q1..Qn and P1..Pm pools."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for _ in range(n_triplets):
            head = rng.randrange(1, n_entities + 1)
            tail = rng.randrange(1, n_entities + 1)
            rel = rng.randrange(1, n_relations + 1)
            fh.write(f"Q{head}\tP{rel}\tQ{tail}\n")


def write_synthetic_lexical(path, n_entities: int, langs: Sequence[str] = ("en",)) -> None:
    """Unique names and short descriptions for Q1..Qn in each language."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for i in range(1, n_entities + 1):
            for lang in langs:
                rec = {
                    "qid": f"Q{i}",
                    "lang": lang,
                    "name": f"entity {i} {lang}",
                    "aliases": [f"e{i}-{lang}"],
                    "description": f"synthetic item number {i} in {lang}",
                }
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


_NAME_STEMS = {
    "en": ("Widget", "widget number"),
    "es": ("Artilugio", "artilugio número"),
    "de": ("Gerät", "Gerät Nummer"),
}

_PLACE_STEMS = {
    "en": ("Region", "region number"),
    "es": ("Región", "región número"),
    "de": ("Gebiet", "Gebiet Nummer"),
}

_REL_LABELS = {
    "P10": {"en": "located in", "es": "ubicado en", "de": "gelegen in"},
    "P20": {"en": "member of", "es": "miembro de", "de": "Mitglied von"},
}


def demo_graph(
    languages: Sequence[str] = ("en", "es", "de"), n_items: int = 15, n_places: int = 5
) -> KnowledgeGraph:
    """A small fully-lexicalized graph: items located in / member of places.

    Every entity has a unique primary name, one alias and a description in
    each language, so oracle evaluation over it is exact.
    """
    graph = KnowledgeGraph(languages=languages)
    for pid, labels in _REL_LABELS.items():
        graph.add_relation_labels(pid, {l: s for l, s in labels.items() if l in languages})

    def add_entity(qid: str, stems, index: int, tier: Tier) -> None:
        for lang in languages:
            name_stem, desc_stem = stems[lang]
            graph.add_lexicalization(
                qid,
                lang,
                f"{name_stem} {index}",
                aliases=[f"{name_stem[:1]}{index}-{lang}"],
                description=f"{desc_stem} {index}",
            )
        graph.set_tier(qid, tier)

    for j in range(n_places):
        add_entity(f"Q9{j:02d}", _PLACE_STEMS, j, _TIER_CYCLE[j % 3])
    for i in range(n_items):
        add_entity(f"Q{i + 1}", _NAME_STEMS, i, _TIER_CYCLE[i % 3])
        graph.add_triplet(f"Q{i + 1}", "P10", f"Q9{i % n_places:02d}")
        if i % 2 == 0:
            graph.add_triplet(f"Q{i + 1}", "P20", f"Q9{(i + 1) % n_places:02d}")
    graph.freeze()
    return graph


def demo_benchmark(graph: KnowledgeGraph, languages: Sequence[str] = ("en", "es", "de")) -> list[BenchmarkRecord]:
    """Benchmark records whose gold names equal the graph's lexicalizations."""
    records = []
    for qid in sorted(graph.entities):
        entity = graph.entities[qid]
        for lang in languages:
            lex = entity.lex.get(lang)
            if lex is None:
                continue
            records.append(
                BenchmarkRecord(
                    qid=qid,
                    lang=lang,
                    tier=entity.tier if entity.tier is not Tier.UNKNOWN else Tier.TAIL,
                    correct_names=lex.names(),
                    incorrect_names=(f"not {lex.primary_name}",),
                    gold_description=lex.description,
                )
            )
    return records
