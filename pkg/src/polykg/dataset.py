"""Training-corpus construction: enumerate, decontaminate, mix, write.

Two record streams come out of a frozen graph: textual records (names,
aliases, descriptions across language pairs) and relational records (tail
prediction across language pairs). Mixing keeps all textual records plus a
seeded uniform sample of the relational ones, so sweeps over the mixing
fraction are exactly reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .store import KnowledgeGraph
from .verbalize import (
    TaskKind,
    TaskTuple,
    VerbalizationError,
    serialize_input,
    serialize_target,
    task_tuple_for_entity,
)


@dataclass(frozen=True)
class TrainingRecord:
    input_text: str
    target_text: str
    tgt_lang: str
    task: TaskKind
    head_qid: str
    tail_qid: Optional[str] = None


@dataclass(frozen=True)
class MixConfig:
    kgc_fraction: float
    seed: int
    directions: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not 0.0 <= self.kgc_fraction <= 1.0:
            raise ValueError(f"kgc_fraction must be within [0, 1], got {self.kgc_fraction}")
        if not self.directions:
            raise ValueError("at least one (src, tgt) direction is required")


def default_directions(languages: Sequence[str], include_en_en: bool = True) -> tuple[tuple[str, str], ...]:
    """EN->XX for every configured language, optionally including EN->EN."""
    out = []
    for lang in languages:
        if lang == "en" and not include_en_en:
            continue
        out.append(("en", lang))
    return tuple(out)


def build_kge(graph: KnowledgeGraph, directions: Sequence[tuple[str, str]]) -> Iterator[TrainingRecord]:
    """Textual records: one name record per target name (primary, then each
    alias) and one description record when the target description exists.

    Entities lacking either side of a direction are skipped silently.
    """
    for qid, entity in graph.entities.items():
        for src, tgt in directions:
            src_lex = entity.lex.get(src)
            tgt_lex = entity.lex.get(tgt)
            if src_lex is None or tgt_lex is None:
                continue
            try:
                name_input = serialize_input(
                    task_tuple_for_entity(TaskKind.KGE_NAME, src, tgt, entity), graph
                )
            except VerbalizationError:
                continue
            yield TrainingRecord(name_input, tgt_lex.primary_name, tgt, TaskKind.KGE_NAME, qid)
            for alias in tgt_lex.aliases:
                yield TrainingRecord(name_input, alias, tgt, TaskKind.KGE_NAME, qid)
            if tgt_lex.description:
                try:
                    desc_input = serialize_input(
                        task_tuple_for_entity(TaskKind.KGE_DESCRIPTION, src, tgt, entity), graph
                    )
                except VerbalizationError:
                    continue
                yield TrainingRecord(
                    desc_input, tgt_lex.description, tgt, TaskKind.KGE_DESCRIPTION, qid
                )


def build_kgc(graph: KnowledgeGraph, directions: Sequence[tuple[str, str]]) -> Iterator[TrainingRecord]:
    """Relational records: per triplet and direction, the head verbalized in
    the source language and the tail surface in the target language.

    Triplets missing either lexicalization are skipped.
    """
    for triplet in graph.triplets:
        head = graph.entities[triplet.head]
        tail = graph.entities[triplet.tail]
        for src, tgt in directions:
            if src not in head.lex or tgt not in tail.lex:
                continue
            try:
                input_text = serialize_input(
                    task_tuple_for_entity(TaskKind.KGC_TAIL, src, tgt, head, rel_pid=triplet.rel),
                    graph,
                )
                target_text = serialize_target(tail, tgt)
            except VerbalizationError:
                continue
            yield TrainingRecord(
                input_text, target_text, tgt, TaskKind.KGC_TAIL, triplet.head, triplet.tail
            )


class ContaminationFilter:
    """Streaming head/tail ID filter; `dropped` is valid after consumption."""

    def __init__(self, test_qids: Iterable[str]):
        self.test_qids = frozenset(test_qids)
        self.dropped = 0

    def __call__(self, records: Iterable[TrainingRecord]) -> Iterator[TrainingRecord]:
        for record in records:
            if record.head_qid in self.test_qids or (
                record.tail_qid is not None and record.tail_qid in self.test_qids
            ):
                self.dropped += 1
                continue
            yield record


def filter_contamination(
    records: Iterable[TrainingRecord], test_qids: Iterable[str]
) -> tuple[list[TrainingRecord], int]:
    """Eager variant: returns (kept records, dropped count)."""
    filt = ContaminationFilter(test_qids)
    kept = list(filt(records))
    return kept, filt.dropped


def mix(
    kgc_records: Iterable[TrainingRecord],
    kge_records: Iterable[TrainingRecord],
    cfg: MixConfig,
) -> list[TrainingRecord]:
    """Keep all textual records plus round(fraction * n) sampled relational
    ones, then shuffle the union. Fully deterministic for a given seed."""
    kgc = list(kgc_records)
    kge = list(kge_records)
    rng = random.Random(cfg.seed)
    sample_size = int(round(cfg.kgc_fraction * len(kgc)))
    rng.shuffle(kgc)
    combined = kgc[:sample_size] + kge
    rng.shuffle(combined)
    return combined


def write_training_file(records: Iterable[TrainingRecord], path) -> int:
    """Stream records to a line-delimited file; returns the record count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            line = json.dumps(
                {
                    "input": record.input_text,
                    "target": record.target_text,
                    "tgt_lang": record.tgt_lang,
                    "task": record.task.value,
                },
                ensure_ascii=False,
            )
            fh.write(line + "\n")
            n += 1
    return n


def stream_kgc_corpus(
    graph: KnowledgeGraph,
    directions: Sequence[tuple[str, str]],
    path,
    test_qids: Iterable[str] = frozenset(),
) -> tuple[int, int]:
    """Decontaminate and write the relational corpus without materializing it.

    This is the path for dump-scale corpora; returns (written, dropped).
    """
    filt = ContaminationFilter(test_qids)
    written = write_training_file(filt(build_kgc(graph, directions)), path)
    return written, filt.dropped


def build_training_file(
    graph: KnowledgeGraph,
    cfg: MixConfig,
    path,
    test_qids: Iterable[str] = frozenset(),
) -> dict:
    """Full pipeline behind one call; returns the sidecar manifest."""
    kgc_kept, kgc_dropped = filter_contamination(build_kgc(graph, cfg.directions), test_qids)
    kge_kept, kge_dropped = filter_contamination(build_kge(graph, cfg.directions), test_qids)
    mixed = mix(kgc_kept, kge_kept, cfg)
    written = write_training_file(mixed, path)
    return {
        "records_written": written,
        "kge_records": len(kge_kept),
        "kgc_records_available": len(kgc_kept),
        "kgc_records_kept": written - len(kge_kept),
        "dropped_contamination": kgc_dropped + kge_dropped,
        "kgc_fraction": cfg.kgc_fraction,
        "seed": cfg.seed,
        "directions": [list(d) for d in cfg.directions],
    }
