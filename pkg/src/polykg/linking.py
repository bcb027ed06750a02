"""Map generated surfaces back to entity IDs, breaking name ties with descriptions.

Closed-world: a surface whose name matches nothing in the graph is dropped,
never minted as a new entity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .store import TIER_ORDER, KnowledgeGraph, qid_sort_key
from .textnorm import tokenize
from .verbalize import TargetSurface


@dataclass(frozen=True)
class LinkResult:
    qid: str
    sim: float


@dataclass(frozen=True)
class LinkedCandidate:
    """A link decision in context: which language and generation rank produced it."""

    qid: str
    source_lang: str
    gen_rank: int
    sim: float


def desc_sim(a: Optional[str], b: Optional[str], lang: str) -> float:
    """Token-multiset F1 overlap of two descriptions, 0 when either is absent.

    Deliberately embedding-free: deterministic, dependency-free, and enough
    to separate same-name entities with different descriptions.
    """
    if not a or not b:
        return 0.0
    ta = Counter(tokenize(a, lang))
    tb = Counter(tokenize(b, lang))
    if not ta or not tb:
        return 0.0
    overlap = sum((ta & tb).values())
    if overlap == 0:
        return 0.0
    precision = overlap / sum(ta.values())
    recall = overlap / sum(tb.values())
    return 2 * precision * recall / (precision + recall)


def _entity_description(entity, lang: str) -> Optional[str]:
    # target-language description, falling back to English, then nothing
    lex = entity.lex.get(lang)
    if lex is not None and lex.description:
        return lex.description
    lex_en = entity.lex.get("en")
    if lex_en is not None and lex_en.description:
        return lex_en.description
    return None


def link(surface: TargetSurface, lang: str, graph: KnowledgeGraph) -> Optional[LinkResult]:
    """Resolve a surface to a qid, or None when the name is unknown.

    A unique name match wins outright with similarity 1.0. Ambiguous names
    are ranked by description similarity, then popularity tier, then
    numerically smallest qid, so the result is fully deterministic.
    """
    candidates = graph.lookup_name(lang, surface.name)
    if not candidates:
        return None
    if len(candidates) == 1:
        return LinkResult(next(iter(candidates)), 1.0)
    best = None
    for qid in candidates:
        entity = graph.entities[qid]
        sim = desc_sim(surface.description, _entity_description(entity, lang), lang)
        key = (-sim, TIER_ORDER[entity.tier], qid_sort_key(qid))
        if best is None or key < best[0]:
            best = (key, qid, sim)
    return LinkResult(best[1], best[2])
