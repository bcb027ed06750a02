"""Cross-lingual consolidation of linked predictions by vote count.

Each language contributes a ranked slate of entity IDs; the ensemble orders
entities by how many slates mention them, with deterministic tie-breaks
(best rank, then reciprocal-rank mass, then smallest qid). Reciprocal-rank
mass is accumulated exactly so the ordering is invariant under slate
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .store import qid_sort_key


@dataclass(frozen=True)
class LanguageSlate:
    lang: str
    ranked: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.ranked)) != len(self.ranked):
            raise ValueError(f"slate for {self.lang!r} contains duplicate qids")


@dataclass(frozen=True)
class EnsembleEntry:
    qid: str
    votes: int
    best_rank: int
    rr_sum: float


@dataclass(frozen=True)
class EnsembleResult:
    ranked: tuple[EnsembleEntry, ...]

    def qids(self) -> list[str]:
        return [entry.qid for entry in self.ranked]


def ensemble(slates: Sequence[LanguageSlate], top1_only: bool = False) -> EnsembleResult:
    """Fuse per-language slates into one ranked entity list.

    Ordering: votes desc, best rank asc, reciprocal-rank sum desc, qid asc.
    With `top1_only` every slate contributes only its first entry, for
    ablation against full-beam voting.
    """
    votes: dict[str, int] = {}
    best_rank: dict[str, int] = {}
    rr_sum: dict[str, Fraction] = {}
    for slate in slates:
        if len(set(slate.ranked)) != len(slate.ranked):
            raise ValueError(f"slate for {slate.lang!r} contains duplicate qids")
        items = slate.ranked[:1] if top1_only else slate.ranked
        for position, qid in enumerate(items, start=1):
            votes[qid] = votes.get(qid, 0) + 1
            if qid not in best_rank or position < best_rank[qid]:
                best_rank[qid] = position
            rr_sum[qid] = rr_sum.get(qid, Fraction(0)) + Fraction(1, position)
    order = sorted(
        votes,
        key=lambda qid: (-votes[qid], best_rank[qid], -rr_sum[qid], qid_sort_key(qid)),
    )
    entries = tuple(
        EnsembleEntry(qid, votes[qid], best_rank[qid], float(rr_sum[qid])) for qid in order
    )
    return EnsembleResult(entries)
