"""Ranking, name-set and BLEU metrics.

Ranking follows the filtered protocol: other known-true tails are removed
from a candidate list before locating the gold answer, and a gold answer
missing from the list contributes a reciprocal rank of zero. Name metrics
match by normalized exact equality and are macro-averaged per entity.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .textnorm import normalize, tokenize


@dataclass(frozen=True)
class RankOutcome:
    """1-based rank of the gold answer, or None when it was not produced."""

    rank: Optional[int] = None

    def hit(self, k: int) -> bool:
        return self.rank is not None and self.rank <= k

    @property
    def reciprocal(self) -> float:
        return 0.0 if self.rank is None else 1.0 / self.rank


@dataclass(frozen=True)
class SetScore:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "SetScore":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(precision, recall, f1, tp, fp, fn)


def rank_of_gold(
    ranked_qids: Sequence[str], gold: str, filter_set: Iterable[str] = frozenset()
) -> RankOutcome:
    """Position of `gold` after dropping filtered entries from the ranking."""
    filter_set = frozenset(filter_set)
    if gold in filter_set:
        raise ValueError("the gold answer must not be part of the filter set")
    position = 0
    for qid in ranked_qids:
        if qid in filter_set:
            continue
        position += 1
        if qid == gold:
            return RankOutcome(position)
    return RankOutcome(None)


def hits_at_k(outcomes: Sequence[RankOutcome], k: int) -> float:
    if not outcomes:
        raise ValueError("hits@k is undefined for an empty outcome list")
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for o in outcomes if o.hit(k)) / len(outcomes)


def mrr(outcomes: Sequence[RankOutcome]) -> float:
    if not outcomes:
        raise ValueError("MRR is undefined for an empty outcome list")
    return sum(o.reciprocal for o in outcomes) / len(outcomes)


def coverage_score(
    pred_names: Iterable[str], gold_names: Iterable[str], lang: str
) -> SetScore:
    """Name-set overlap for one entity, matched by normalized exact equality."""
    gold_norm = {normalize(name, lang) for name in gold_names if name and name.strip()}
    if not gold_norm:
        raise ValueError("the gold name set must be non-empty")
    pred_norm = {normalize(name, lang) for name in pred_names if name and name.strip()}
    tp = len(pred_norm & gold_norm)
    fp = len(pred_norm - gold_norm)
    fn = len(gold_norm - pred_norm)
    return SetScore.from_counts(tp, fp, fn)


def precision_task_score(
    labeled: Sequence[tuple[str, bool]], system_names: Iterable[str], lang: str
) -> SetScore:
    """Classification quality on labeled names: a name is predicted correct
    iff its normalization appears in the system's name set."""
    if not labeled:
        raise ValueError("the labeled name list must be non-empty")
    system_norm = {normalize(name, lang) for name in system_names if name and name.strip()}
    tp = fp = fn = 0
    for name, is_correct in labeled:
        predicted = normalize(name, lang) in system_norm
        if predicted and is_correct:
            tp += 1
        elif predicted and not is_correct:
            fp += 1
        elif not predicted and is_correct:
            fn += 1
    return SetScore.from_counts(tp, fp, fn)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    pairs: Sequence[tuple[str, Sequence[str]]], max_n: int = 4, lang: str = "en"
) -> float:
    """Corpus BLEU on a 0-1 scale, without smoothing.

    Geometric mean of modified n-gram precisions times the brevity penalty.
    Orders for which the corpus has no possible n-grams at all (every
    candidate shorter than n) are excluded from the mean; an order with
    possible n-grams but zero matches makes the score zero. Reference
    length is the closest reference length per pair (ties to the shorter).
    """
    if not pairs:
        raise ValueError("BLEU is undefined for an empty corpus")
    matches = [0] * max_n
    possible = [0] * max_n
    cand_len = 0
    ref_len = 0
    for candidate, references in pairs:
        if not references:
            raise ValueError("every candidate needs at least one reference")
        cand_tokens = tokenize(candidate, lang)
        ref_token_lists = [tokenize(ref, lang) for ref in references]
        cand_len += len(cand_tokens)
        ref_len += min(
            (abs(len(toks) - len(cand_tokens)), len(toks)) for toks in ref_token_lists
        )[1]
        for n in range(1, max_n + 1):
            cand_ngrams = _ngram_counts(cand_tokens, n)
            total = sum(cand_ngrams.values())
            if total == 0:
                continue
            possible[n - 1] += total
            merged = Counter()
            for toks in ref_token_lists:
                merged |= _ngram_counts(toks, n)
            matches[n - 1] += sum((cand_ngrams & merged).values())
    orders = [i for i in range(max_n) if possible[i] > 0]
    if not orders or cand_len == 0 or ref_len == 0:
        return 0.0
    precisions = [matches[i] / possible[i] for i in orders]
    if min(precisions) == 0.0:
        return 0.0
    geo_mean = math.exp(sum(math.log(p) for p in precisions) / len(orders))
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return geo_mean * brevity
