"""End-to-end evaluation runs and per-language / per-tier reporting.

A tail-prediction run verbalizes each test triplet once, requests
generations for every target language, parses and links the candidates,
fuses the per-language slates, and ranks the gold tail under the filtered
protocol. A textual-completion run scores generated names against curated
correct/incorrect name sets and collects description pairs for corpus BLEU.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .backends import Backend, GenerationRequest, TransportError, generate
from .ensemble import LanguageSlate, ensemble
from .linking import LinkedCandidate, link
from .metrics import RankOutcome, corpus_bleu, coverage_score, hits_at_k, mrr, precision_task_score, rank_of_gold
from .store import BenchmarkRecord, KnowledgeGraph, Tier, Triplet
from .verbalize import (
    OutputParseError,
    TaskKind,
    VerbalizationError,
    parse_output,
    serialize_input,
    task_tuple_for_entity,
)

logger = logging.getLogger(__name__)

ALL = "all"

REPORT_NOTES = [
    "name matching: normalized exact equality, macro-averaged per entity",
    "ranking: filtered protocol, reciprocal rank 0 when the gold answer is absent",
    "bleu: corpus-level per language on a 0-1 scale; 'all' rows average language scores",
]


@dataclass
class EvalReport:
    """Metric values addressed by (language, tier, metric), each with a count."""

    cells: dict[tuple[str, str, str], tuple[float, int]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=lambda: list(REPORT_NOTES))

    def set_cell(self, lang: str, tier: str, metric: str, value: float, count: int) -> None:
        self.cells[(lang, tier, metric)] = (float(value), int(count))

    def value(self, lang: str, tier: str, metric: str) -> Optional[float]:
        cell = self.cells.get((lang, tier, metric))
        return cell[0] if cell else None

    def count(self, lang: str, tier: str, metric: str) -> Optional[int]:
        cell = self.cells.get((lang, tier, metric))
        return cell[1] if cell else None

    def rows(self) -> list[dict]:
        out = []
        for (lang, tier, metric) in sorted(self.cells):
            value, count = self.cells[(lang, tier, metric)]
            out.append(
                {"language": lang, "tier": tier, "metric": metric, "value": value, "count": count}
            )
        return out

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for note in self.notes:
                fh.write(json.dumps({"note": note}, ensure_ascii=False) + "\n")
            for row in self.rows():
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")

    # -- rendering ------------------------------------------------------------

    def _axis(self, index: int) -> list[str]:
        seen: list[str] = []
        for key in sorted(self.cells):
            if key[index] not in seen:
                seen.append(key[index])
        # keep the aggregate first
        return sorted(seen, key=lambda v: (v != ALL, v))

    def render_table(self, metrics: Optional[Sequence[str]] = None) -> str:
        """Plain grid: one row per (language, tier), one column per metric."""
        if metrics is None:
            metrics = self._axis(2)
        header = ["language", "tier"] + list(metrics) + ["count"]
        lines = [" ".join(f"{h:>12}" for h in header)]
        for lang in self._axis(0):
            for tier in self._axis(1):
                values = [self.value(lang, tier, m) for m in metrics]
                if all(v is None for v in values):
                    continue
                counts = [self.count(lang, tier, m) for m in metrics]
                count = max(c for c in counts if c is not None)
                cells = [f"{lang:>12}", f"{tier:>12}"]
                cells += [f"{v:>12.4f}" if v is not None else f"{'-':>12}" for v in values]
                cells.append(f"{count:>12}")
                lines.append(" ".join(cells))
        for note in self.notes:
            lines.append(f"# {note}")
        return "\n".join(lines) + "\n"

    def render_by_language(self, metric: str) -> str:
        """One block for a metric: rows are tiers, columns are languages."""
        langs = [l for l in self._axis(0) if l != ALL]
        tiers = self._axis(1)
        lines = [metric]
        header = ["tier"] + langs + ["avg"]
        lines.append(" ".join(f"{h:>12}" for h in header))
        for tier in tiers:
            row = [f"{tier:>12}"]
            any_value = False
            for lang in langs:
                v = self.value(lang, tier, metric)
                any_value = any_value or v is not None
                row.append(f"{v:>12.4f}" if v is not None else f"{'-':>12}")
            avg = self.value(ALL, tier, metric)
            row.append(f"{avg:>12.4f}" if avg is not None else f"{'-':>12}")
            if any_value or avg is not None:
                lines.append(" ".join(row))
        return "\n".join(lines) + "\n"


def _checkpoint(path, payload: dict) -> None:
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
            fh.write("\n")
    except OSError:
        logger.exception("could not write progress checkpoint to %s", path)


def _chunked_generate(
    requests: list[GenerationRequest], backend: Backend, batch_size: int
) -> list:
    results = []
    for start in range(0, len(requests), batch_size):
        results.extend(generate(requests[start : start + batch_size], backend))
    return results


def _ranking_cells(report: EvalReport, cell_outcomes: dict, k_list: Sequence[int]) -> None:
    for (lang, tier), outcomes in sorted(cell_outcomes.items()):
        if not outcomes:
            continue
        report.set_cell(lang, tier, "mrr", mrr(outcomes), len(outcomes))
        for k in k_list:
            report.set_cell(lang, tier, f"hit@{k}", hits_at_k(outcomes, k), len(outcomes))


def run_kgc_eval(
    test_triplets: Sequence[Triplet],
    backend: Backend,
    graph: KnowledgeGraph,
    languages: Sequence[str],
    k_list: Sequence[int] = (1, 3, 10),
    num_candidates: int = 10,
    src_lang: str = "en",
    top1_only: bool = False,
    batch_size: int = 128,
    checkpoint_path=None,
) -> EvalReport:
    """Rank gold tails through the generate-parse-link-ensemble pipeline.

    The 'all' language rows hold the cross-lingual ensemble result; each
    language row holds that language's slate ranked on its own. Every test
    triplet is counted in every row, including ones that produced no
    linkable candidates.
    """
    graph._require_frozen()
    prepared: list[tuple[Triplet, Optional[str]]] = []
    for triplet in test_triplets:
        head = graph.entities.get(triplet.head)
        text = None
        if head is not None and src_lang in head.lex:
            try:
                tuple_ = task_tuple_for_entity(
                    TaskKind.KGC_TAIL, src_lang, src_lang, head, rel_pid=triplet.rel
                )
                text = serialize_input(tuple_, graph)
            except VerbalizationError:
                text = None
        prepared.append((triplet, text))

    slates: list[dict[str, LanguageSlate]] = [{} for _ in prepared]
    done_langs: list[str] = []
    for lang in languages:
        requests, owners = [], []
        for i, (_, text) in enumerate(prepared):
            if text is None:
                continue
            requests.append(GenerationRequest(text, lang, num_candidates))
            owners.append(i)
        if not requests:
            done_langs.append(lang)
            continue
        try:
            outputs = _chunked_generate(requests, backend, batch_size)
        except TransportError:
            _checkpoint(
                checkpoint_path,
                {
                    "task": "kgc",
                    "completed_languages": done_langs,
                    "failed_language": lang,
                    "slates": [
                        {l: list(s.ranked) for l, s in per_item.items()} for per_item in slates
                    ],
                },
            )
            raise
        for owner, candidates in zip(owners, outputs):
            linked: list[LinkedCandidate] = []
            seen: set[str] = set()
            for gen_rank, candidate in enumerate(candidates, start=1):
                try:
                    surface = parse_output(candidate.text)
                except OutputParseError:
                    continue
                hit = link(surface, lang, graph)
                if hit is not None and hit.qid not in seen:
                    seen.add(hit.qid)
                    linked.append(LinkedCandidate(hit.qid, lang, gen_rank, hit.sim))
            slates[owner][lang] = LanguageSlate(lang, tuple(c.qid for c in linked))
        done_langs.append(lang)

    cell_outcomes: dict[tuple[str, str], list[RankOutcome]] = {}

    def record(lang: str, tier: str, outcome: RankOutcome) -> None:
        cell_outcomes.setdefault((lang, tier), []).append(outcome)

    for (triplet, _), per_item in zip(prepared, slates):
        gold = triplet.tail
        filter_set = graph.known_tails(triplet.head, triplet.rel) - {gold}
        head = graph.entities.get(triplet.head)
        tier = head.tier.value if head is not None else Tier.UNKNOWN.value
        fused = ensemble(list(per_item.values()), top1_only=top1_only)
        outcome = rank_of_gold(fused.qids(), gold, filter_set)
        for t in (tier, ALL):
            record(ALL, t, outcome)
        for lang in languages:
            slate = per_item.get(lang)
            lang_outcome = rank_of_gold(slate.ranked if slate else (), gold, filter_set)
            for t in (tier, ALL):
                record(lang, t, lang_outcome)

    report = EvalReport()
    _ranking_cells(report, cell_outcomes, k_list)
    return report


def run_kge_eval(
    records: Sequence[BenchmarkRecord],
    backend: Backend,
    graph: KnowledgeGraph,
    num_candidates: int = 10,
    src_lang: str = "en",
    bleu_max_n: int = 4,
    batch_size: int = 128,
    checkpoint_path=None,
) -> EvalReport:
    """Score generated names and descriptions against benchmark records.

    Per record: name candidates feed the coverage and precision scores;
    the top description candidate is paired with the curated description
    for corpus BLEU. Records whose entity cannot be verbalized still count,
    with empty system output.
    """
    graph._require_frozen()

    def input_for(kind: TaskKind, rec: BenchmarkRecord) -> Optional[str]:
        entity = graph.entities.get(rec.qid)
        if entity is None or src_lang not in entity.lex:
            return None
        try:
            return serialize_input(task_tuple_for_entity(kind, src_lang, rec.lang, entity), graph)
        except VerbalizationError:
            return None

    name_requests, name_owners = [], []
    desc_requests, desc_owners = [], []
    for i, rec in enumerate(records):
        text = input_for(TaskKind.KGE_NAME, rec)
        if text is not None:
            name_requests.append(GenerationRequest(text, rec.lang, num_candidates))
            name_owners.append(i)
        if rec.gold_description:
            text = input_for(TaskKind.KGE_DESCRIPTION, rec)
            if text is not None:
                desc_requests.append(GenerationRequest(text, rec.lang, 1))
                desc_owners.append(i)

    try:
        name_outputs = _chunked_generate(name_requests, backend, batch_size) if name_requests else []
        desc_outputs = _chunked_generate(desc_requests, backend, batch_size) if desc_requests else []
    except TransportError:
        _checkpoint(checkpoint_path, {"task": "kge", "completed": 0})
        raise

    pred_names: dict[int, list[str]] = {}
    for owner, candidates in zip(name_owners, name_outputs):
        names: list[str] = []
        seen = set()
        for candidate in candidates:
            try:
                surface = parse_output(candidate.text)
            except OutputParseError:
                continue
            key = surface.name
            if key not in seen:
                seen.add(key)
                names.append(surface.name)
        pred_names[owner] = names

    pred_descs: dict[int, str] = {}
    for owner, candidates in zip(desc_owners, desc_outputs):
        pred_descs[owner] = candidates[0].text if candidates else ""

    coverage_f1s: dict[tuple[str, str], list[float]] = {}
    precision_f1s: dict[tuple[str, str], list[float]] = {}
    bleu_pairs: dict[tuple[str, str], list[tuple[str, list[str]]]] = {}

    def spread(rec: BenchmarkRecord) -> list[tuple[str, str]]:
        tier = rec.tier.value
        return [(rec.lang, tier), (rec.lang, ALL), (ALL, tier), (ALL, ALL)]

    for i, rec in enumerate(records):
        names = pred_names.get(i, [])
        cov = coverage_score(names, rec.correct_names, rec.lang)
        labeled = [(n, True) for n in rec.correct_names] + [(n, False) for n in rec.incorrect_names]
        prec = precision_task_score(labeled, names, rec.lang)
        for cell in spread(rec):
            coverage_f1s.setdefault(cell, []).append(cov.f1)
            precision_f1s.setdefault(cell, []).append(prec.f1)
        if rec.gold_description:
            pair = (pred_descs.get(i, ""), [rec.gold_description])
            for cell in spread(rec):
                bleu_pairs.setdefault(cell, []).append(pair)

    report = EvalReport()
    for name, per_cell in (("coverage_f1", coverage_f1s), ("precision_f1", precision_f1s)):
        for (lang, tier), scores in sorted(per_cell.items()):
            report.set_cell(lang, tier, name, sum(scores) / len(scores), len(scores))
    # per-language BLEU is a corpus score; aggregate rows average language scores
    lang_bleu: dict[tuple[str, str], float] = {}
    for (lang, tier), pairs in sorted(bleu_pairs.items()):
        if lang == ALL:
            continue
        lang_bleu[(lang, tier)] = corpus_bleu(pairs, max_n=bleu_max_n, lang=lang)
        report.set_cell(lang, tier, "bleu", lang_bleu[(lang, tier)], len(pairs))
    for (lang, tier), pairs in sorted(bleu_pairs.items()):
        if lang != ALL:
            continue
        values = [v for (l, t), v in lang_bleu.items() if t == tier]
        if values:
            report.set_cell(ALL, tier, "bleu", sum(values) / len(values), len(pairs))
    return report


def attach_external_scores(
    report: EvalReport,
    path,
    records: Sequence[BenchmarkRecord],
    metric: str = "comet",
) -> int:
    """Merge a line-delimited `{qid, lang, score}` file into the report.

    The toolkit never computes these scores itself; this hook exists so
    externally computed quality scores can share the report format.
    """
    tier_of = {(rec.qid, rec.lang): rec.tier.value for rec in records}
    per_cell: dict[tuple[str, str], list[float]] = {}
    merged = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            key = (rec["qid"], rec["lang"])
            if key not in tier_of:
                continue
            score = float(rec["score"])
            tier = tier_of[key]
            for cell in ((rec["lang"], tier), (rec["lang"], ALL), (ALL, tier), (ALL, ALL)):
                per_cell.setdefault(cell, []).append(score)
            merged += 1
    for (lang, tier), scores in sorted(per_cell.items()):
        report.set_cell(lang, tier, metric, sum(scores) / len(scores), len(scores))
    return merged
