import json

import pytest

from polykg import (
    GenerationCandidate,
    KnowledgeGraph,
    OracleBackend,
    StaticBackend,
    TaskKind,
    Tier,
    TransportError,
    run_kgc_eval,
    run_kge_eval,
    serialize_input,
)
from polykg.evaluation import ALL, EvalReport, attach_external_scores
from polykg.store import BenchmarkRecord
from polykg.synthdata import demo_benchmark, demo_graph
from polykg.verbalize import task_tuple_for_entity


def rank_graph():
    """Five facts H1..H5 -P1-> T1..T5 plus two distractor entities."""
    g = KnowledgeGraph(languages=("en",))
    g.add_relation_labels("P1", {"en": "points at"})
    for i in range(1, 6):
        g.add_lexicalization(f"Q{i}", "en", f"Head {i}")
        g.add_lexicalization(f"Q{i + 10}", "en", f"Target {i}")
        g.add_triplet(f"Q{i}", "P1", f"Q{i + 10}")
    g.add_lexicalization("Q100", "en", "Distractor X")
    g.add_lexicalization("Q101", "en", "Distractor Y")
    g.freeze()
    return g


def kgc_request_text(g, head_qid):
    t = task_tuple_for_entity(TaskKind.KGC_TAIL, "en", "en", g.entities[head_qid], rel_pid="P1")
    return serialize_input(t, g)


class TestRunKgcEval:
    def test_oracle_is_perfect(self):
        g = demo_graph()
        report = run_kgc_eval(g.triplets, OracleBackend(g), g, languages=("en", "es", "de"))
        assert report.value(ALL, ALL, "mrr") == 1.0
        assert report.value(ALL, ALL, "hit@1") == 1.0
        assert report.count(ALL, ALL, "mrr") == len(g.triplets)

    def test_static_gold_at_position_three(self):
        g = rank_graph()
        entries = {}
        for i in range(1, 6):
            entries[(kgc_request_text(g, f"Q{i}"), "en")] = [
                GenerationCandidate("Distractor X", -1.0),
                GenerationCandidate("Distractor Y", -2.0),
                GenerationCandidate(f"Target {i}", -3.0),
            ]
        report = run_kgc_eval(g.triplets, StaticBackend(entries), g, languages=("en",))
        assert report.value(ALL, ALL, "hit@3") == 1.0
        assert report.value(ALL, ALL, "hit@1") == 0.0

    def test_hand_computed_fixture(self):
        # gold ranks per fact: 1, 2, 3, absent, 1
        g = rank_graph()
        gold_positions = {1: 1, 2: 2, 3: 3, 4: None, 5: 1}
        entries = {}
        for i, pos in gold_positions.items():
            distractors = ["Distractor X", "Distractor Y"]
            if pos is None:
                texts = distractors[:1]
            else:
                texts = distractors[: pos - 1] + [f"Target {i}"] + distractors[pos - 1 :]
            entries[(kgc_request_text(g, f"Q{i}"), "en")] = [
                GenerationCandidate(t, -float(r)) for r, t in enumerate(texts, 1)
            ]
        report = run_kgc_eval(g.triplets, StaticBackend(entries), g, languages=("en",))
        expected_mrr = (1 + 1 / 2 + 1 / 3 + 0 + 1) / 5
        assert report.value(ALL, ALL, "mrr") == pytest.approx(expected_mrr, abs=1e-15)
        assert report.value(ALL, ALL, "hit@1") == pytest.approx(2 / 5)
        assert report.value(ALL, ALL, "hit@3") == pytest.approx(4 / 5)
        assert report.value(ALL, ALL, "hit@10") == pytest.approx(4 / 5)

    def test_filtering_removes_other_gold_tails(self):
        g = KnowledgeGraph(languages=("en",))
        g.add_relation_labels("P1", {"en": "points at"})
        g.add_lexicalization("Q1", "en", "Head")
        g.add_lexicalization("Q2", "en", "First")
        g.add_lexicalization("Q3", "en", "Second")
        g.add_triplet("Q1", "P1", "Q2")
        g.add_triplet("Q1", "P1", "Q3")
        g.freeze()
        # the oracle ranks Q2 before Q3, yet filtering gives Q3 rank 1 as well
        report = run_kgc_eval(g.triplets, OracleBackend(g), g, languages=("en",))
        assert report.value(ALL, ALL, "mrr") == 1.0

    def test_counts_include_unanswerable_items(self):
        g = rank_graph()
        report = run_kgc_eval(g.triplets, StaticBackend({}), g, languages=("en",))
        assert report.count(ALL, ALL, "mrr") == 5
        assert report.value(ALL, ALL, "mrr") == 0.0

    def test_transport_error_writes_checkpoint(self, tmp_path):
        class FailingBackend(StaticBackend):
            def generate(self, batch):
                raise TransportError("boom", list(range(len(batch))))

        g = rank_graph()
        checkpoint = tmp_path / "ckpt.json"
        with pytest.raises(TransportError):
            run_kgc_eval(
                g.triplets,
                FailingBackend({}),
                g,
                languages=("en",),
                checkpoint_path=checkpoint,
            )
        assert checkpoint.is_file()
        assert json.loads(checkpoint.read_text())["task"] == "kgc"


def kge_fixture():
    """Three entities with controlled coverage/precision outcomes."""
    g = KnowledgeGraph(languages=("en", "es"))
    g.add_lexicalization("Q1", "en", "Alpha", description="first letter")
    g.add_lexicalization("Q2", "en", "Beta", description="second letter")
    g.add_lexicalization("Q3", "en", "Gamma", description="third letter")
    g.freeze()
    records = [
        BenchmarkRecord("Q1", "es", Tier.HEAD, ("Alfa",), ("Mala",), "primera letra"),
        BenchmarkRecord("Q2", "es", Tier.TORSO, ("Beta2", "Beta3"), ("Malb",), "segunda letra"),
        BenchmarkRecord("Q3", "es", Tier.TAIL, ("Gama",), ("Malc",), "tercera letra"),
    ]
    return g, records


def kge_entries(g, predictions, descriptions):
    entries = {}
    for qid, names in predictions.items():
        t = task_tuple_for_entity(TaskKind.KGE_NAME, "en", "es", g.entities[qid])
        entries[(serialize_input(t, g), "es")] = [
            GenerationCandidate(n, -float(i)) for i, n in enumerate(names, 1)
        ]
    for qid, desc in descriptions.items():
        t = task_tuple_for_entity(TaskKind.KGE_DESCRIPTION, "en", "es", g.entities[qid])
        entries[(serialize_input(t, g), "es")] = [GenerationCandidate(desc, 0.0)]
    return entries


class TestRunKgeEval:
    def test_oracle_coverage_is_one(self):
        g = demo_graph()
        records = demo_benchmark(g)
        report = run_kge_eval(records, OracleBackend(g), g)
        assert report.value(ALL, ALL, "coverage_f1") == 1.0
        assert report.value(ALL, ALL, "precision_f1") == 1.0
        assert report.value(ALL, ALL, "bleu") == pytest.approx(1.0)

    def test_empty_output_scores_zero(self):
        g, records = kge_fixture()
        report = run_kge_eval(records, StaticBackend({}), g)
        assert report.value(ALL, ALL, "coverage_f1") == 0.0

    def test_hand_computed_macro_means(self):
        g, records = kge_fixture()
        # per entity coverage f1: Q1 exact match -> 1; Q2 one of two -> 2/3; Q3 miss -> 0
        predictions = {"Q1": ["Alfa"], "Q2": ["Beta2"], "Q3": ["zzz"]}
        descriptions = {"Q1": "primera letra", "Q2": "segunda letra", "Q3": "tercera letra"}
        backend = StaticBackend(kge_entries(g, predictions, descriptions))
        report = run_kge_eval(records, backend, g)
        expected = (1 + 2 / 3 + 0) / 3
        assert report.value(ALL, ALL, "coverage_f1") == pytest.approx(expected, abs=1e-15)
        # precision task: Q1 f1=1; Q2 tp=1 fn=1 -> 2/3; Q3 -> 0
        assert report.value(ALL, ALL, "precision_f1") == pytest.approx(expected, abs=1e-15)
        # per-tier cells hold the single matching entity each
        assert report.value("es", Tier.HEAD.value, "coverage_f1") == 1.0
        assert report.value("es", Tier.TORSO.value, "coverage_f1") == pytest.approx(2 / 3)
        assert report.value("es", Tier.TAIL.value, "coverage_f1") == 0.0
        # descriptions reproduced exactly -> corpus BLEU 1.0
        assert report.value("es", ALL, "bleu") == pytest.approx(1.0)

    def test_counts_sum_to_records(self):
        g, records = kge_fixture()
        report = run_kge_eval(records, StaticBackend({}), g)
        tier_counts = [
            report.count("es", t, "coverage_f1") for t in ("head", "torso", "tail")
        ]
        assert sum(tier_counts) == report.count(ALL, ALL, "coverage_f1") == len(records)


class TestEvalReport:
    def test_jsonl_round_trip(self, tmp_path):
        report = EvalReport()
        report.set_cell("en", "head", "mrr", 0.5, 10)
        path = tmp_path / "report.jsonl"
        report.write_jsonl(path)
        rows = [json.loads(l) for l in path.read_text().splitlines() if "note" not in l]
        assert rows == [
            {"language": "en", "tier": "head", "metric": "mrr", "value": 0.5, "count": 10}
        ]

    def test_render_table_contains_cells(self):
        report = EvalReport()
        report.set_cell(ALL, ALL, "mrr", 1.0, 15)
        text = report.render_table(["mrr"])
        assert "mrr" in text and "1.0000" in text

    def test_render_by_language(self):
        report = EvalReport()
        report.set_cell("en", "head", "coverage_f1", 0.25, 4)
        report.set_cell(ALL, "head", "coverage_f1", 0.25, 4)
        text = report.render_by_language("coverage_f1")
        assert "0.2500" in text

    def test_attach_external_scores(self, tmp_path):
        g, records = kge_fixture()
        report = EvalReport()
        path = tmp_path / "scores.jsonl"
        lines = [
            {"qid": "Q1", "lang": "es", "score": 0.6},
            {"qid": "Q2", "lang": "es", "score": 0.8},
            {"qid": "Q9", "lang": "es", "score": 0.1},
        ]
        path.write_text("".join(json.dumps(l) + "\n" for l in lines))
        merged = attach_external_scores(report, path, records)
        assert merged == 2
        assert report.value(ALL, ALL, "comet") == pytest.approx(0.7)
        assert report.value("es", "head", "comet") == pytest.approx(0.6)
