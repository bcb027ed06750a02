"""Protocol conformance of the service against the toolkit client.

These tests drive the server exclusively through the primary toolkit's
remote backend, so they prove the two sides agree on the wire protocol.
"""

import json
import logging

import pytest

from polykg import (
    GenerationRequest,
    KnowledgeGraph,
    RemoteBackend,
    StaticBackend,
    Tier,
    generate,
    run_kge_eval,
)
from polykg.store import BenchmarkRecord
from polykg.verbalize import TaskKind, serialize_input, task_tuple_for_entity

from genserver import GenerationServer, ServerConfig


def test_echo_round_trip_thousand_requests(caplog):
    config = ServerConfig(mode="echo", port=0, max_batch=256)
    with GenerationServer(config) as server:
        backend = RemoteBackend(server.url, timeout=30, max_in_flight=4, retries=1)
        texts = [f"[en] Item {i} | related to | ?" for i in range(1000)]
        with caplog.at_level(logging.WARNING, logger="polykg.backends"):
            results = []
            for start in range(0, 1000, 200):
                batch = [
                    GenerationRequest(t, "de", 2) for t in texts[start : start + 200]
                ]
                results.extend(generate(batch, backend))
    assert len(results) == 1000
    for text, candidates in zip(texts, results):
        assert len(candidates) == 1
        assert candidates[0].text == text
        assert candidates[0].score == 0.0
    assert not caplog.records, "client logged protocol warnings"
    print("ACCEPTANCE PASS: echo round trip, 1000 requests, order preserved, no warnings")


def kge_eval_fixture(tmp_path):
    graph = KnowledgeGraph(languages=("en", "es"))
    graph.add_lexicalization("Q1", "en", "Alpha", description="first letter")
    graph.add_lexicalization("Q2", "en", "Beta", description="second letter")
    graph.freeze()
    records = [
        BenchmarkRecord("Q1", "es", Tier.HEAD, ("Alfa", "Alfita"), ("Mala",), "primera letra"),
        BenchmarkRecord("Q2", "es", Tier.TAIL, ("Beta2",), ("Malb",), "segunda letra"),
    ]
    entries = []
    for qid, names, desc in (
        ("Q1", ["Alfa", "Otra"], "primera letra"),
        ("Q2", ["Nada"], "otra cosa"),
    ):
        entity = graph.entities[qid]
        name_input = serialize_input(
            task_tuple_for_entity(TaskKind.KGE_NAME, "en", "es", entity), graph
        )
        desc_input = serialize_input(
            task_tuple_for_entity(TaskKind.KGE_DESCRIPTION, "en", "es", entity), graph
        )
        entries.append(
            {
                "input": name_input,
                "target_lang": "es",
                "candidates": [
                    {"text": n, "score": -float(i)} for i, n in enumerate(names, 1)
                ],
            }
        )
        entries.append(
            {
                "input": desc_input,
                "target_lang": "es",
                "candidates": [{"text": desc, "score": 0.0}],
            }
        )
    preds = tmp_path / "preds.jsonl"
    preds.write_text(
        "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in entries), encoding="utf-8"
    )
    return graph, records, preds


def test_lookup_matches_static_backend_bit_for_bit(tmp_path, caplog):
    graph, records, preds = kge_eval_fixture(tmp_path)

    static_report = run_kge_eval(records, StaticBackend.from_file(preds), graph)
    static_path = tmp_path / "report_static.jsonl"
    static_report.write_jsonl(static_path)

    config = ServerConfig(mode="lookup", mode_arg=str(preds), port=0)
    with GenerationServer(config) as server:
        backend = RemoteBackend(server.url, timeout=30, retries=1)
        with caplog.at_level(logging.WARNING, logger="polykg.backends"):
            remote_report = run_kge_eval(records, backend, graph)
    remote_path = tmp_path / "report_remote.jsonl"
    remote_report.write_jsonl(remote_path)

    assert not caplog.records, "client logged protocol warnings"
    assert static_path.read_bytes() == remote_path.read_bytes()
    print("ACCEPTANCE PASS: lookup evaluation bit-identical to the static backend")
