"""Command-line entry point wiring ingestion, corpus building and evaluation.

Every command is a pure function of its configuration: given identical
inputs and seeds, outputs are byte-identical, and manifests record counts
and seeds so large runs stay auditable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .backends import ProtocolError, TransportError, backend_from_spec
from .config import Config, ConfigError, load_config
from .dataset import MixConfig, build_training_file
from .ensemble import LanguageSlate, ensemble
from .evaluation import attach_external_scores, run_kgc_eval, run_kge_eval
from .linking import link
from .store import (
    IngestError,
    KnowledgeGraph,
    Triplet,
    apply_benchmark_tiers,
    read_benchmark,
)
from .verbalize import TargetSurface

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_INPUT = 2


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def _require_file(path, what: str) -> None:
    if path is None:
        raise ConfigError(f"no {what} path configured")
    if not Path(path).is_file():
        raise ConfigError(f"{what} file not found: {path}")


def _load_graph(cfg: Config) -> KnowledgeGraph:
    _require_file(cfg.snapshot, "snapshot")
    graph = KnowledgeGraph.load(cfg.snapshot)
    if not graph.frozen:
        graph.freeze()
    return graph


def _read_test_triplets(path) -> list[Triplet]:
    triplets = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                continue
            triplets.append(Triplet(*[p.strip() for p in parts]))
    return triplets


def _collect_test_qids(cfg: Config) -> set[str]:
    test_qids: set[str] = set()
    if cfg.benchmark:
        _require_file(cfg.benchmark, "benchmark")
        for rec in read_benchmark(cfg.benchmark, cfg.languages):
            test_qids.add(rec.qid)
    if cfg.test_triplets:
        _require_file(cfg.test_triplets, "test triplet")
        for t in _read_test_triplets(cfg.test_triplets):
            test_qids.add(t.head)
            test_qids.add(t.tail)
    return test_qids


def cmd_ingest(cfg: Config) -> int:
    _require_file(cfg.triplets, "triplet")
    _require_file(cfg.lexical, "lexical")
    graph = KnowledgeGraph(languages=cfg.languages)
    added_triplets = graph.ingest_triplets(cfg.triplets)
    added_lexical = graph.ingest_lexical(cfg.lexical)
    added_labels = 0
    if cfg.relation_labels:
        _require_file(cfg.relation_labels, "relation label")
        added_labels = graph.ingest_relation_labels(cfg.relation_labels)
    if cfg.benchmark:
        _require_file(cfg.benchmark, "benchmark")
        apply_benchmark_tiers(graph, read_benchmark(cfg.benchmark, cfg.languages))
    graph.freeze()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph.save(cfg.snapshot)
    manifest = dict(graph.stats())
    manifest.update(
        {
            "added_triplets": added_triplets,
            "added_lexical": added_lexical,
            "added_relation_labels": added_labels,
            "snapshot": str(cfg.snapshot),
        }
    )
    _dump_json(manifest, out_dir / "ingest_manifest.json")
    print(json.dumps(manifest, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def cmd_build_dataset(cfg: Config) -> int:
    graph = _load_graph(cfg)
    test_qids = _collect_test_qids(cfg)
    mix_cfg = MixConfig(
        kgc_fraction=cfg.kgc_fraction, seed=cfg.seed, directions=cfg.resolved_directions()
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = out_dir / "train.jsonl"
    manifest = build_training_file(graph, mix_cfg, train_path, test_qids)
    manifest["train_file"] = str(train_path)
    _dump_json(manifest, out_dir / "dataset_manifest.json")
    print(json.dumps(manifest, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def cmd_eval(cfg: Config, task: str, external_scores=None) -> int:
    graph = _load_graph(cfg)
    backend = backend_from_spec(cfg.backend, graph)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / f"eval_{task}_checkpoint.json"
    if task == "kgc":
        _require_file(cfg.test_triplets, "test triplet")
        triplets = _read_test_triplets(cfg.test_triplets)
        report = run_kgc_eval(
            triplets,
            backend,
            graph,
            languages=cfg.languages,
            k_list=cfg.k_list,
            num_candidates=cfg.num_candidates,
            src_lang=cfg.src_lang,
            top1_only=cfg.top1_ensemble,
            batch_size=cfg.batch_size,
            checkpoint_path=checkpoint,
        )
        table = report.render_table(["mrr"] + [f"hit@{k}" for k in cfg.k_list])
    else:
        _require_file(cfg.benchmark, "benchmark")
        records = read_benchmark(cfg.benchmark, cfg.languages)
        report = run_kge_eval(
            records,
            backend,
            graph,
            num_candidates=cfg.num_candidates,
            src_lang=cfg.src_lang,
            batch_size=cfg.batch_size,
            checkpoint_path=checkpoint,
        )
        if external_scores:
            _require_file(external_scores, "external score")
            attach_external_scores(report, external_scores, records)
        table = "".join(
            report.render_by_language(metric) + "\n"
            for metric in ("coverage_f1", "precision_f1", "bleu", "comet")
            if any(key[2] == metric for key in report.cells)
        )
    report.write_jsonl(out_dir / f"report_{task}.jsonl")
    with open(out_dir / f"report_{task}.txt", "w", encoding="utf-8") as fh:
        fh.write(table)
    print(table)
    return EXIT_OK


def cmd_link(cfg: Config, lang: str, name: str, desc=None) -> int:
    graph = _load_graph(cfg)
    result = link(TargetSurface(name, desc), lang, graph)
    if result is None:
        print(json.dumps({"qid": None}))
    else:
        print(json.dumps({"qid": result.qid, "sim": result.sim}))
    return EXIT_OK


def cmd_ensemble(cfg: Config, slates_path) -> int:
    _require_file(slates_path, "slate")
    slates = []
    with open(slates_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            slates.append(LanguageSlate(rec["lang"], tuple(rec["ranked"])))
    result = ensemble(slates, top1_only=cfg.top1_ensemble)
    for entry in result.ranked:
        print(
            json.dumps(
                {
                    "qid": entry.qid,
                    "votes": entry.votes,
                    "best_rank": entry.best_rank,
                    "rr_sum": entry.rr_sum,
                },
                ensure_ascii=False,
            )
        )
    return EXIT_OK


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", help="JSON config file")
    parser.add_argument("--languages", help="comma-separated language codes")
    parser.add_argument("--directions", help="comma-separated pairs like en>es,en>de")
    parser.add_argument("--include-en-en", dest="include_en_en", choices=["true", "false"])
    parser.add_argument("--kgc-fraction", dest="kgc_fraction", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--num-candidates", dest="num_candidates", type=int)
    parser.add_argument("--k-list", dest="k_list", help="comma-separated cutoffs, e.g. 1,3,10")
    parser.add_argument("--backend", help="oracle | static:PATH | remote:URL")
    parser.add_argument("--src-lang", dest="src_lang")
    parser.add_argument("--top1-ensemble", dest="top1_ensemble", choices=["true", "false"])
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--triplets")
    parser.add_argument("--lexical")
    parser.add_argument("--relation-labels", dest="relation_labels")
    parser.add_argument("--benchmark")
    parser.add_argument("--test-triplets", dest="test_triplets")
    parser.add_argument("--snapshot")
    parser.add_argument("--out-dir", dest="out_dir")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polykg",
        description="Multilingual knowledge graph completion and enhancement toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="build and snapshot the graph store")
    _add_override_flags(p_ingest)

    p_build = sub.add_parser("build-dataset", help="construct the mixed training file")
    _add_override_flags(p_build)

    p_eval = sub.add_parser("eval", help="run an evaluation")
    p_eval.add_argument("task", choices=["kgc", "kge"])
    p_eval.add_argument("--external-scores", dest="external_scores")
    _add_override_flags(p_eval)

    p_link = sub.add_parser("link", help="link one surface form (debugging)")
    p_link.add_argument("--lang", required=True)
    p_link.add_argument("--name", required=True)
    p_link.add_argument("--desc")
    _add_override_flags(p_link)

    p_ens = sub.add_parser("ensemble", help="fuse slates from a file (debugging)")
    p_ens.add_argument("--slates", required=True)
    _add_override_flags(p_ens)

    return parser


_OVERRIDE_KEYS = (
    "languages",
    "directions",
    "include_en_en",
    "kgc_fraction",
    "seed",
    "num_candidates",
    "k_list",
    "backend",
    "src_lang",
    "top1_ensemble",
    "batch_size",
    "triplets",
    "lexical",
    "relation_labels",
    "benchmark",
    "test_triplets",
    "snapshot",
    "out_dir",
)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("POLYKG_LOG", "WARNING"))
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {key: getattr(args, key, None) for key in _OVERRIDE_KEYS}
    try:
        cfg = load_config(args.config, overrides=overrides)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "build-dataset":
            return cmd_build_dataset(cfg)
        if args.command == "eval":
            return cmd_eval(cfg, args.task, external_scores=args.external_scores)
        if args.command == "link":
            return cmd_link(cfg, args.lang, args.name, args.desc)
        if args.command == "ensemble":
            return cmd_ensemble(cfg, args.slates)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, IngestError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except TransportError as exc:
        print(f"transport error: {exc} (checkpoint retained)", file=sys.stderr)
        return EXIT_INTERNAL
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
