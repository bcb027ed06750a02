#!/usr/bin/env python3
"""Sweep the relational/textual mixing fraction over a snapshot.

Produces one training file per fraction plus a summary of record counts,
mirroring how mixing-proportion experiments are driven: each run is a pure
function of (snapshot, fraction, seed).
"""

import argparse
from pathlib import Path

from polykg import KnowledgeGraph, MixConfig
from polykg.dataset import build_training_file, default_directions

DEFAULT_GRID = (0.0, 0.01, 0.1, 0.2, 0.5, 1.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--snapshot", required=True)
    parser.add_argument("--out-dir", default="sweep")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument(
        "--fractions", default=",".join(str(f) for f in DEFAULT_GRID),
        help="comma-separated fractions in [0, 1]",
    )
    parser.add_argument("--include-en-en", action="store_true", default=True)
    args = parser.parse_args()

    graph = KnowledgeGraph.load(args.snapshot)
    if not graph.frozen:
        graph.freeze()
    directions = default_directions(graph.languages, include_en_en=args.include_en_en)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    print(f"{'fraction':>10} {'kgc_kept':>10} {'kge':>10} {'total':>10}")
    for fraction in (float(f) for f in args.fractions.split(",")):
        cfg = MixConfig(kgc_fraction=fraction, seed=args.seed, directions=directions)
        path = out / f"train_kgc{int(fraction * 100):03d}.jsonl"
        manifest = build_training_file(graph, cfg, path)
        print(
            f"{fraction:>10.2f} {manifest['kgc_records_kept']:>10} "
            f"{manifest['kge_records']:>10} {manifest['records_written']:>10}"
        )


if __name__ == "__main__":
    main()
