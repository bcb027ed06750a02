#!/usr/bin/env python3
"""Generate synthetic triplet and lexical files for scale experiments."""

import argparse
from pathlib import Path

from polykg.synthdata import write_synthetic_lexical, write_synthetic_triplets


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="synthetic", help="output directory")
    parser.add_argument("--triplets", type=int, default=1_000_000)
    parser.add_argument("--entities", type=int, default=50_000)
    parser.add_argument("--relations", type=int, default=100)
    parser.add_argument("--languages", default="en", help="comma-separated codes")
    parser.add_argument("--seed", type=int, default=4)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    triplet_path = out / "triplets.tsv"
    lexical_path = out / "lexical.jsonl"
    write_synthetic_triplets(triplet_path, args.triplets, args.entities, args.relations, args.seed)
    write_synthetic_lexical(lexical_path, args.entities, langs=args.languages.split(","))
    print(f"wrote {triplet_path} ({args.triplets} triplets)")
    print(f"wrote {lexical_path} ({args.entities} entities per language)")


if __name__ == "__main__":
    main()
