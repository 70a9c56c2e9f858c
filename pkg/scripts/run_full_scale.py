#!/usr/bin/env python3
"""Full-scale protocol: n=6, L=1, depths 1-5, S=100096, n_x 128/126, h=3
(depth-1 runs saturate h under the column cap).  Hours of compute; intended
for reproducing the full experiments rather than CI.

    python scripts/run_full_scale.py --seed 7 --out results/full --family yzy-ent --encoder x
"""

import argparse
import sys

from chm.pipelines import ExperimentConfig, run_pipelines


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", default="results/full")
    parser.add_argument("--family", default="yzy-ent",
                        choices=("yzy-noent", "yzy-ent", "circuit16", "circuit17"))
    parser.add_argument("--encoder", default="x", choices=("x", "y"))
    parser.add_argument("--pipeline", default="all",
                        choices=("variance", "correlation", "qntk", "all"))
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    config = ExperimentConfig(
        pipeline=args.pipeline, family=args.family, encoder=args.encoder,
        n=6, L=1, depths=(1, 2, 3, 4, 5), seed=args.seed, samples=100096,
        hamming=3, threads=args.threads, out=args.out,
    )
    run_pipelines(config)
    print(f"reports written to {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
