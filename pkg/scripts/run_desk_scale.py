#!/usr/bin/env python3
"""Desk-scale preset: n=4, S=20000, depths 1-3 for one family, all pipelines,
with figures rendered when chm-figures is installed.

    python scripts/run_desk_scale.py --seed 7 --out results/desk [--family yzy-ent]
"""

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from chm.pipelines import ExperimentConfig, run_pipelines


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", default="results/desk")
    parser.add_argument("--family", default="yzy-ent",
                        choices=("yzy-noent", "yzy-ent", "circuit16", "circuit17"))
    parser.add_argument("--encoder", default="x", choices=("x", "y"))
    parser.add_argument("--depths", default="1,2,3")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    depths = tuple(int(d) for d in args.depths.split(","))
    config = ExperimentConfig(
        pipeline="all", family=args.family, encoder=args.encoder, n=4, L=1,
        depths=depths, seed=args.seed, samples=20000, hamming=3,
        threads=args.threads, out=args.out,
    )
    run_pipelines(config)
    print(f"reports written to {args.out}/")

    if shutil.which("chm-fig") is None:
        print("chm-figures not installed; skipping figure rendering")
        return 0
    out = Path(args.out)
    jobs = [
        ("variance-profile", ["variance_report.json"], "variance_profiles.png"),
        ("corr-heatmap", ["correlation_report.json"], "correlation_heatmaps.png"),
        ("qntk-heatmap", ["qntk_report.json"], "qntk_heatmaps.png"),
        ("offdiag-vs-depth", ["correlation_report.json"], "offdiag_vs_depth.png"),
    ]
    for kind, inputs, name in jobs:
        cmd = ["chm-fig", "render", "--kind", kind, "--out", str(out / "figures" / name)]
        for inp in inputs:
            cmd += ["--in", str(out / inp)]
        subprocess.run(cmd, check=True)
    print(f"figures written to {out / 'figures'}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
