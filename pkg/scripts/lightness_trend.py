#!/usr/bin/env python3
"""How lightness and sparsity grow with n at fixed edge density.

Runs the general-graph construction over a size ladder and prints one row
per (k, n) with means over the seed set. The interesting column is the
lightness ratio between consecutive sizes: flat-ish ratios mean the weight
overhead does not blow up with n.
"""

import argparse
import csv
import statistics
import sys

from lightspan.generate import random_connected_graph
from lightspan.pipeline import PipelineConfig, light_spanner_general


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--density", type=int, default=8, help="m = density * n")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--ks", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--csv", type=str, default=None, help="also write rows here")
    args = ap.parse_args()

    rows = []
    print(f"{'k':>3} {'n':>6} {'m':>7} {'lightness':>10} {'sparsity':>9} {'ratio':>7}")
    for k in args.ks:
        prev = None
        for n in args.sizes:
            m = min(args.density * n, n * (n - 1) // 2)
            light, sparse = [], []
            for seed in range(args.seeds):
                g = random_connected_graph(n, m, seed=seed)
                res = light_spanner_general(
                    g, PipelineConfig(mode="general", k=k, eps_user=args.epsilon, seed=seed)
                )
                light.append(res.stats["lightness"])
                sparse.append(res.stats["sparsity"])
            lm = statistics.mean(light)
            sm = statistics.mean(sparse)
            ratio = lm / prev if prev else float("nan")
            prev = lm
            print(f"{k:>3} {n:>6} {m:>7} {lm:>10.3f} {sm:>9.3f} {ratio:>7.3f}")
            rows.append(
                {"k": k, "n": n, "m": m, "lightness": lm, "sparsity": sm, "ratio": ratio}
            )

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
