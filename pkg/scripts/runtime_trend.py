#!/usr/bin/env python3
"""Wall-clock scaling of the general-graph construction.

Doubles m at fixed density n = m/4 and prints the per-stage timing split
from the pipeline stats plus the ratio between consecutive sizes. Ratios
near 2 mean near-linear behavior in the input size.
"""

import argparse
import statistics
import time

from lightspan.generate import random_connected_graph
from lightspan.pipeline import PipelineConfig, light_spanner_general


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=int, default=10_000, help="smallest m")
    ap.add_argument("--doublings", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--epsilon", type=float, default=0.25)
    args = ap.parse_args()

    stages = ("mst", "leveling", "hierarchy", "ssa", "verify")
    print(f"{'m':>8} {'n':>7} {'total_s':>8} {'ratio':>6}  " + " ".join(f"{s:>9}" for s in stages))
    prev = None
    for step in range(args.doublings):
        m = args.start * 2**step
        n = m // 4
        totals, splits = [], {s: [] for s in stages}
        for seed in range(args.seeds):
            g = random_connected_graph(n, m, seed=seed)
            t0 = time.perf_counter()
            res = light_spanner_general(
                g, PipelineConfig(mode="general", k=2, eps_user=args.epsilon, seed=seed)
            )
            totals.append(time.perf_counter() - t0)
            for s in stages:
                splits[s].append(res.stats["timings_ms"].get(s, 0.0) / 1000.0)
        med = statistics.median(totals)
        ratio = med / prev if prev else float("nan")
        prev = med
        cols = " ".join(f"{statistics.median(splits[s]):>8.2f}s" for s in stages)
        print(f"{m:>8} {n:>7} {med:>8.2f} {ratio:>6.2f}  {cols}")


if __name__ == "__main__":
    main()
