#!/usr/bin/env python3
"""Render an accuracy-vs-examples curve CSV as a terminal bar chart.

Reads the `count,mean_accuracy,stddev` format emitted by the harness (and by
eval_tasks.py --curve); optionally joins a baseline CSV column first.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mgl.harness import load_curve_csv, merge_baseline  # noqa: E402

WIDTH = 50


def bar(value: float) -> str:
    return "#" * round(value * WIDTH)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("curve_csv")
    ap.add_argument("--baseline", default=None,
                    help="count,mean_accuracy CSV to merge and print alongside")
    ap.add_argument("--merged-out", default=None,
                    help="where to write the merged CSV (with --baseline)")
    ap.add_argument("--png", default=None, help="also save a matplotlib figure here")
    args = ap.parse_args()

    rows = load_curve_csv(args.curve_csv)
    print(f"{'count':>5}  {'mean':>8}  {'stddev':>8}  accuracy (0..1)")
    for count, mean, sd in rows:
        print(f"{count:>5}  {mean:>8.4f}  {sd:>8.4f}  |{bar(mean):<{WIDTH}}|")

    if args.png:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        counts = [r[0] for r in rows]
        means = [r[1] for r in rows]
        sds = [r[2] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.errorbar(counts, means, yerr=sds, marker="o", capsize=3)
        ax.set_xlabel("examples")
        ax.set_ylabel("mean accuracy")
        ax.set_ylim(0.0, 1.05)
        ax.set_xticks(counts)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(args.png, dpi=120)
        print(f"figure -> {args.png}")

    if args.baseline:
        out = args.merged_out or os.path.splitext(args.curve_csv)[0] + "_merged.csv"
        merge_baseline(args.curve_csv, args.baseline, out)
        print(f"merged baseline -> {out}")


if __name__ == "__main__":
    main()
