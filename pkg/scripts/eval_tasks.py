#!/usr/bin/env python3
"""Averaged one-shot evaluation on the shipped 29-task fixture dataset.

Reproduces the pinned regression number with the default arguments and can
additionally emit a Figure-3-shaped accuracy-vs-negatives curve.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mgl.bk import load_snapshot  # noqa: E402
from mgl.harness import TrialPlan, average_one_shot, curve, load_task_csv  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default=os.path.join(FIXTURES, "tasks.csv"))
    ap.add_argument("--snapshot", default=os.path.join(FIXTURES, "tasks_snapshot.facts"))
    ap.add_argument("--category", default="family")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--test-pos", type=int, default=10)
    ap.add_argument("--test-neg", type=int, default=10)
    ap.add_argument("--out", default=None, help="directory for report.txt / report.csv")
    ap.add_argument("--curve", default=None, metavar="CSV",
                    help="also sweep n_neg 1..4 and write the curve here")
    args = ap.parse_args()

    data = load_task_csv(args.dataset)
    snapshot = load_snapshot(args.snapshot)
    plan = TrialPlan(
        seed=args.seed,
        target_category=args.category,
        n_trials=args.trials,
        n_test_pos=args.test_pos,
        n_test_neg=args.test_neg,
    )
    report = average_one_shot(data, plan, snapshot)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as f:
            f.write(report.render())
        report.write_csv(os.path.join(args.out, "report.csv"))
    for t in report.per_trial:
        print(f"trial {t.trial_index}: accuracy={t.accuracy!r} "
              f"{'(learn failed)' if t.learn_failed else t.hypothesis_render}")
    print(f"mean_accuracy={report.mean_accuracy!r}")

    if args.curve:
        rows = curve(data, plan, "neg", 4, snapshot, out_csv=args.curve)
        for count, mean, sd in rows:
            print(f"n_neg={count}: mean={mean!r} stddev={sd!r}")
        print(f"curve written to {args.curve}")


if __name__ == "__main__":
    main()
