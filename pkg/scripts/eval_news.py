#!/usr/bin/env python3
"""Averaged one-shot evaluation on the 1000-headline news fixture.

The default plan uses a 50 positive / 50 negative test split per trial.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mgl.bk import load_snapshot  # noqa: E402
from mgl.harness import TrialPlan, average_one_shot, load_news_jsonl  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default=os.path.join(FIXTURES, "news_sample.jsonl"))
    ap.add_argument("--snapshot", default=os.path.join(FIXTURES, "news_snapshot.facts"))
    ap.add_argument("--category", default="sports")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--test-pos", type=int, default=50)
    ap.add_argument("--test-neg", type=int, default=50)
    ap.add_argument("--out", default=None, help="directory for report.txt / report.csv")
    args = ap.parse_args()

    data = load_news_jsonl(args.dataset)
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
        print(f"trial {t.trial_index}: accuracy={t.accuracy!r}"
              + (" (learn failed)" if t.learn_failed else ""))
    print(f"mean_accuracy={report.mean_accuracy!r}")


if __name__ == "__main__":
    main()
