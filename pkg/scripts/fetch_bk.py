#!/usr/bin/env python3
"""Fetch a checksummed related_to snapshot for the words of a dataset.

Tokenizes every text in a task CSV (plus its category names), then queries the
knowledge-graph endpoint for each word. Network access is required; fixtures
shipped in this repo were produced by scripts/make_fixtures.py instead so the
test suite never touches the network.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mgl.bk import DEFAULT_ENDPOINT, BkOptions, fetch_words, save_snapshot, tokenize  # noqa: E402
from mgl.harness import load_task_csv  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", required=True, help="task CSV to draw words from")
    ap.add_argument("--snapshot", required=True, help="output snapshot path")
    ap.add_argument("--endpoint", default=DEFAULT_ENDPOINT)
    ap.add_argument("--max-related", type=int, default=20)
    ap.add_argument("--min-weight", type=float, default=1.0)
    ap.add_argument("--cache", default=None, help="optional JSON response cache")
    args = ap.parse_args()

    data = load_task_csv(args.dataset)
    words = sorted(
        {w for text, _ in data.samples for w in tokenize(text)} | set(data.categories())
    )
    print(f"fetching {len(words)} words from {args.endpoint}")
    options = BkOptions(max_related_per_word=args.max_related, min_weight=args.min_weight)
    snapshot, errors = fetch_words(words, args.endpoint, options, cache_path=args.cache)
    for word, message in sorted(errors.items()):
        print(f"warning: {word}: {message}", file=sys.stderr)
    if not snapshot.fetched_words:
        print("error: nothing fetched; snapshot not written", file=sys.stderr)
        sys.exit(4)
    save_snapshot(snapshot, args.snapshot)
    print(f"{len(snapshot.fetched_words)}/{len(words)} words, "
          f"{len(snapshot)} edges -> {args.snapshot}")


if __name__ == "__main__":
    main()
