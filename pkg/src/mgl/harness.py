"""Batch evaluation: dataset loaders, the averaged one-shot protocol with
per-example background-knowledge splitting, and accuracy-vs-examples curves.

Every trial draws from its own seeded random stream (derived from the plan
seed and the trial index), so reports are byte-reproducible and trials could
run in any order.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .bk import BkOptions, Snapshot, build_bk, tokenize
from .engine import LearnTask, entails, learn
from .logic import FactStore, LogicError
from .metarules import resolve_metarules
from .session import EngineConfig, example_atom, normalize_category


class DatasetError(LogicError):
    pass


class InfeasiblePlanError(LogicError):
    pass


@dataclass(frozen=True)
class Dataset:
    name: str
    samples: tuple[tuple[str, str], ...]  # (text, category)
    skipped: int = 0

    def categories(self) -> list[str]:
        out: list[str] = []
        for _, c in self.samples:
            if c not in out:
                out.append(c)
        return out


@dataclass(frozen=True)
class TrialPlan:
    seed: int
    target_category: str
    n_trials: int = 10
    n_pos: int = 1
    n_neg: int = 1
    n_test_pos: int = 1
    n_test_neg: int = 1

    def __post_init__(self):
        if self.n_trials < 1 or self.n_pos < 1 or self.n_neg < 0:
            raise InfeasiblePlanError("n_trials and n_pos must be >= 1, n_neg >= 0")
        if self.n_test_pos < 1 or self.n_test_neg < 1:
            raise InfeasiblePlanError("test counts must be >= 1")


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    accuracy: float
    hypothesis_render: str
    learn_failed: bool


@dataclass(frozen=True)
class AccuracyReport:
    per_trial: tuple[TrialResult, ...]
    mean_accuracy: float
    plan: TrialPlan
    dataset_name: str

    def render(self) -> str:
        lines = [
            "#mgl-report v1",
            f"dataset: {self.dataset_name}",
            "plan: " + json.dumps(asdict(self.plan), sort_keys=True),
        ]
        for t in self.per_trial:
            lines.append(f"trial: {t.trial_index}")
            lines.append(f"accuracy: {t.accuracy!r}")
            lines.append(f"learn_failed: {str(t.learn_failed).lower()}")
            lines.append(f"hypothesis: {t.hypothesis_render}")
        lines.append(f"mean_accuracy: {self.mean_accuracy!r}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["trial", "accuracy", "learn_failed", "hypothesis"])
            for t in self.per_trial:
                w.writerow(
                    [t.trial_index, repr(t.accuracy), str(t.learn_failed).lower(), t.hypothesis_render]
                )


# ---------------------------------------------------------------------------
# Loaders


def load_task_csv(path: str) -> Dataset:
    samples: list[tuple[str, str]] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, expected 'text,category' header") from None
        if header != ["text", "category"]:
            raise DatasetError(f"{path}: unknown header {header!r}, expected ['text', 'category']")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise DatasetError(f"{path}:{lineno}: malformed row {row!r}")
            samples.append((row[0], normalize_category(row[1])))
    return Dataset(name=path, samples=tuple(samples))


def load_news_jsonl(path: str, category_filter: Optional[str] = None) -> Dataset:
    samples: list[tuple[str, str]] = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                headline = obj["headline"]
                category = obj["category"]
                if not isinstance(headline, str) or not isinstance(category, str):
                    raise TypeError
            except (ValueError, KeyError, TypeError):
                skipped += 1
                continue
            samples.append((headline, normalize_category(category)))
    if not samples:
        raise DatasetError(f"{path}: no usable lines ({skipped} skipped)")
    if category_filter is not None:
        wanted = normalize_category(category_filter)
        if wanted not in {c for _, c in samples}:
            raise DatasetError(f"{path}: category {wanted!r} not present")
    return Dataset(name=path, samples=tuple(samples), skipped=skipped)


# ---------------------------------------------------------------------------
# Accuracy and trials


def accuracy(predictions: Sequence[tuple[bool, bool]]) -> float:
    """(true positives + true negatives) / total over (predicted, actual) pairs."""
    if not predictions:
        raise DatasetError("accuracy of an empty prediction list is undefined")
    correct = sum(1 for predicted, actual in predictions if predicted == actual)
    return correct / len(predictions)


def _trial_rng(seed: int, trial_index: int) -> random.Random:
    return random.Random(f"{seed}:{trial_index}")


@dataclass(frozen=True)
class _Example:
    id: str
    words: tuple[str, ...]
    positive: bool


def _usable(dataset: Dataset, target: str) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    pos, neg = [], []
    for text, cat in dataset.samples:
        if not tokenize(text):
            continue
        (pos if cat == target else neg).append((text, cat))
    return pos, neg


def run_trial(
    dataset: Dataset,
    plan: TrialPlan,
    trial_index: int,
    snapshot: Snapshot,
    options: BkOptions,
    engine: EngineConfig,
) -> TrialResult:
    target = normalize_category(plan.target_category)
    pos_pool, neg_pool = _usable(dataset, target)
    if plan.n_pos + plan.n_test_pos > len(pos_pool):
        raise InfeasiblePlanError(
            f"need {plan.n_pos}+{plan.n_test_pos} positives, pool has {len(pos_pool)}"
        )
    if plan.n_neg + plan.n_test_neg > len(neg_pool):
        raise InfeasiblePlanError(
            f"need {plan.n_neg}+{plan.n_test_neg} negatives, pool has {len(neg_pool)}"
        )
    rng = _trial_rng(plan.seed, trial_index)
    pos_idx = list(range(len(pos_pool)))
    neg_idx = list(range(len(neg_pool)))
    train_pos = rng.sample(pos_idx, plan.n_pos)
    train_neg = rng.sample(neg_idx, plan.n_neg)
    test_pos = rng.sample([i for i in pos_idx if i not in train_pos], plan.n_test_pos)
    test_neg = rng.sample([i for i in neg_idx if i not in train_neg], plan.n_test_neg)

    examples: list[_Example] = []
    roles: dict[str, str] = {}
    for tag, idxs, pool, positive in (
        ("trp", train_pos, pos_pool, True),
        ("trn", train_neg, neg_pool, False),
        ("tep", test_pos, pos_pool, True),
        ("ten", test_neg, neg_pool, False),
    ):
        for i in idxs:
            ex_id = f"{tag}{i}"
            examples.append(_Example(ex_id, tuple(tokenize(pool[i][0])), positive))
            roles[ex_id] = tag

    split_options = replace(options, split_per_example=True)
    build = build_bk(
        [(e.id, e.words) for e in examples], [target], snapshot, split_options
    )
    stores = build.per_example or {}

    train_store = FactStore()
    for e in examples:
        if roles[e.id] in ("trp", "trn"):
            for f in stores[e.id]:
                train_store.add(f)

    task = LearnTask(
        metarules=resolve_metarules(list(engine.metarule_names)),
        background=train_store,
        positives=tuple(example_atom(e.words, target) for e in examples if roles[e.id] == "trp"),
        negatives=tuple(example_atom(e.words, target) for e in examples if roles[e.id] == "trn"),
        predicate_pool=("contains", "related_to"),
        constant_pool=(target,),
        max_clauses=engine.max_clauses,
        depth_limit=engine.depth_limit,
    )
    h = learn(task)
    pairs: list[tuple[bool, bool]] = []
    for e in examples:
        if roles[e.id] not in ("tep", "ten"):
            continue
        if h is None:
            predicted = False  # learner failure: all-negative predictions
        else:
            predicted = entails(
                h.clauses, stores[e.id], example_atom(e.words, target), engine.depth_limit
            )
        pairs.append((predicted, e.positive))
    return TrialResult(
        trial_index=trial_index,
        accuracy=accuracy(pairs),
        hypothesis_render="" if h is None else " ".join(h.render().splitlines()),
        learn_failed=h is None,
    )


def average_one_shot(
    dataset: Dataset,
    plan: TrialPlan,
    snapshot: Snapshot,
    options: BkOptions = BkOptions(),
    engine: EngineConfig = EngineConfig(metarule_names=("chain",)),
) -> AccuracyReport:
    trials = tuple(
        run_trial(dataset, plan, i, snapshot, options, engine)
        for i in range(plan.n_trials)
    )
    mean = sum(t.accuracy for t in trials) / len(trials)
    return AccuracyReport(
        per_trial=trials, mean_accuracy=mean, plan=plan, dataset_name=dataset.name
    )


# ---------------------------------------------------------------------------
# Curves


def curve(
    dataset: Dataset,
    base_plan: TrialPlan,
    axis: str,
    max_count: int,
    snapshot: Snapshot,
    options: BkOptions = BkOptions(),
    engine: EngineConfig = EngineConfig(metarule_names=("chain",)),
    out_csv: Optional[str] = None,
    sidecar_csv: Optional[str] = None,
) -> list[tuple[int, float, float]]:
    """Mean accuracy as the number of positives or negatives grows.

    axis="pos" also sets n_neg to the same count (matched negatives);
    axis="neg" varies only the negatives.
    """
    if axis not in ("pos", "neg"):
        raise InfeasiblePlanError(f"axis must be 'pos' or 'neg', got {axis!r}")
    rows: list[tuple[int, float, float]] = []
    sidecar: list[tuple[int, int, float]] = []
    for count in range(1, max_count + 1):
        if axis == "pos":
            plan = replace(base_plan, n_pos=count, n_neg=count)
        else:
            plan = replace(base_plan, n_neg=count)
        report = average_one_shot(dataset, plan, snapshot, options, engine)
        accs = [t.accuracy for t in report.per_trial]
        stddev = statistics.pstdev(accs)
        rows.append((count, report.mean_accuracy, stddev))
        sidecar.extend((count, t.trial_index, t.accuracy) for t in report.per_trial)
    if out_csv:
        with open(out_csv, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["count", "mean_accuracy", "stddev"])
            for count, mean, sd in rows:
                w.writerow([count, repr(mean), repr(sd)])
    if sidecar_csv:
        with open(sidecar_csv, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["count", "trial", "accuracy"])
            for count, trial, acc in sidecar:
                w.writerow([count, trial, repr(acc)])
    return rows


def load_curve_csv(path: str) -> list[tuple[int, float, float]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["count", "mean_accuracy", "stddev"]:
            raise DatasetError(f"{path}: unknown curve header {header!r}")
        return [(int(r[0]), float(r[1]), float(r[2])) for r in reader]


def merge_baseline(curve_csv: str, baseline_csv: str, out_csv: str) -> None:
    """Join an externally produced baseline accuracy column onto a curve CSV.

    Baseline format: `count,mean_accuracy` (e.g. from a neural model run
    elsewhere); missing counts are left blank.
    """
    ours = load_curve_csv(curve_csv)
    baseline: dict[int, float] = {}
    with open(baseline_csv, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        next(reader)  # header
        for row in reader:
            baseline[int(row[0])] = float(row[1])
    with open(out_csv, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["count", "mgl_mean_accuracy", "baseline_mean_accuracy"])
        for count, mean, _sd in ours:
            b = baseline.get(count)
            w.writerow([count, repr(mean), "" if b is None else repr(b)])
