"""Command-line surface: learn, eval, bk fetch/show, serve, repl.

Exit codes: 0 success, 2 input error, 3 no hypothesis within bounds,
4 network failure.
"""

from __future__ import annotations

import os
import sys
import time

import click

from . import bk as bkmod
from .bk import BkOptions, Snapshot, fetch_words, load_snapshot, save_snapshot
from .engine import LearnTask, learn
from .harness import TrialPlan, average_one_shot, load_news_jsonl, load_task_csv
from .logic import FactStore, LogicError, parse_program
from .metarules import parse_metarule, resolve_metarules
from .session import EngineConfig, SessionState, load_session, save_session, submit_label, submit_task

EXIT_INPUT = 2
EXIT_NO_HYPOTHESIS = 3
EXIT_NETWORK = 4


def _read_program(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            return parse_program(f.read())
    except OSError as exc:
        raise click.exceptions.Exit(_input_error(f"cannot read {path}: {exc}"))
    except LogicError as exc:
        raise click.exceptions.Exit(_input_error(f"{path}: {exc}"))


def _input_error(message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return EXIT_INPUT


def _parse_metarules(spec: str):
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as f:
            rules = [
                parse_metarule(line)
                for line in f
                if line.strip() and not line.strip().startswith("%")
            ]
        return tuple(rules)
    return resolve_metarules([n.strip() for n in spec.split(",") if n.strip()])


@click.group()
def main():
    """Meta-Goal Learner: one-shot rule learning for text classification."""


@main.command("learn")
@click.option("--pos", "pos_file", required=True, type=click.Path())
@click.option("--neg", "neg_file", required=True, type=click.Path())
@click.option("--bk", "bk_file", required=True, type=click.Path())
@click.option("--metarules", default="chain", show_default=True, help="comma list of built-ins or a metarule file")
@click.option("--constants", default="", help="comma list for constant slots")
@click.option("--max-clauses", default=4, show_default=True)
@click.option("--depth-limit", default=10, show_default=True)
@click.option("--out", "out_file", type=click.Path(), default=None)
def cli_learn(pos_file, neg_file, bk_file, metarules, constants, max_clauses, depth_limit, out_file):
    """Learn a hypothesis from example and background-knowledge files."""
    try:
        rules = _parse_metarules(metarules)
    except LogicError as exc:
        sys.exit(_input_error(str(exc)))
    pos = _read_program(pos_file)
    neg = _read_program(neg_file)
    bk_clauses = _read_program(bk_file)
    store = FactStore()
    try:
        store.add_clauses(bk_clauses)
        pool = tuple(dict.fromkeys(c.head.predicate for c in bk_clauses))
        task = LearnTask(
            metarules=rules,
            background=store,
            positives=tuple(c.head for c in pos),
            negatives=tuple(c.head for c in neg),
            predicate_pool=pool,
            constant_pool=tuple(c.strip() for c in constants.split(",") if c.strip()),
            max_clauses=max_clauses,
            depth_limit=depth_limit,
        )
        task.validate()
    except LogicError as exc:
        sys.exit(_input_error(str(exc)))
    h = learn(task)
    if h is None:
        sys.exit(EXIT_NO_HYPOTHESIS)
    rendered = h.render()
    click.echo(rendered)
    if out_file:
        with open(out_file, "w", encoding="utf-8") as f:
            f.write(rendered + "\n")


@main.command("eval")
@click.option("--dataset", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv", show_default=True)
@click.option("--category", required=True)
@click.option("--trials", default=10, show_default=True)
@click.option("--pos", "n_pos", default=1, show_default=True)
@click.option("--neg", "n_neg", default=1, show_default=True)
@click.option("--test-pos", default=10, show_default=True)
@click.option("--test-neg", default=10, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path())
@click.option("--metarules", default="chain", show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def cli_eval(dataset, fmt, category, trials, n_pos, n_neg, test_pos, test_neg, seed, snapshot_path, metarules, out_dir):
    """Run the averaged one-shot protocol and report mean accuracy."""
    try:
        data = load_task_csv(dataset) if fmt == "csv" else load_news_jsonl(dataset)
        snapshot = load_snapshot(snapshot_path)
        plan = TrialPlan(
            seed=seed,
            target_category=category,
            n_trials=trials,
            n_pos=n_pos,
            n_neg=n_neg,
            n_test_pos=test_pos,
            n_test_neg=test_neg,
        )
        engine = EngineConfig(metarule_names=tuple(n.strip() for n in metarules.split(",") if n.strip()))
        report = average_one_shot(data, plan, snapshot, engine=engine)
    except (LogicError, OSError) as exc:
        sys.exit(_input_error(str(exc)))
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.txt"), "w", encoding="utf-8") as f:
            f.write(report.render())
        report.write_csv(os.path.join(out_dir, "report.csv"))
    click.echo(f"mean_accuracy={report.mean_accuracy:.6f}")


@main.group("bk")
def cli_bk():
    """Background-knowledge snapshot management."""


@cli_bk.command("fetch")
@click.option("--words", "words_file", required=True, type=click.Path())
@click.option("--endpoint", default=bkmod.DEFAULT_ENDPOINT, show_default=True)
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path())
@click.option("--max-related", default=20, show_default=True)
@click.option("--min-weight", default=1.0, show_default=True)
def cli_bk_fetch(words_file, endpoint, snapshot_path, max_related, min_weight):
    """Fetch related_to edges for each word into a checksummed snapshot."""
    try:
        with open(words_file, encoding="utf-8") as f:
            words = [w.strip() for w in f if w.strip()]
    except OSError as exc:
        sys.exit(_input_error(str(exc)))
    if not words:
        sys.exit(_input_error(f"{words_file}: no words"))
    options = BkOptions(max_related_per_word=max_related, min_weight=min_weight)
    snapshot, errors = fetch_words(words, endpoint, options, cache_path=None)
    for word, message in sorted(errors.items()):
        click.echo(f"warning: {word}: {message}", err=True)
    if not snapshot.fetched_words:
        click.echo("error: nothing fetched; snapshot not written", err=True)
        sys.exit(EXIT_NETWORK)
    save_snapshot(snapshot, snapshot_path)
    click.echo(
        f"fetched {len(snapshot.fetched_words)}/{len(set(words))} words, "
        f"{len(snapshot)} edges -> {snapshot_path}"
    )


@cli_bk.command("show")
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path())
@click.option("--word", required=True)
def cli_bk_show(snapshot_path, word):
    """List snapshot edges for a word (both directions)."""
    try:
        snapshot = load_snapshot(snapshot_path)
    except LogicError as exc:
        sys.exit(_input_error(str(exc)))
    for other, weight in sorted(snapshot.neighbours(word), key=lambda p: (-p[1], p[0])):
        click.echo(f"related_to({word}, {other}, {weight!r}).")


@main.command("serve")
@click.option("--port", default=8130, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--session-file", type=click.Path(), default=None)
@click.option("--snapshot", "snapshot_path", type=click.Path(), default=None)
@click.option("--allow-origin", default="*", show_default=True)
@click.option("--static-dir", type=click.Path(), default=None, help="serve the UI bundle from this directory")
def cli_serve(port, host, session_file, snapshot_path, allow_origin, static_dir):
    """Run the HTTP+JSON session service."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(
            session_file=session_file,
            snapshot_path=snapshot_path,
            allow_origin=allow_origin,
            static_dir=static_dir,
        )
    except LogicError as exc:
        sys.exit(_input_error(str(exc)))
    uvicorn.run(app, host=host, port=port)


@main.command("repl")
@click.option("--session-file", type=click.Path(), default=None)
@click.option("--snapshot", "snapshot_path", type=click.Path(), default=None)
def cli_repl(session_file, snapshot_path):
    """Interactive loop: type a task, answer with `label <category>`."""
    try:
        if session_file and os.path.exists(session_file):
            state = load_session(session_file)
        else:
            snapshot = load_snapshot(snapshot_path) if snapshot_path else Snapshot()
            state = SessionState(snapshot=snapshot, snapshot_path=snapshot_path)
    except LogicError as exc:
        sys.exit(_input_error(str(exc)))

    pending = None
    click.echo("mgl repl; enter a task, 'label <category>', 'rules', or 'quit'")
    while True:
        try:
            line = input("task> ").strip()
        except EOFError:
            break
        if not line:
            continue
        if line in ("quit", "exit"):
            break
        if line == "rules":
            for cat, h in sorted(state.hypotheses.items()):
                click.echo(f"% {cat}")
                click.echo(h.render())
            continue
        if line.startswith("label "):
            if pending is None:
                click.echo("no pending task; enter the task text first")
                continue
            try:
                outcome = submit_label(state, pending, line[len("label ") :], int(time.time() * 1000))
            except LogicError as exc:
                click.echo(f"error: {exc}")
                continue
            if outcome.already_covered:
                click.echo("already covered")
            elif outcome.failure_reason:
                click.echo(f"could not learn: {outcome.failure_reason}")
            else:
                click.echo(outcome.new_hypothesis.render())
            pending = None
            continue
        pending = line
        pred = submit_task(state, line, int(time.time() * 1000))
        if pred.categories:
            click.echo("predicted: " + ", ".join(pred.categories))
        else:
            click.echo("? (unlabeled; reply with 'label <category>')")
    if session_file:
        save_session(state, session_file)
        click.echo(f"session saved to {session_file}")


if __name__ == "__main__":
    main()
