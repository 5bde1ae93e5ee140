"""Interactive learning session: per-category hypotheses, prediction on new
tasks, incremental rule learning on user labels, and session persistence.

`submit_task` / `submit_label` are the single entry points shared by the HTTP
service and the REPL, so both transports produce identical session files.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .bk import BkOptions, BkBuild, Snapshot, atomic_write, build_bk, load_snapshot, tokenize
from .engine import Hypothesis, LearnTask, entails, learn, verify
from .logic import Atom, Const, FactStore, LogicError, WordList, parse_program, render_clause
from .metarules import resolve_metarules

TARGET = "category"


class SessionError(LogicError):
    pass


@dataclass(frozen=True)
class LabeledExample:
    id: str
    text: str
    words: tuple[str, ...]
    category: str
    timestamp: int  # ms epoch


@dataclass(frozen=True)
class EngineConfig:
    metarule_names: tuple[str, ...] = ("chain", "tailrec", "ident_const")
    # 3 clauses cover every hypothesis shape this system targets (bridge +
    # recursive step + base case); a tighter bound keeps exhaustive failure
    # searches in interactive sessions short
    max_clauses: int = 3
    depth_limit: int = 10


@dataclass(frozen=True)
class Prediction:
    categories: tuple[str, ...]
    matched_rules: tuple[str, ...]
    warning: Optional[str] = None


@dataclass(frozen=True)
class LearnOutcome:
    already_covered: bool
    new_hypothesis: Optional[Hypothesis]
    failure_reason: Optional[str]


@dataclass(frozen=True)
class InteractionRecord:
    kind: str  # "predict" | "label"
    text: str
    predicted: tuple[str, ...]
    label: Optional[str]
    learned_rules: tuple[str, ...]
    timestamp: int
    note: str = ""


@dataclass
class SessionState:
    snapshot: Snapshot
    snapshot_path: Optional[str] = None
    options: BkOptions = field(default_factory=lambda: BkOptions(split_per_example=False))
    engine: EngineConfig = field(default_factory=EngineConfig)
    examples: list[LabeledExample] = field(default_factory=list)
    hypotheses: dict[str, Hypothesis] = field(default_factory=dict)
    history: list[InteractionRecord] = field(default_factory=list)

    def categories(self) -> list[str]:
        out = []
        for ex in self.examples:
            if ex.category not in out:
                out.append(ex.category)
        return out


_CATEGORY_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def normalize_category(raw: str) -> str:
    sym = re.sub(r"[^a-z0-9]+", "_", raw.strip().lower()).strip("_")
    if not _CATEGORY_RE.match(sym):
        raise SessionError(f"invalid category name: {raw!r}")
    return sym


def example_atom(words, category: str) -> Atom:
    return Atom(TARGET, (WordList(tuple(words)), Const(category)))


def _session_store(state: SessionState, extra_words: tuple[str, ...] = ()) -> FactStore:
    sentences = [(ex.id, ex.words) for ex in state.examples]
    if extra_words:
        sentences.append(("_query", extra_words))
    cats = state.categories() + [c for c in state.hypotheses if c not in state.categories()]
    build = build_bk(sentences, cats, state.snapshot, state.options)
    return build.shared if build.shared is not None else _merge_all(build)


def _merge_all(build: BkBuild) -> FactStore:
    store = FactStore()
    for s in (build.per_example or {}).values():
        for f in s:
            store.add(f)
    return store


def predict(state: SessionState, text: str) -> Prediction:
    """Evaluate every stored hypothesis on the sentence; never mutates state."""
    words = tuple(tokenize(text))
    if not words:
        return Prediction((), (), warning="no usable tokens after stop-word removal")
    store = _session_store(state, extra_words=words)
    cats: list[str] = []
    rules: list[str] = []
    for cat in sorted(state.hypotheses):
        h = state.hypotheses[cat]
        goal = example_atom(words, cat)
        if entails(h.clauses, store, goal, state.engine.depth_limit):
            cats.append(cat)
            rules.extend(render_clause(c) for c in h.clauses)
    return Prediction(tuple(cats), tuple(rules))


def label(
    state: SessionState, text: str, category: str, now_ms: int = 0
) -> LearnOutcome:
    """Store the labeled example; learn or refresh the category's rule set.

    On learner failure the previous hypothesis is kept and the reason is
    reported instead of raising.
    """
    category = normalize_category(category)
    words = tuple(tokenize(text))
    if not words:
        raise SessionError(f"no usable tokens in {text!r}")
    ex = LabeledExample(
        id=f"e{len(state.examples) + 1}",
        text=text,
        words=words,
        category=category,
        timestamp=now_ms,
    )
    state.examples.append(ex)
    store = _session_store(state)
    existing = state.hypotheses.get(category)
    if existing is not None and entails(
        existing.clauses, store, example_atom(words, category), state.engine.depth_limit
    ):
        return LearnOutcome(already_covered=True, new_hypothesis=None, failure_reason=None)

    positives = tuple(
        example_atom(e.words, category) for e in state.examples if e.category == category
    )
    negatives = tuple(
        example_atom(e.words, category) for e in state.examples if e.category != category
    )
    task = LearnTask(
        metarules=resolve_metarules(list(state.engine.metarule_names)),
        background=store,
        positives=positives,
        negatives=negatives,
        predicate_pool=("contains", "related_to"),
        constant_pool=(category,),
        max_clauses=state.engine.max_clauses,
        depth_limit=state.engine.depth_limit,
    )
    h = learn(task)
    if h is None:
        return LearnOutcome(
            already_covered=False,
            new_hypothesis=None,
            failure_reason="no hypothesis exists within the session's clause and depth bounds",
        )
    report = verify(h, task)
    if not (report.complete and report.strongly_consistent):
        return LearnOutcome(
            already_covered=False,
            new_hypothesis=None,
            failure_reason="learned hypothesis failed verification",
        )
    state.hypotheses[category] = h
    return LearnOutcome(already_covered=False, new_hypothesis=h, failure_reason=None)


def submit_task(state: SessionState, text: str, now_ms: int = 0) -> Prediction:
    """Predict and append the interaction to history (service/REPL entry)."""
    pred = predict(state, text)
    state.history.append(
        InteractionRecord(
            kind="predict",
            text=text,
            predicted=pred.categories,
            label=None,
            learned_rules=(),
            timestamp=now_ms,
            note=pred.warning or "",
        )
    )
    return pred


def submit_label(
    state: SessionState, text: str, category: str, now_ms: int = 0
) -> LearnOutcome:
    pred = predict(state, text)
    outcome = label(state, text, category, now_ms)
    learned = (
        tuple(render_clause(c) for c in outcome.new_hypothesis.clauses)
        if outcome.new_hypothesis
        else ()
    )
    note = ""
    if outcome.already_covered:
        note = "already covered"
    elif outcome.failure_reason:
        note = outcome.failure_reason
    prior = {e.text for e in state.examples[:-1]}
    if text in prior:
        note = (note + "; " if note else "") + "re-label of a previously labeled task"
    state.history.append(
        InteractionRecord(
            kind="label",
            text=text,
            predicted=pred.categories,
            label=normalize_category(category),
            learned_rules=learned,
            timestamp=now_ms,
            note=note,
        )
    )
    return outcome


# ---------------------------------------------------------------------------
# Persistence

_SESSION_HEADER = "#mgl-session v1"


def _session_text(state: SessionState) -> str:
    lines = [_SESSION_HEADER]
    lines.append(f"#snapshot: {state.snapshot_path or ''}")
    lines.append("#options: " + json.dumps(asdict(state.options), sort_keys=True))
    lines.append("#engine: " + json.dumps(asdict(state.engine), sort_keys=True))
    for ex in state.examples:
        lines.append(
            f"example({ex.id}, [{','.join(ex.words)}], {ex.category}, {ex.timestamp})."
        )
        lines.append("#text: " + json.dumps({"id": ex.id, "text": ex.text}))
    for cat in sorted(state.hypotheses):
        h = state.hypotheses[cat]
        lines.append(f"%% category: {cat}")
        lines.append("% metarules: " + ",".join(h.metarule_names))
        lines.append("% invented: " + ",".join(h.invented))
        for c in h.clauses:
            lines.append(render_clause(c))
    for rec in state.history:
        lines.append("#history: " + json.dumps(asdict(rec), sort_keys=True))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + f"#sha256: {digest}\n"


def save_session(state: SessionState, path: str) -> None:
    atomic_write(path, _session_text(state))


_EXAMPLE_RE = re.compile(
    r"example\((\w+), \[([a-z0-9_,]*)\], ([a-z][a-z0-9_]*), (\d+)\)\.\Z"
)


def load_session(path: str, snapshot: Optional[Snapshot] = None) -> SessionState:
    if not os.path.exists(path):
        raise SessionError(f"session file not found: {path}")
    with open(path, encoding="utf-8") as f:
        text = f.read()
    lines = text.splitlines()
    if not lines or lines[0] != _SESSION_HEADER:
        raise SessionError(f"missing or unsupported session header in {path}")
    if not lines[-1].startswith("#sha256: "):
        raise SessionError(f"missing checksum in {path}")
    claimed = lines[-1][len("#sha256: ") :].strip()
    body = "\n".join(lines[:-1]) + "\n"
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != claimed:
        raise SessionError(f"session checksum mismatch in {path}")

    snapshot_path: Optional[str] = None
    options = BkOptions(split_per_example=False)
    engine = EngineConfig()
    examples: list[LabeledExample] = []
    texts: dict[str, str] = {}
    history: list[InteractionRecord] = []
    hypotheses: dict[str, Hypothesis] = {}
    current_cat: Optional[str] = None
    cat_meta: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {}
    cat_rules: dict[str, list[str]] = {}

    for line in lines[1:-1]:
        if not line.strip():
            continue
        if line.startswith("#snapshot: "):
            snapshot_path = line[len("#snapshot: ") :].strip() or None
        elif line.startswith("#options: "):
            options = BkOptions(**json.loads(line[len("#options: ") :]))
        elif line.startswith("#engine: "):
            raw = json.loads(line[len("#engine: ") :])
            engine = EngineConfig(
                metarule_names=tuple(raw["metarule_names"]),
                max_clauses=raw["max_clauses"],
                depth_limit=raw["depth_limit"],
            )
        elif line.startswith("#text: "):
            meta = json.loads(line[len("#text: ") :])
            texts[meta["id"]] = meta["text"]
        elif line.startswith("#history: "):
            raw = json.loads(line[len("#history: ") :])
            raw["predicted"] = tuple(raw["predicted"])
            raw["learned_rules"] = tuple(raw["learned_rules"])
            history.append(InteractionRecord(**raw))
        elif line.startswith("%% category: "):
            current_cat = line[len("%% category: ") :].strip()
            cat_rules[current_cat] = []
            cat_meta[current_cat] = ((), ())
        elif line.startswith("% metarules: "):
            names = tuple(n for n in line[len("% metarules: ") :].split(",") if n)
            cat_meta[current_cat] = (names, cat_meta[current_cat][1])
        elif line.startswith("% invented: "):
            inv = tuple(n for n in line[len("% invented: ") :].split(",") if n)
            cat_meta[current_cat] = (cat_meta[current_cat][0], inv)
        elif line.startswith("example("):
            m = _EXAMPLE_RE.match(line.strip())
            if m is None:
                raise SessionError(f"malformed example line: {line!r}")
            words = tuple(w for w in m.group(2).split(",") if w)
            examples.append(
                LabeledExample(
                    id=m.group(1),
                    text="",
                    words=words,
                    category=m.group(3),
                    timestamp=int(m.group(4)),
                )
            )
        elif current_cat is not None:
            cat_rules[current_cat].append(line)
        else:
            raise SessionError(f"unrecognized session line: {line!r}")

    examples = [
        LabeledExample(e.id, texts.get(e.id, " ".join(e.words)), e.words, e.category, e.timestamp)
        for e in examples
    ]
    for cat, rule_lines in cat_rules.items():
        clauses = tuple(parse_program("\n".join(rule_lines)))
        names, invented = cat_meta[cat]
        hypotheses[cat] = Hypothesis(clauses, names, invented)

    if snapshot is None:
        if snapshot_path is None:
            snapshot = Snapshot()
        else:
            resolved = snapshot_path
            if not os.path.isabs(resolved):
                resolved = os.path.join(os.path.dirname(os.path.abspath(path)), resolved)
            snapshot = load_snapshot(resolved)
    return SessionState(
        snapshot=snapshot,
        snapshot_path=snapshot_path,
        options=options,
        engine=engine,
        examples=examples,
        hypotheses=hypotheses,
        history=history,
    )
