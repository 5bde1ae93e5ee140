"""Background knowledge from text and ConceptNet.

Covers tokenization, `contains/2` fact generation, the live ConceptNet edge
client, the offline snapshot format, and FactStore assembly (shared or split
per example).
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import requests

from .logic import Atom, Clause, Const, FactStore, LogicError, WordList
from .stopwords import STOP_WORDS

RELATED_TO = "related_to"
CONTAINS = "contains"

DEFAULT_ENDPOINT = "https://api.conceptnet.io"


class BkError(LogicError):
    pass


class SnapshotError(BkError):
    pass


class FetchError(BkError):
    """Network-level failure after retries; safe to retry later."""


class MalformedResponseError(BkError):
    def __init__(self, message: str, fragment: str):
        super().__init__(f"{message}: {fragment[:200]}")
        self.fragment = fragment


@dataclass(frozen=True)
class BkOptions:
    max_related_per_word: int = 20
    min_weight: float = 1.0
    hops: int = 1
    split_per_example: bool = True

    def __post_init__(self):
        if self.max_related_per_word < 1:
            raise BkError("max_related_per_word must be >= 1")
        if self.min_weight < 0:
            raise BkError("min_weight must be >= 0")
        if self.hops not in (1, 2):
            raise BkError("hops must be 1 or 2")


@dataclass(frozen=True)
class KnowledgeEdge:
    head: str
    relation: str
    tail: str
    weight: float

    def __post_init__(self):
        if self.head == self.tail:
            raise BkError(f"self-edge not allowed: {self.head}")
        if self.weight < 0:
            raise BkError("edge weight must be >= 0")


_TOKEN_RE = re.compile(r"[a-z0-9]+")
_SYMBOL_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stop words.

    Tokens that cannot form constant symbols (leading digit) are dropped too,
    so every returned token is a valid term constant.
    """
    out = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if tok in STOP_WORDS:
            continue
        if not tok[0].isalpha():
            continue
        out.append(tok)
    return out


def contains_facts(words: Sequence[str]) -> list[Clause]:
    """One ground `contains([w1..wn], wi)` fact per distinct word."""
    if not words:
        raise BkError("cannot build contains-facts for an empty word list")
    sentence = WordList(tuple(words))
    seen = []
    for w in words:
        if w not in seen:
            seen.append(w)
    return [Clause(Atom(CONTAINS, (sentence, Const(w)))) for w in seen]


# ---------------------------------------------------------------------------
# Snapshot


class Snapshot:
    """Offline ConceptNet slice: `related_to` edges plus the set of words that
    were actually fetched (so a miss can be told from an un-fetched word).

    Edges are stored once per unordered pair; lookups see both directions.
    """

    def __init__(
        self,
        edges: Iterable[KnowledgeEdge] = (),
        fetched_words: Iterable[str] = (),
        source_tag: str = "local",
    ):
        self._edges: dict[tuple[str, str], float] = {}
        self.fetched_words: set[str] = set(fetched_words)
        self.source_tag = source_tag
        for e in edges:
            self.add_edge(e)

    def add_edge(self, e: KnowledgeEdge) -> None:
        if e.relation != RELATED_TO:
            return  # only the symmetric relatedness relation is ingested
        key = (e.head, e.tail) if e.head < e.tail else (e.tail, e.head)
        prev = self._edges.get(key)
        if prev is None or e.weight > prev:
            self._edges[key] = e.weight

    def edges(self) -> list[KnowledgeEdge]:
        return [
            KnowledgeEdge(h, RELATED_TO, t, w)
            for (h, t), w in sorted(self._edges.items())
        ]

    def neighbours(self, word: str) -> list[tuple[str, float]]:
        out = []
        for (h, t), w in self._edges.items():
            if h == word:
                out.append((t, w))
            elif t == word:
                out.append((h, w))
        return out

    def top_neighbours(self, word: str, options: BkOptions) -> list[tuple[str, float]]:
        pairs = [
            (other, w)
            for other, w in self.neighbours(word)
            if w >= options.min_weight
        ]
        pairs.sort(key=lambda p: (-p[1], p[0]))
        return pairs[: options.max_related_per_word]

    def merged(self, other: "Snapshot") -> "Snapshot":
        out = Snapshot(self.edges(), self.fetched_words, self.source_tag)
        for e in other.edges():
            out.add_edge(e)
        out.fetched_words |= other.fetched_words
        return out

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Snapshot)
            and self._edges == other._edges
            and self.fetched_words == other.fetched_words
            and self.source_tag == other.source_tag
        )


_SNAPSHOT_HEADER = "#mgl-snapshot v1"
_EDGE_RE = re.compile(
    r"related_to\(\s*([a-z][a-z0-9_]*)\s*,\s*([a-z][a-z0-9_]*)\s*,\s*([0-9.eE+-]+)\s*\)\.\s*\Z"
)


def _snapshot_text(snapshot: Snapshot) -> str:
    lines = [f"{_SNAPSHOT_HEADER} {snapshot.source_tag}"]
    for e in snapshot.edges():
        lines.append(f"related_to({e.head}, {e.tail}, {e.weight!r}).")
    fetched = sorted(snapshot.fetched_words)
    for i in range(0, len(fetched), 20):
        lines.append("#fetched: " + " ".join(fetched[i : i + 20]))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + f"#sha256: {digest}\n"


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mgl-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_snapshot(snapshot: Snapshot, path: str) -> None:
    atomic_write(path, _snapshot_text(snapshot))


def load_snapshot(path: str) -> Snapshot:
    if not os.path.exists(path):
        raise SnapshotError(f"snapshot file not found: {path}")
    with open(path, encoding="utf-8") as f:
        text = f.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#mgl-snapshot"):
        raise SnapshotError(f"missing header in {path}")
    if not lines[0].startswith(_SNAPSHOT_HEADER):
        raise SnapshotError(f"unsupported snapshot version: {lines[0]!r}")
    if not lines[-1].startswith("#sha256: "):
        raise SnapshotError(f"missing checksum line in {path}")
    claimed = lines[-1][len("#sha256: ") :].strip()
    body = "\n".join(lines[:-1]) + "\n"
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if claimed != actual:
        raise SnapshotError(f"checksum mismatch in {path}")
    source_tag = lines[0][len(_SNAPSHOT_HEADER) :].strip() or "local"
    snapshot = Snapshot(source_tag=source_tag)
    for i, line in enumerate(lines[1:-1], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#fetched:"):
            snapshot.fetched_words.update(line[len("#fetched:") :].split())
            continue
        m = _EDGE_RE.match(line)
        if m is None:
            raise SnapshotError(f"malformed edge at {path}:{i}: {line!r}")
        snapshot.add_edge(
            KnowledgeEdge(m.group(1), RELATED_TO, m.group(2), float(m.group(3)))
        )
    return snapshot


# ---------------------------------------------------------------------------
# Live ConceptNet client


def _normalize_term(term_id: str) -> Optional[str]:
    # "/c/en/phone call" or "/c/en/phone_call/n" -> "phone_call"
    parts = term_id.split("/")
    if len(parts) < 4 or parts[1] != "c" or parts[2] != "en":
        return None
    sym = parts[3].strip().lower().replace(" ", "_").replace("-", "_")
    return sym if _SYMBOL_RE.match(sym) else None


def fetch_related(
    word: str,
    endpoint: str = DEFAULT_ENDPOINT,
    options: BkOptions = BkOptions(),
    session: Optional[requests.Session] = None,
    retries: int = 3,
    backoff: float = 0.5,
) -> list[KnowledgeEdge]:
    """Fetch `related_to` edges for one word, sorted by weight desc then tail."""
    url = (
        f"{endpoint.rstrip('/')}/query"
        f"?node=/c/en/{word}&rel=/r/RelatedTo&limit={options.max_related_per_word * 4}"
    )
    http = session or requests
    last_error: Optional[Exception] = None
    for attempt in range(retries):
        try:
            resp = http.get(url, timeout=15)
        except requests.RequestException as exc:
            last_error = exc
            time.sleep(backoff * (2**attempt))
            continue
        if resp.status_code == 429:
            last_error = FetchError(f"rate limited fetching {word!r}")
            time.sleep(backoff * (2**attempt))
            continue
        if resp.status_code >= 500:
            last_error = FetchError(f"server error {resp.status_code} fetching {word!r}")
            time.sleep(backoff * (2**attempt))
            continue
        if resp.status_code != 200:
            raise FetchError(f"unexpected status {resp.status_code} fetching {word!r}")
        return _parse_edges(word, resp, options)
    raise FetchError(f"giving up on {word!r} after {retries} attempts: {last_error}")


def _parse_edges(word: str, resp, options: BkOptions) -> list[KnowledgeEdge]:
    try:
        payload = resp.json()
    except ValueError:
        raise MalformedResponseError("response is not JSON", resp.text) from None
    if not isinstance(payload, dict) or not isinstance(payload.get("edges"), list):
        raise MalformedResponseError("response lacks an 'edges' list", repr(payload))
    edges: list[KnowledgeEdge] = []
    seen: set[str] = set()
    for raw in payload["edges"]:
        try:
            rel = raw["rel"]["@id"]
            start = _normalize_term(raw["start"]["@id"])
            end = _normalize_term(raw["end"]["@id"])
            weight = float(raw.get("weight", 1.0))
        except (KeyError, TypeError, ValueError):
            raise MalformedResponseError("malformed edge object", repr(raw)) from None
        if rel != "/r/RelatedTo" or start is None or end is None:
            continue
        other = end if start == word else start if end == word else None
        if other is None or other == word:
            continue
        if weight < options.min_weight or other in seen:
            continue
        seen.add(other)
        edges.append(KnowledgeEdge(word, RELATED_TO, other, weight))
    edges.sort(key=lambda e: (-e.weight, e.tail))
    return edges[: options.max_related_per_word]


class _Throttle:
    """At most one request start per `interval` seconds, across threads."""

    def __init__(self, interval: float):
        self.interval = interval
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self) -> None:
        with self._lock:
            now = time.monotonic()
            delay = self._last + self.interval - now
            if delay > 0:
                time.sleep(delay)
            self._last = max(now, self._last + self.interval)


def fetch_words(
    words: Sequence[str],
    endpoint: str = DEFAULT_ENDPOINT,
    options: BkOptions = BkOptions(),
    cache_path: Optional[str] = None,
    source_tag: Optional[str] = None,
    max_workers: int = 4,
    spacing: float = 0.25,
) -> tuple[Snapshot, dict[str, str]]:
    """Fetch several words concurrently (bounded, politely spaced) into a
    snapshot; per-word failures are collected, not fatal. The snapshot is
    written through to `cache_path` after every completed word."""
    tag = source_tag or f"{endpoint} {time.strftime('%Y-%m-%d')}"
    snapshot = Snapshot(source_tag=tag)
    errors: dict[str, str] = {}
    throttle = _Throttle(spacing)
    lock = threading.Lock()

    def work(word: str) -> None:
        throttle.wait()
        try:
            edges = fetch_related(word, endpoint, options)
        except BkError as exc:
            with lock:
                errors[word] = str(exc)
            return
        with lock:
            for e in edges:
                snapshot.add_edge(e)
            snapshot.fetched_words.add(word)
            if cache_path:
                save_snapshot(snapshot, cache_path)

    unique = list(dict.fromkeys(words))
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        list(pool.map(work, unique))
    return snapshot, errors


# ---------------------------------------------------------------------------
# FactStore assembly


@dataclass
class BkBuild:
    shared: Optional[FactStore]
    per_example: Optional[dict[str, FactStore]]
    missing_words: tuple[str, ...]

    @property
    def missing_count(self) -> int:
        return len(self.missing_words)


def _related_facts(word: str, snapshot: Snapshot, options: BkOptions) -> list[Atom]:
    facts: list[Atom] = []
    frontier = [word]
    for _ in range(options.hops):
        nxt: list[str] = []
        for w in frontier:
            for other, _weight in snapshot.top_neighbours(w, options):
                facts.append(Atom(RELATED_TO, (Const(w), Const(other))))
                facts.append(Atom(RELATED_TO, (Const(other), Const(w))))
                nxt.append(other)
        frontier = nxt
    return facts


def build_bk(
    sentences: Sequence[tuple[str, Sequence[str]]],
    categories: Sequence[str],
    snapshot: Snapshot,
    options: BkOptions = BkOptions(),
) -> BkBuild:
    """Contains-facts plus symmetric related_to facts for every sentence word
    and every category word; split mode yields one isolated store per example."""
    missing: list[str] = []

    def note_missing(word: str) -> None:
        if word not in snapshot.fetched_words and not snapshot.neighbours(word):
            if word not in missing:
                missing.append(word)

    def category_facts() -> list[Atom]:
        out: list[Atom] = []
        for c in categories:
            note_missing(c)
            out.extend(_related_facts(c, snapshot, options))
        return out

    def example_store(words: Sequence[str], cat_facts: list[Atom]) -> FactStore:
        store = FactStore()
        if words:
            store.add_clauses(contains_facts(words))
        for w in dict.fromkeys(words):
            note_missing(w)
            for f in _related_facts(w, snapshot, options):
                store.add(f)
        for f in cat_facts:
            store.add(f)
        return store

    cat_facts = category_facts()
    if options.split_per_example:
        stores = {
            ex_id: example_store(words, cat_facts) for ex_id, words in sentences
        }
        return BkBuild(shared=None, per_example=stores, missing_words=tuple(sorted(missing)))
    shared = FactStore()
    for _ex_id, words in sentences:
        for f in example_store(words, cat_facts):
            shared.add(f)
    return BkBuild(shared=shared, per_example=None, missing_words=tuple(sorted(missing)))
