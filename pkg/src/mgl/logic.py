"""Datalog term language: terms, atoms, clauses, unification, parsing, rendering.

The fact/rule text format: one `.`-terminated statement per line (whitespace
insensitive), `%` starts a comment, word lists written `[w1,w2]` with no
internal spaces. Constants match ``[a-z][a-z0-9_]*``, variables
``[A-Z][A-Za-z0-9_]*``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class LogicError(Exception):
    pass


class ParseError(LogicError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class ArityConflictError(ParseError):
    def __init__(self, predicate: str, seen: int, now: int, line: int, col: int):
        super().__init__(
            f"arity conflict for predicate '{predicate}': {seen} vs {now}", line, col
        )
        self.predicate = predicate


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    symbol: str


@dataclass(frozen=True)
class WordList:
    words: tuple[str, ...]


Term = Union[Var, Const, WordList]
Substitution = dict[str, Term]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> set[str]:
        return {a.name for a in self.args if isinstance(a, Var)}

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()

    @property
    def is_fact(self) -> bool:
        return not self.body

    def atoms(self) -> Iterator[Atom]:
        yield self.head
        yield from self.body

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= a.variables()
        return out


# ---------------------------------------------------------------------------
# Unification


def walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def occurs(name: str, t: Term, s: Substitution) -> bool:
    t = walk(t, s)
    return isinstance(t, Var) and t.name == name


def unify_terms(x: Term, y: Term, s: Substitution) -> Optional[Substitution]:
    """Extend substitution s so that x and y become equal, or return None."""
    x, y = walk(x, s), walk(y, s)
    if x == y:
        return s
    if isinstance(x, Var):
        if occurs(x.name, y, s):
            return None
        s2 = dict(s)
        s2[x.name] = y
        return s2
    if isinstance(y, Var):
        return unify_terms(y, x, s)
    return None  # distinct constants / word lists


def unify(a: Atom, b: Atom) -> Optional[Substitution]:
    """Most general unifier of two atoms, or None on clash.

    The returned substitution is fully resolved (applying it twice equals
    applying it once).
    """
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    s: Optional[Substitution] = {}
    for x, y in zip(a.args, b.args):
        s = unify_terms(x, y, s)
        if s is None:
            return None
    return {name: walk(t, s) for name, t in s.items()}


def apply_term(s: Substitution, t: Term) -> Term:
    return walk(t, s)


def apply_atom(s: Substitution, a: Atom) -> Atom:
    return Atom(a.predicate, tuple(walk(t, s) for t in a.args))


def apply_clause(s: Substitution, c: Clause) -> Clause:
    return Clause(apply_atom(s, c.head), tuple(apply_atom(s, b) for b in c.body))


def apply(s: Substitution, x):
    """Apply a substitution to an Atom or Clause."""
    if isinstance(x, Atom):
        return apply_atom(s, x)
    if isinstance(x, Clause):
        return apply_clause(s, x)
    raise TypeError(f"cannot apply substitution to {type(x).__name__}")


# ---------------------------------------------------------------------------
# Canonical rendering


def _canonical_names() -> Iterator[str]:
    letters = string.ascii_uppercase
    i = 0
    while True:
        yield letters[i % 26] + ("" if i < 26 else str(i // 26))
        i += 1


def canonicalize(c: Clause) -> Clause:
    """Rename variables to A,B,C,... in first-occurrence order, head first."""
    mapping: dict[str, str] = {}
    names = _canonical_names()
    for atom in c.atoms():
        for t in atom.args:
            if isinstance(t, Var) and t.name not in mapping:
                mapping[t.name] = next(names)

    def ren(a: Atom) -> Atom:
        return Atom(
            a.predicate,
            tuple(Var(mapping[t.name]) if isinstance(t, Var) else t for t in a.args),
        )

    return Clause(ren(c.head), tuple(ren(b) for b in c.body))


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.symbol
    return "[" + ",".join(t.words) + "]"


def render_atom(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return a.predicate + "(" + ",".join(render_term(t) for t in a.args) + ")"


def render_clause(c: Clause) -> str:
    c = canonicalize(c)
    if c.is_fact:
        return render_atom(c.head) + "."
    return render_atom(c.head) + " :- " + ", ".join(render_atom(b) for b in c.body) + "."


def render(program: Iterable[Clause]) -> str:
    return "\n".join(render_clause(c) for c in program)


def alpha_equivalent(a: Clause, b: Clause) -> bool:
    return render_clause(a) == render_clause(b)


# ---------------------------------------------------------------------------
# Parsing


@dataclass
class _Token:
    kind: str  # 'const' | 'var' | punctuation
    text: str
    line: int
    col: int


_PUNCT = {"(", ")", "[", "]", ",", ".", "$"}  # '$' only valid in metarule syntax


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == ":" and text[i : i + 2] == ":-":
            tokens.append(_Token(":-", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if ch.isupper() else "const"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col + len(last.text))
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text)
        if tok.kind == "const":
            return Const(tok.text)
        if tok.kind == "[":
            words: list[str] = []
            if self.peek() and self.peek().kind == "]":
                self.next()
                return WordList(())
            while True:
                w = self.next()
                if w.kind != "const":
                    raise ParseError(f"word list entries must be constants, found {w.text!r}", w.line, w.col)
                words.append(w.text)
                sep = self.next()
                if sep.kind == "]":
                    return WordList(tuple(words))
                if sep.kind != ",":
                    raise ParseError(f"expected ',' or ']', found {sep.text!r}", sep.line, sep.col)
        raise ParseError(f"expected term, found {tok.text!r}", tok.line, tok.col)

    def parse_atom(self) -> Atom:
        tok = self.expect("const")
        args: list[Term] = []
        nxt = self.peek()
        if nxt is not None and nxt.kind == "(":
            self.next()
            while True:
                args.append(self.parse_term())
                sep = self.next()
                if sep.kind == ")":
                    break
                if sep.kind != ",":
                    raise ParseError(f"expected ',' or ')', found {sep.text!r}", sep.line, sep.col)
        return Atom(tok.text, tuple(args))

    def parse_clause(self) -> Clause:
        start = self.peek()
        head = self.parse_atom()
        body: list[Atom] = []
        tok = self.next()
        if tok.kind == ":-":
            while True:
                body.append(self.parse_atom())
                tok = self.next()
                if tok.kind == ".":
                    break
                if tok.kind != ",":
                    raise ParseError(f"expected ',' or '.', found {tok.text!r}", tok.line, tok.col)
        elif tok.kind != ".":
            raise ParseError(f"expected ':-' or '.', found {tok.text!r}", tok.line, tok.col)
        clause = Clause(head, tuple(body))
        _check_clause(clause, start.line, start.col)
        return clause


def _check_clause(c: Clause, line: int, col: int) -> None:
    if c.is_fact:
        if not c.head.is_ground():
            raise ParseError(f"ground fact expected, found variables in {render_atom(c.head)}", line, col)
    else:
        head_vars = c.head.variables()
        body_vars: set[str] = set()
        for b in c.body:
            body_vars |= b.variables()
        loose = head_vars - body_vars
        if loose:
            raise ParseError(
                f"head variables {sorted(loose)} do not appear in the body", line, col
            )


def parse_program(text: str) -> list[Clause]:
    """Parse a whole program; raises ParseError / ArityConflictError."""
    parser = _Parser(_tokenize(text))
    clauses: list[Clause] = []
    arities: dict[str, int] = {}
    while parser.peek() is not None:
        start = parser.peek()
        clause = parser.parse_clause()
        for atom in clause.atoms():
            seen = arities.get(atom.predicate)
            if seen is None:
                arities[atom.predicate] = atom.arity
            elif seen != atom.arity:
                raise ArityConflictError(atom.predicate, seen, atom.arity, start.line, start.col)
        clauses.append(clause)
    return clauses


def parse_clause(text: str) -> Clause:
    clauses = parse_program(text)
    if len(clauses) != 1:
        raise ParseError(f"expected exactly one clause, found {len(clauses)}", 1, 1)
    return clauses[0]


def parse_atom(text: str) -> Atom:
    """Parse a single atom; unlike facts, variables are allowed."""
    parser = _Parser(_tokenize(text))
    atom = parser.parse_atom()
    trailing = parser.peek()
    if trailing is not None and trailing.kind != ".":
        raise ParseError(f"trailing input after atom: {trailing.text!r}", trailing.line, trailing.col)
    return atom


# ---------------------------------------------------------------------------
# Fact store


class FactStore:
    """Indexed ground background knowledge.

    Facts are deduplicated and kept in insertion order; `render` is sorted so
    two stores with the same facts render identically.
    """

    def __init__(self, facts: Iterable[Atom] = ()):
        self._facts: list[Atom] = []
        self._seen: set[Atom] = set()
        self._by_pred: dict[str, list[Atom]] = {}
        for f in facts:
            self.add(f)

    def add(self, fact: Atom) -> None:
        if not fact.is_ground():
            raise LogicError(f"fact store only holds ground atoms: {render_atom(fact)}")
        if fact in self._seen:
            return
        self._seen.add(fact)
        self._facts.append(fact)
        self._by_pred.setdefault(fact.predicate, []).append(fact)

    def add_clauses(self, clauses: Iterable[Clause]) -> None:
        for c in clauses:
            if not c.is_fact:
                raise LogicError(f"fact store only holds facts: {render_clause(c)}")
            self.add(c.head)

    def candidates(self, predicate: str) -> list[Atom]:
        return self._by_pred.get(predicate, [])

    def merged(self, other: "FactStore") -> "FactStore":
        out = FactStore(self._facts)
        for f in other:
            out.add(f)
        return out

    def __contains__(self, fact: Atom) -> bool:
        return fact in self._seen

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._facts)

    def __len__(self) -> int:
        return len(self._facts)

    def predicates(self) -> set[str]:
        return set(self._by_pred)

    def render(self) -> str:
        return "\n".join(sorted(render_atom(f) + "." for f in self._facts))

    def __eq__(self, other) -> bool:
        return isinstance(other, FactStore) and self._seen == other._seen

    def __repr__(self) -> str:
        return f"FactStore({len(self._facts)} facts)"
