"""Second-order clause templates and their instantiation.

A metarule is a clause template whose predicate positions hold second-order
variables (uppercase) standing for predicate symbols, with optional constant
slots written `$c`. The built-in library covers the standard ident / chain /
tailrec forms plus their constant-slot variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .logic import (
    Atom,
    Clause,
    Const,
    LogicError,
    ParseError,
    Var,
    canonicalize,
    _tokenize,
    _Parser,
)


class MetaruleError(LogicError):
    pass


@dataclass(frozen=True)
class Slot:
    """A constant slot in a metarule; filled from the task's constant pool."""

    name: str


MetaTerm = Union[Var, Slot, Const]


@dataclass(frozen=True)
class MetaAtom:
    predicate: str  # second-order variable (uppercase) or a fixed symbol
    args: tuple[MetaTerm, ...]

    @property
    def predicate_is_var(self) -> bool:
        return self.predicate[0].isupper()


@dataclass(frozen=True)
class Metarule:
    name: str
    head: MetaAtom
    body: tuple[MetaAtom, ...]

    def second_order_vars(self) -> list[str]:
        """Second-order variables in order of first occurrence, head first."""
        out: list[str] = []
        for atom in (self.head, *self.body):
            if atom.predicate_is_var and atom.predicate not in out:
                out.append(atom.predicate)
        return out

    def slots(self) -> list[str]:
        out: list[str] = []
        for atom in (self.head, *self.body):
            for t in atom.args:
                if isinstance(t, Slot) and t.name not in out:
                    out.append(t.name)
        return out


def instantiate(
    m: Metarule,
    predicate_choice: dict[str, str],
    constant_choice: Optional[dict[str, str]] = None,
) -> Clause:
    """Fill every second-order variable and constant slot, yielding a
    canonically renamed first-order clause."""
    constant_choice = constant_choice or {}

    def fill_pred(p: str) -> str:
        if not p[0].isupper():
            return p
        if p not in predicate_choice:
            raise MetaruleError(f"unbound second-order variable {p!r} in metarule {m.name!r}")
        return predicate_choice[p]

    def fill_term(t: MetaTerm):
        if isinstance(t, Slot):
            if t.name not in constant_choice:
                raise MetaruleError(f"unbound constant slot ${t.name} in metarule {m.name!r}")
            return Const(constant_choice[t.name])
        return t

    def fill_atom(a: MetaAtom) -> Atom:
        return Atom(fill_pred(a.predicate), tuple(fill_term(t) for t in a.args))

    return canonicalize(Clause(fill_atom(m.head), tuple(fill_atom(b) for b in m.body)))


# ---------------------------------------------------------------------------
# Parsing: `meta chain: P(A,B) :- Q(A,C), R(C,B).`


def _parse_meta_atom(parser: _Parser) -> MetaAtom:
    tok = parser.next()
    if tok.kind not in ("const", "var"):
        raise ParseError(f"expected predicate, found {tok.text!r}", tok.line, tok.col)
    pred = tok.text
    args: list[MetaTerm] = []
    parser.expect("(")
    while True:
        t = parser.next()
        if t.kind == "var":
            args.append(Var(t.text))
        elif t.kind == "const":
            args.append(Const(t.text))
        elif t.kind == "$":
            name = parser.expect("const")
            args.append(Slot(name.text))
        else:
            raise ParseError(f"expected term, found {t.text!r}", t.line, t.col)
        sep = parser.next()
        if sep.kind == ")":
            break
        if sep.kind != ",":
            raise ParseError(f"expected ',' or ')', found {sep.text!r}", sep.line, sep.col)
    return MetaAtom(pred, tuple(args))


def parse_metarule(text: str) -> Metarule:
    """Parse one `meta <name>: <head> :- <body>.` definition."""
    stripped = text.strip()
    if not stripped.startswith("meta "):
        raise ParseError("metarule definition must start with 'meta'", 1, 1)
    rest = stripped[len("meta ") :]
    if ":" not in rest:
        raise ParseError("metarule definition needs 'meta <name>: <template>.'", 1, 1)
    name, template = rest.split(":", 1)
    name = name.strip()
    if not name or not name[0].islower():
        raise ParseError(f"invalid metarule name {name!r}", 1, 1)
    parser = _Parser(_tokenize(template))
    head = _parse_meta_atom(parser)
    body: list[MetaAtom] = []
    tok = parser.next()
    if tok.kind == ":-":
        while True:
            body.append(_parse_meta_atom(parser))
            tok = parser.next()
            if tok.kind == ".":
                break
            if tok.kind != ",":
                raise ParseError(f"expected ',' or '.', found {tok.text!r}", tok.line, tok.col)
    elif tok.kind != ".":
        raise ParseError(f"expected ':-' or '.', found {tok.text!r}", tok.line, tok.col)
    rule = Metarule(name, head, tuple(body))
    _check_metarule(rule)
    return rule


def _check_metarule(m: Metarule) -> None:
    body_vars = {t.name for a in m.body for t in a.args if isinstance(t, Var)}
    head_vars = {t.name for t in m.head.args if isinstance(t, Var)}
    loose = head_vars - body_vars
    if m.body and loose:
        raise MetaruleError(
            f"metarule {m.name!r}: head variables {sorted(loose)} missing from body"
        )


def render_metarule(m: Metarule) -> str:
    def rt(t: MetaTerm) -> str:
        if isinstance(t, Slot):
            return "$" + t.name
        if isinstance(t, Const):
            return t.symbol
        return t.name

    def ra(a: MetaAtom) -> str:
        return a.predicate + "(" + ",".join(rt(t) for t in a.args) + ")"

    body = "" if not m.body else " :- " + ", ".join(ra(b) for b in m.body)
    return f"meta {m.name}: {ra(m.head)}{body}."


# ---------------------------------------------------------------------------
# Built-in library (names fixed)

_BUILTIN_DEFS = [
    "meta ident: P(A,B) :- Q(A,B).",
    "meta ident_const: P(A,$c) :- Q(A,$c).",
    "meta chain: P(A,B) :- Q(A,C), R(C,B).",
    "meta tailrec: P(A,B) :- Q(A,C), P(C,B).",
    "meta chain_const: P(A,$c) :- Q(A,C), R(C,$c).",
]

BUILTIN_METARULES: dict[str, Metarule] = {
    m.name: m for m in (parse_metarule(d) for d in _BUILTIN_DEFS)
}


def builtin(name: str) -> Metarule:
    try:
        return BUILTIN_METARULES[name]
    except KeyError:
        raise MetaruleError(
            f"unknown metarule {name!r}; built-ins: {', '.join(BUILTIN_METARULES)}"
        ) from None


def resolve_metarules(names: list[str]) -> tuple[Metarule, ...]:
    return tuple(builtin(n) for n in names)
