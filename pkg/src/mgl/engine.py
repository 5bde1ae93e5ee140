"""Meta-interpretive learning: depth-bounded resolution, hypothesis search,
predicate invention, and the four hypothesis conditions.

`learn` runs iterative deepening on clause count: a Metagol-style
meta-interpreter proves the positives while instantiating metarules, then each
candidate program is checked against the negatives with an independent prover.
`brute_force_learn` enumerates the whole program space and serves as the
testing oracle.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional

from .logic import (
    Atom,
    Clause,
    FactStore,
    LogicError,
    Substitution,
    Var,
    apply_atom,
    render_clause,
    unify_terms,
    walk,
)
from .metarules import Metarule, instantiate


class TaskError(LogicError):
    pass


class SearchSpaceError(LogicError):
    def __init__(self, size: int, guard: int):
        super().__init__(f"brute-force space of {size} programs exceeds guard {guard}")
        self.size = size


@dataclass(frozen=True)
class LearnTask:
    metarules: tuple[Metarule, ...]
    background: FactStore
    positives: tuple[Atom, ...]
    negatives: tuple[Atom, ...]
    predicate_pool: tuple[str, ...]
    constant_pool: tuple[str, ...] = ()
    max_clauses: int = 4
    depth_limit: int = 10

    @property
    def target(self) -> str:
        return self.positives[0].predicate

    def validate(self) -> None:
        problems = []
        if not self.positives:
            problems.append("at least one positive example is required")
        if self.max_clauses < 1:
            problems.append("max_clauses must be >= 1")
        if self.depth_limit < 1:
            problems.append("depth_limit must be >= 1")
        for e in (*self.positives, *self.negatives):
            if not e.is_ground():
                problems.append(f"example {render_clause(Clause(e))} is not ground")
        if self.positives:
            target = self.positives[0].predicate
            for e in (*self.positives, *self.negatives):
                if e.predicate != target:
                    problems.append(
                        f"example predicate {e.predicate!r} differs from target {target!r}"
                    )
                    break
        if problems:
            raise TaskError("; ".join(problems))


@dataclass(frozen=True)
class Hypothesis:
    clauses: tuple[Clause, ...]
    metarule_names: tuple[str, ...]
    invented: tuple[str, ...] = ()

    def render(self) -> str:
        return "\n".join(render_clause(c) for c in self.clauses)


@dataclass(frozen=True)
class VerificationReport:
    complete: bool
    strongly_consistent: bool
    weakly_consistent: bool
    necessary: bool
    note: str = ""


@dataclass(frozen=True)
class ProofOutcome:
    proved: bool
    depth_exhausted: bool


def invent_symbol(target: str, existing) -> str:
    """Smallest-k fresh auxiliary predicate name `<target>_<k>`."""
    existing = set(existing)
    k = 1
    while f"{target}_{k}" in existing:
        k += 1
    return f"{target}_{k}"


# ---------------------------------------------------------------------------
# Depth-bounded resolution


class _Prover:
    def __init__(self, program, store: FactStore):
        self.store = store
        self.by_pred: dict[str, list[Clause]] = {}
        for c in program:
            self.by_pred.setdefault(c.head.predicate, []).append(c)
        self.exhausted = False
        self._fresh = itertools.count()
        self._memo: dict[tuple[Atom, int], bool] = {}

    def _freshen(self, c: Clause) -> Clause:
        names = c.variables()
        if not names:
            return c
        n = next(self._fresh)
        sub: Substitution = {v: Var(f"_{n}_{v}") for v in names}
        return Clause(apply_atom(sub, c.head), tuple(apply_atom(sub, b) for b in c.body))

    def _extend(self, g: Atom, h: Atom, s: Substitution) -> Optional[Substitution]:
        if g.predicate != h.predicate or len(g.args) != len(h.args):
            return None
        s2: Optional[Substitution] = s
        for x, y in zip(g.args, h.args):
            s2 = unify_terms(x, y, s2)
            if s2 is None:
                return None
        return s2

    def _resolve(self, g: Atom, d: int, s: Substitution):
        for fact in self.store.candidates(g.predicate):
            s2 = self._extend(g, fact, s)
            if s2 is not None:
                yield s2, ()
        for clause in self.by_pred.get(g.predicate, ()):
            rc = self._freshen(clause)
            s2 = self._extend(g, rc.head, s)
            if s2 is not None:
                yield s2, tuple((b, d - 1) for b in rc.body)

    def solve(self, goals, s: Substitution) -> Iterator[Substitution]:
        if not goals:
            yield s
            return
        (goal, d), rest = goals[0], goals[1:]
        g = apply_atom(s, goal)
        if d <= 0:
            self.exhausted = True
            return
        if g.is_ground():
            # ground subgoals are independent of the remaining goals; memoize
            if self._prove_ground(g, d):
                yield from self.solve(rest, s)
            return
        for s2, subgoals in self._resolve(g, d, s):
            yield from self.solve(subgoals + rest, s2)

    def _prove_ground(self, g: Atom, d: int) -> bool:
        key = (g, d)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        proved = False
        for s2, subgoals in self._resolve(g, d, {}):
            if next(self.solve(subgoals, s2), None) is not None:
                proved = True
                break
        self._memo[key] = proved
        return proved


def prove_goal(program, background: FactStore, goal: Atom, depth_limit: int) -> ProofOutcome:
    """Depth-bounded proof of a ground goal; reports bound exhaustion so the
    caller can tell a refutation from a truncation."""
    if depth_limit < 1:
        raise TaskError("depth_limit must be >= 1")
    if not goal.is_ground():
        raise TaskError("entailment goals must be ground")
    prover = _Prover(program, background)
    proved = next(prover.solve(((goal, depth_limit),), {}), None) is not None
    return ProofOutcome(proved, prover.exhausted and not proved)


def entails(program, background: FactStore, goal: Atom, depth_limit: int = 10) -> bool:
    return prove_goal(program, background, goal, depth_limit).proved


# ---------------------------------------------------------------------------
# Learner


def _invented_names(task: LearnTask) -> list[str]:
    """The auxiliary predicate names this task may invent, collision-free
    against the pool and background, at most max_clauses - 1 of them."""
    taken = set(task.predicate_pool) | task.background.predicates() | {task.target}
    out: list[str] = []
    while len(out) < task.max_clauses - 1:
        name = invent_symbol(task.target, taken)
        taken.add(name)
        out.append(name)
    return out


_Prog = tuple[tuple[Clause, str], ...]  # (clause, metarule name) in addition order


class _MetaInterpreter:
    def __init__(self, task: LearnTask, bound: int):
        self.task = task
        self.bound = bound
        self.invented_pool = _invented_names(task)
        self._fresh = itertools.count()

    def _freshen(self, c: Clause) -> Clause:
        names = c.variables()
        if not names:
            return c
        n = next(self._fresh)
        sub: Substitution = {v: Var(f"_m{n}_{v}") for v in names}
        return Clause(apply_atom(sub, c.head), tuple(apply_atom(sub, b) for b in c.body))

    def _extend(self, g: Atom, h: Atom, s: Substitution) -> Optional[Substitution]:
        if g.predicate != h.predicate or len(g.args) != len(h.args):
            return None
        s2: Optional[Substitution] = s
        for x, y in zip(g.args, h.args):
            s2 = unify_terms(x, y, s2)
            if s2 is None:
                return None
        return s2

    def _body_candidates(self, prog: _Prog) -> list[str]:
        # free second-order slots range over the pool plus invented symbols;
        # recursion through the target happens via metarule head sharing only
        used = _used_invented(prog, self.invented_pool)
        cands = list(self.task.predicate_pool)
        cands.extend(used)
        if len(used) < len(self.invented_pool):
            cands.append(self.invented_pool[len(used)])  # one fresh symbol
        return cands

    def _instantiations(self, m: Metarule, head_pred: str, prog: _Prog) -> Iterator[Clause]:
        so_vars = m.second_order_vars()
        if m.head.predicate_is_var:
            base = {m.head.predicate: head_pred}
            free = [v for v in so_vars if v != m.head.predicate]
        else:
            if m.head.predicate != head_pred:
                return
            base = {}
            free = so_vars
        cands = self._body_candidates(prog)
        slots = m.slots()
        for combo in itertools.product(cands, repeat=len(free)):
            choice = dict(base)
            choice.update(zip(free, combo))
            for consts in itertools.product(self.task.constant_pool, repeat=len(slots)):
                yield instantiate(m, choice, dict(zip(slots, consts)))

    def solve(self, goals, s: Substitution, prog: _Prog) -> Iterator[tuple[Substitution, _Prog]]:
        if not goals:
            yield s, prog
            return
        (goal, d), rest = goals[0], goals[1:]
        g = apply_atom(s, goal)
        if d <= 0:
            return
        for fact in self.task.background.candidates(g.predicate):
            s2 = self._extend(g, fact, s)
            if s2 is not None:
                yield from self.solve(rest, s2, prog)
        for clause, _ in prog:
            if clause.head.predicate != g.predicate:
                continue
            rc = self._freshen(clause)
            s2 = self._extend(g, rc.head, s)
            if s2 is not None:
                yield from self.solve(tuple((b, d - 1) for b in rc.body) + rest, s2, prog)
        if len(prog) < self.bound and self._may_head(g.predicate):
            existing = {render_clause(c) for c, _ in prog}
            for m in self.task.metarules:
                if len(m.head.args) != g.arity:
                    continue
                for clause in self._instantiations(m, g.predicate, prog):
                    if render_clause(clause) in existing:
                        continue
                    rc = self._freshen(clause)
                    s2 = self._extend(g, rc.head, s)
                    if s2 is None:
                        continue
                    prog2 = prog + ((clause, m.name),)
                    yield from self.solve(
                        tuple((b, d - 1) for b in rc.body) + rest, s2, prog2
                    )

    def _may_head(self, pred: str) -> bool:
        return pred == self.task.target or pred in self.invented_pool

    def programs(self) -> Iterator[_Prog]:
        """All programs (in search order) whose construction proves every
        positive within the clause bound."""

        def go(examples, prog: _Prog) -> Iterator[_Prog]:
            if not examples:
                yield prog
                return
            for _, prog2 in self.solve(((examples[0], self.task.depth_limit),), {}, prog):
                yield from go(examples[1:], prog2)

        yield from go(list(self.task.positives), ())


def _used_invented(prog: _Prog, invented_pool: list[str]) -> list[str]:
    pool = set(invented_pool)
    used = set()
    for clause, _ in prog:
        for atom in clause.atoms():
            if atom.predicate in pool:
                used.add(atom.predicate)
    return [p for p in invented_pool if p in used]


def _make_hypothesis(prog: _Prog, task: LearnTask) -> Hypothesis:
    invented = _used_invented(prog, _invented_names(task))
    return Hypothesis(
        clauses=tuple(c for c, _ in prog),
        metarule_names=tuple(n for _, n in prog),
        invented=tuple(invented),
    )


def _consistent(clauses, task: LearnTask) -> bool:
    return not any(
        entails(clauses, task.background, n, task.depth_limit) for n in task.negatives
    )


def learn(task: LearnTask) -> Optional[Hypothesis]:
    """Minimal-clause-count hypothesis satisfying completeness and strong
    consistency, or None when no hypothesis exists within the task bounds."""
    task.validate()
    if set(task.positives) & set(task.negatives):
        return None  # the same atom cannot be both covered and excluded
    for bound in range(0, task.max_clauses + 1):
        interp = _MetaInterpreter(task, bound)
        seen: set[frozenset[str]] = set()
        for prog in interp.programs():
            if len(prog) != bound:
                continue  # smaller programs were exhausted at earlier bounds
            key = frozenset(render_clause(c) for c, _ in prog)
            if key in seen:
                continue
            seen.add(key)
            if _consistent([c for c, _ in prog], task):
                return _make_hypothesis(prog, task)
    return None


def verify(h: Hypothesis, task: LearnTask) -> VerificationReport:
    """Check the four hypothesis conditions with the independent prover."""
    complete = all(
        entails(h.clauses, task.background, p, task.depth_limit) for p in task.positives
    )
    strong = not any(
        entails(h.clauses, task.background, n, task.depth_limit) for n in task.negatives
    )
    necessary = any(
        not entails((), task.background, p, task.depth_limit) for p in task.positives
    )
    return VerificationReport(
        complete=complete,
        strongly_consistent=strong,
        weakly_consistent=True,
        necessary=necessary,
        note="weak consistency holds trivially: positive datalog derives no contradiction",
    )


# ---------------------------------------------------------------------------
# Brute-force oracle


BRUTE_FORCE_GUARD = 10_000_000


def _candidate_clauses(task: LearnTask) -> list[tuple[Clause, str]]:
    invented = _invented_names(task)
    heads = [task.target] + invented
    body_cands = list(task.predicate_pool)
    body_cands.extend(invented)
    out: list[tuple[Clause, str]] = []
    seen: set[str] = set()
    for m in task.metarules:
        so_vars = m.second_order_vars()
        slots = m.slots()
        for head in heads:
            if m.head.predicate_is_var:
                base = {m.head.predicate: head}
                free = [v for v in so_vars if v != m.head.predicate]
            else:
                if m.head.predicate != head:
                    continue
                base = {}
                free = so_vars
            for combo in itertools.product(body_cands, repeat=len(free)):
                choice = dict(base)
                choice.update(zip(free, combo))
                for consts in itertools.product(task.constant_pool, repeat=len(slots)):
                    clause = instantiate(m, choice, dict(zip(slots, consts)))
                    r = render_clause(clause)
                    if r not in seen:
                        seen.add(r)
                        out.append((clause, m.name))
    return out


def _plausible(combo: _Prog, task: LearnTask, invented: list[str]) -> bool:
    if not combo:
        return True
    heads = {c.head.predicate for c, _ in combo}
    if task.target not in heads:
        return False
    body_preds = {b.predicate for c, _ in combo for b in c.body}
    inv = set(invented)
    # every referenced invented predicate must be defined
    if any(p in inv and p not in heads for p in body_preds):
        return False
    # every defined invented predicate must be referenced somewhere
    if any(h in inv and h not in body_preds for h in heads):
        return False
    # canonical naming: invented symbols used form a prefix of the pool
    used = [p for p in invented if p in heads | body_preds]
    if used != invented[: len(used)]:
        return False
    return True


def brute_force_learn(
    task: LearnTask, guard: int = BRUTE_FORCE_GUARD
) -> Optional[Hypothesis]:
    """Exhaustive program enumeration in deterministic order; ground truth for
    `learn` on small tasks."""
    task.validate()
    if set(task.positives) & set(task.negatives):
        return None  # the same atom cannot be both covered and excluded
    cands = _candidate_clauses(task)
    total = sum(comb(len(cands), k) for k in range(0, task.max_clauses + 1))
    if total > guard:
        raise SearchSpaceError(total, guard)
    invented = _invented_names(task)
    for k in range(0, task.max_clauses + 1):
        for combo in itertools.combinations(cands, k):
            if not _plausible(combo, task, invented):
                continue
            clauses = [c for c, _ in combo]
            if not all(
                entails(clauses, task.background, p, task.depth_limit)
                for p in task.positives
            ):
                continue
            if _consistent(clauses, task):
                return _make_hypothesis(combo, task)
    return None
