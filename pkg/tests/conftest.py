import os

import pytest

from mgl.engine import LearnTask
from mgl.logic import FactStore, parse_program
from mgl.metarules import resolve_metarules

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(*parts: str) -> str:
    return os.path.join(FIXTURES, *parts)


def read_program(path: str):
    with open(path, encoding="utf-8") as f:
        return parse_program(f.read())


def load_fixture_task(
    name: str,
    metarules=("chain",),
    constants=(),
    max_clauses=4,
    depth_limit=10,
) -> LearnTask:
    bk = read_program(fixture_path(name, "bk.facts"))
    store = FactStore()
    store.add_clauses(bk)
    pool = tuple(dict.fromkeys(c.head.predicate for c in bk))
    return LearnTask(
        metarules=resolve_metarules(list(metarules)),
        background=store,
        positives=tuple(c.head for c in read_program(fixture_path(name, "pos.facts"))),
        negatives=tuple(c.head for c in read_program(fixture_path(name, "neg.facts"))),
        predicate_pool=pool,
        constant_pool=tuple(constants),
        max_clauses=max_clauses,
        depth_limit=depth_limit,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion pass/fail lines after the test summary."""
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def chain_task() -> LearnTask:
    return load_fixture_task("chain_task")


@pytest.fixture
def invention_task() -> LearnTask:
    return load_fixture_task("invention_task")


@pytest.fixture
def recursion_task() -> LearnTask:
    return load_fixture_task(
        "recursion_task",
        metarules=("chain", "tailrec", "ident_const"),
        constants=("home",),
    )
