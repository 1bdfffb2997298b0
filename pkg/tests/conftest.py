import pytest
from hypothesis import settings

from prestar import parse_automaton, parse_grammar

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

FIG1_GRAMMAR = """\
A -> a | B B
B -> A B | b
"""

FIG1_AUTOMATON = """\
states: q0 q1 q2
initial: q0
final: q2
q0 a q1
q1 b q2
q2 a q1
"""


@pytest.fixture
def fig1_grammar():
    return parse_grammar(FIG1_GRAMMAR)


@pytest.fixture
def fig1_automaton(fig1_grammar):
    return parse_automaton(FIG1_AUTOMATON, fig1_grammar)


def names(symbols):
    return {s.name for s in symbols}


def triples(transitions):
    return {(q, s.name, r) for q, s, r in transitions}


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []
_SESSION_START = [0.0]


def pytest_sessionstart(session):
    import time

    _SESSION_START[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time

    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _SESSION_START[0]
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    status = "PASS" if elapsed < 60 else "FAIL"
    terminalreporter.write_line(f"{status} suite runtime: {elapsed:.1f} s (limit 60 s)")
