import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prestar.grammar import (
    Grammar,
    GrammarError,
    build_index,
    is_extended_cnf,
    normalize,
    occurring_symbols,
    parse_grammar,
    render_grammar,
)
from prestar.oracle import derivable_forms, random_grammar

from .conftest import FIG1_GRAMMAR, names


def rule_strings(productions):
    return [str(p) for p in productions]


def test_parse_single_rule():
    g = parse_grammar("S -> a")
    assert names(g.variables) == {"S"}
    assert names(g.terminals) == {"a"}
    assert rule_strings(g.productions) == ["S -> a"]
    assert g.start.name == "S"


def test_parse_fig1():
    g = parse_grammar(FIG1_GRAMMAR)
    assert names(g.variables) == {"A", "B"}
    assert names(g.terminals) == {"a", "b"}
    assert rule_strings(g.productions) == ["A -> a", "A -> B B", "B -> A B", "B -> b"]
    assert g.start.name == "A"


def test_parse_eps():
    g = parse_grammar("S -> eps")
    assert len(g.productions) == 1 and g.productions[0].body == ()


def test_parse_start_comments_and_continuations():
    g = parse_grammar(
        """
        # leading comment
        start: T
        S -> a S b   # trailing comment
           | eps
        T -> S S
        """
    )
    assert g.start.name == "T"
    assert rule_strings(g.productions) == ["S -> a S b", "S -> eps", "T -> S S"]


def test_symbol_ids_are_dense_and_unique():
    g = parse_grammar(FIG1_GRAMMAR)
    assert sorted(s.id for s in g.symbols) == list(range(len(g.symbols)))


@pytest.mark.parametrize(
    "text, line",
    [
        ("S a", 1),
        ("S -> a\nB ->", 2),
        ("S -> a |", 1),
        ("S -> a eps", 1),
        ("| a", 1),
        ("start: X\nS -> a", 1),
        ("S -> a\nstart: S T", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(GrammarError) as exc:
        parse_grammar(text)
    assert exc.value.line == line


def test_empty_rule_set_rejected():
    with pytest.raises(GrammarError):
        parse_grammar("# nothing here\n")


def test_with_start():
    g = parse_grammar(FIG1_GRAMMAR).with_start("B")
    assert g.start.name == "B"
    with pytest.raises(GrammarError):
        g.with_start("a")


names_st = st.sampled_from(["S", "A", "B", "C"])
terms_st = st.sampled_from(["a", "b", "c", "x1"])


@st.composite
def grammars(draw):
    heads = draw(st.lists(names_st, min_size=1, max_size=4, unique=True))
    rules = []
    for h in heads:
        for _ in range(draw(st.integers(1, 3))):
            body = draw(st.lists(st.one_of(st.sampled_from(heads), terms_st), max_size=4))
            rules.append((h, tuple(body)))
    start = draw(st.sampled_from(heads))
    return Grammar.build(rules, start=start)


@given(grammars())
def test_render_round_trip(g):
    assert parse_grammar(render_grammar(g)) == g


def test_render_format():
    g = parse_grammar("start: B\nA -> a | eps\nB -> A B")
    assert render_grammar(g) == "start: B\nA -> a | eps\nB -> A B\n"


# normalization


def test_normalize_fig1_unchanged():
    g = parse_grammar(FIG1_GRAMMAR)
    ng = normalize(g)
    assert ng.grammar == g
    assert not ng.fresh


def test_normalize_a_s_b():
    ng = normalize(parse_grammar("S -> a S b"))
    assert rule_strings(ng.productions) == ["S -> _a S#1", "S#1 -> S _b", "_a -> a", "_b -> b"]
    src = ng.source.productions[0]
    assert ng.origin[ng.productions[0]] == src
    assert ng.origin[ng.productions[1]] == src
    assert ng.origin[ng.productions[2]] is None


def test_normalize_binarize():
    ng = normalize(parse_grammar("S -> A B C\nA -> a\nB -> b\nC -> c"))
    assert rule_strings(ng.productions)[:2] == ["S -> A S#1", "S#1 -> B C"]


def test_normalize_counter_is_global_and_names_avoid_clashes():
    ng = normalize(parse_grammar("S -> a b c\nT -> S S S\n_a -> a"))
    fresh = sorted(s.name for s in ng.fresh)
    assert fresh == ["S#1", "T#2", "_a'", "_b", "_c"]


def test_normalize_shapes_and_size_bound():
    rng = random.Random(5)
    for _ in range(300):
        g = random_grammar(rng, max_body=5)
        ng = normalize(g)
        assert all(is_extended_cnf(p) for p in ng.productions)
        body_total = sum(len(p.body) for p in g.productions)
        assert len(ng.productions) <= 3 * body_total + len(g.productions)


def test_normalize_idempotent():
    rng = random.Random(6)
    for _ in range(100):
        ng = normalize(random_grammar(rng))
        again = normalize(ng.grammar)
        assert again.grammar == ng.grammar
        assert not again.fresh


def _terminal_words(g, max_len):
    rules = [(p.lhs.name, tuple(s.name for s in p.body)) for p in g.productions]
    terminals = {t.name for t in g.terminals}
    only_terminals = lambda w: all(s in terminals for s in w)
    forms = derivable_forms(rules, [s.name for s in g.symbols], max_len, keep=only_terminals)
    return {w for w in forms[g.start.name] if all(s in terminals for s in w)}


def test_normalize_preserves_language():
    rng = random.Random(8)
    for _ in range(150):
        g = random_grammar(rng)
        ng = normalize(g)
        assert _terminal_words(g, 6) == _terminal_words(ng.grammar, 6)


# production index


def test_build_index_fig1():
    idx = build_index(normalize(parse_grammar(FIG1_GRAMMAR)))
    show = lambda bucket: {k.name: rule_strings(v) for k, v in bucket.items()}
    assert show(idx.front) == {"B": ["A -> B B"], "A": ["B -> A B"]}
    assert show(idx.back) == {"B": ["A -> B B", "B -> A B"]}
    assert show(idx.term) == {"a": ["A -> a"], "b": ["B -> b"]}
    assert idx.chain == {} and idx.eps == []
    assert idx.p == 4


def test_build_index_empty_and_eps():
    g = Grammar.build([], start="S", variables=["S"])
    idx = build_index(g)
    assert (idx.chain, idx.front, idx.back, idx.term, idx.eps, idx.p) == ({}, {}, {}, {}, [], 0)
    idx = build_index(parse_grammar("S -> eps"))
    assert rule_strings(idx.eps) == ["S -> eps"] and idx.p == 1


def test_build_index_rejects_long_bodies():
    with pytest.raises(GrammarError):
        build_index(parse_grammar("S -> a b"))


def test_build_index_matches_direct_scan():
    rng = random.Random(9)
    for _ in range(200):
        ng = normalize(random_grammar(rng))
        idx = build_index(ng)
        expected = Counter()
        for p in ng.productions:
            b = p.body
            if not b:
                expected["eps", None, p] += 1
            elif len(b) == 1:
                expected["term" if b[0].is_terminal else "chain", b[0], p] += 1
            else:
                expected["front", b[0], p] += 1
                expected["back", b[1], p] += 1
        got = Counter()
        for kind in ("chain", "front", "back", "term"):
            for sym, prods in getattr(idx, kind).items():
                for p in prods:
                    got[kind, sym, p] += 1
        for p in idx.eps:
            got["eps", None, p] += 1
        assert got == expected


def test_occurring_symbols():
    assert names(occurring_symbols(normalize(parse_grammar(FIG1_GRAMMAR)))) == {"A", "B", "a", "b"}
    assert occurring_symbols(Grammar.build([], start="S", variables=["S"])) == set()
    assert names(occurring_symbols(parse_grammar("S -> eps"))) == {"S"}
