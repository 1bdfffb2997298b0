"""Standard grammar questions answered by one saturation each.

Every analysis follows the same recipe: normalize the grammar, build an
automaton for a suitable regular language, saturate, and look for a single
transition labelled by the variable of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automaton import (
    DEFAULT_MAX_DFA_STATES,
    Nfa,
    complement,
    epsilon_automaton,
    pumping_pattern_automaton,
    sigma_star_automaton,
    tstar_A_tstar_automaton,
    word_automaton,
)
from .grammar import Grammar, NormalizedGrammar, Symbol, build_index, normalize
from .saturation import Counters, Derivation, SaturatedAutomaton, extract_derivation, saturate


def _saturate(ng: NormalizedGrammar, a: Nfa, stats: list[Counters] | None) -> SaturatedAutomaton:
    sat = saturate(build_index(ng), a)
    if stats is not None:
        stats.append(sat.counters)
    return sat


def _resolve_word(g: Grammar, word: Iterable[str | Symbol]) -> list[Symbol]:
    out = []
    for tok in word:
        name = tok.name if isinstance(tok, Symbol) else tok
        if name not in g or g.symbol(name) not in g.terminals:
            raise KeyError(f"{name!r} is not a terminal of the grammar")
        out.append(g.symbol(name))
    return out


def _word_prestar(g: Grammar, word, stats) -> tuple[NormalizedGrammar, SaturatedAutomaton, int]:
    w = _resolve_word(g, word)
    ng = normalize(g)
    sat = _saturate(ng, word_automaton(w, g.terminals), stats)
    return ng, sat, len(w)


def membership(g: Grammar, word: Iterable[str | Symbol], stats: list[Counters] | None = None) -> bool:
    """Does the start symbol derive ``word``?"""
    ng, sat, n = _word_prestar(g, word, stats)
    return (0, ng.start, n) in sat.nfa


@dataclass(frozen=True)
class Parse:
    """A derivation over the normalized grammar plus the map back to the source grammar."""

    tree: Derivation
    grammar: NormalizedGrammar

    def original(self) -> Derivation:
        return restore_derivation(self.tree, self.grammar)


def parse(g: Grammar, word: Iterable[str | Symbol], stats: list[Counters] | None = None) -> Parse | None:
    """A derivation of ``word`` from the start symbol, or None if there is none."""
    ng, sat, n = _word_prestar(g, word, stats)
    t = (0, ng.start, n)
    if t not in sat.nfa:
        return None
    return Parse(extract_derivation(sat, t), ng)


def restore_derivation(tree: Derivation, ng: NormalizedGrammar) -> Derivation:
    """Fold helper and wrapper nodes of a normalized derivation back into source productions."""
    if tree.is_leaf:
        return tree
    src = ng.origin.get(tree.production)
    if src is None or tree.label in ng.fresh:
        raise ValueError(f"{tree.production} does not start a source production")
    kids: list[Derivation] = []
    pending = list(reversed(tree.children))
    while pending:
        child = pending.pop()
        if child.label in ng.helpers and not child.is_leaf:
            pending.extend(reversed(child.children))
        elif child.label in ng.wrappers and not child.is_leaf:
            kids.append(Derivation(ng.wrappers[child.label]))
        else:
            kids.append(restore_derivation(child, ng))
    return Derivation(src.lhs, src, tuple(kids))


def productive_variables(g: Grammar, stats: list[Counters] | None = None) -> set[Symbol]:
    """Variables deriving some terminal string: one saturation against T*."""
    ng = normalize(g)
    sat = _saturate(ng, sigma_star_automaton(g.terminals), stats)
    return {v for v in g.variables if (0, v, 0) in sat.nfa}


def is_reachable(g: Grammar, var: Symbol, stats: list[Counters] | None = None,
                 sentential: bool = False) -> bool:
    """Does ``S =>* u var v`` hold for terminal strings ``u, v``?

    With ``sentential=True`` the context may be any sentential form, which
    amounts to plain reachability in the production graph.
    """
    ng = normalize(g)
    context = g.terminals | g.variables if sentential else g.terminals
    sat = _saturate(ng, tstar_A_tstar_automaton(context, var), stats)
    return (0, ng.start, 1) in sat.nfa


def reachable_variables(g: Grammar, stats: list[Counters] | None = None,
                        sentential: bool = False) -> set[Symbol]:
    """All variables passing :func:`is_reachable`; one saturation per variable."""
    return {v for v in g.variables if is_reachable(g, v, stats, sentential)}


def _restrict_to(g: Grammar, allowed: set[Symbol]) -> Grammar:
    keep = [p for p in g.productions
            if p.lhs in allowed and all(s.is_terminal or s in allowed for s in p.body)]
    return g.restrict(keep)


def useful_variables(g: Grammar, stats: list[Counters] | None = None) -> set[Symbol]:
    productive = productive_variables(g, stats)
    if g.start not in productive:
        return set()
    restricted = _restrict_to(g, productive)
    return productive & reachable_variables(restricted, stats)


def useless_variables(g: Grammar, stats: list[Counters] | None = None) -> set[Symbol]:
    """Variables that occur in no derivation of a terminal word from the start symbol.

    Productive variables come first; reachability is then decided in the
    grammar restricted to productions over productive symbols.
    """
    return set(g.variables) - useful_variables(g, stats)


def is_empty(g: Grammar, stats: list[Counters] | None = None) -> bool:
    return g.start not in productive_variables(g, stats)


def contained_in(g: Grammar, lbar: Nfa, stats: list[Counters] | None = None) -> bool:
    """L(g) is inside L iff the start symbol is not a predecessor of the complement ``lbar``."""
    ng = normalize(g)
    sat = _saturate(ng, lbar, stats)
    return not sat.accepts([ng.start])


def contained_in_language(g: Grammar, lang: Nfa, stats: list[Counters] | None = None,
                          max_states: int = DEFAULT_MAX_DFA_STATES) -> bool:
    """Like :func:`contained_in` but complements ``lang`` over the grammar's terminals first."""
    alphabet = [s for s in lang.alphabet if s.is_terminal] + g.sorted_terminals()
    lbar = complement(lang, alphabet=alphabet, max_states=max_states)
    return contained_in(g, lbar, stats)


def is_finite(g: Grammar, stats: list[Counters] | None = None) -> bool:
    """Finite iff no useful variable A derives ``u A v`` with ``uv`` a nonempty terminal string."""
    useful = useful_variables(g, stats)
    if g.start not in useful:
        return True
    reduced = _restrict_to(g, useful)
    ng = normalize(reduced)
    for var in sorted(useful, key=lambda s: s.id):
        sat = _saturate(ng, pumping_pattern_automaton(g.terminals, var), stats)
        if sat.accepts([var]):
            return False
    return True


def nullable_variables(g: Grammar, stats: list[Counters] | None = None) -> set[Symbol]:
    """Variables deriving the empty string: one saturation against {eps}."""
    ng = normalize(g)
    sat = _saturate(ng, epsilon_automaton(), stats)
    return {v for v in g.variables if (0, v, 0) in sat.nfa}


@dataclass
class AnalysisReport:
    kind: str
    result: bool | frozenset[Symbol] | None
    counters: list[Counters] = field(default_factory=list)
    derivation: Parse | None = None

    @property
    def total(self) -> Counters:
        out = Counters()
        for c in self.counters:
            out += c
        return out


_SET_QUERIES = {
    "productive": productive_variables,
    "reachable": reachable_variables,
    "useless": useless_variables,
    "nullable": nullable_variables,
}
_BOOL_QUERIES = {
    "empty": is_empty,
    "finite": is_finite,
}


def analyze(kind: str, g: Grammar, word: Sequence[str] | None = None,
            automaton: Nfa | None = None, complement_first: bool = False,
            max_states: int = DEFAULT_MAX_DFA_STATES) -> AnalysisReport:
    """Run one named analysis and collect its counters."""
    stats: list[Counters] = []
    if kind in _SET_QUERIES:
        return AnalysisReport(kind, frozenset(_SET_QUERIES[kind](g, stats)), stats)
    if kind in _BOOL_QUERIES:
        return AnalysisReport(kind, _BOOL_QUERIES[kind](g, stats), stats)
    if kind == "member":
        return AnalysisReport(kind, membership(g, word or [], stats), stats)
    if kind == "parse":
        result = parse(g, word or [], stats)
        return AnalysisReport(kind, result is not None, stats, result)
    if kind == "contain":
        if automaton is None:
            raise ValueError("containment needs an automaton")
        if complement_first:
            ok = contained_in_language(g, automaton, stats, max_states)
        else:
            ok = contained_in(g, automaton, stats)
        return AnalysisReport(kind, ok, stats)
    raise ValueError(f"unknown analysis {kind!r}")


__all__ = [
    "AnalysisReport",
    "Parse",
    "analyze",
    "contained_in",
    "contained_in_language",
    "is_empty",
    "is_finite",
    "is_reachable",
    "membership",
    "nullable_variables",
    "parse",
    "productive_variables",
    "reachable_variables",
    "restore_derivation",
    "useful_variables",
    "useless_variables",
]
