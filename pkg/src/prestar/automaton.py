"""Finite automata over the mixed alphabet of variables and terminals.

Transitions carry exactly one symbol; there are no epsilon moves. Membership
of a transition is a bit lookup in a dense ``states x alphabet x states``
array, which is what keeps saturation within quadratic space.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Iterator, Sequence

from .grammar import EPS, Grammar, Kind, Symbol

log = logging.getLogger(__name__)

Transition = tuple[int, Symbol, int]

DEFAULT_MAX_DFA_STATES = 2**16


class AutomatonError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ResourceLimitError(RuntimeError):
    """A construction would exceed its configured size cap."""


class BitSet:
    __slots__ = ("_bits",)

    def __init__(self, size: int):
        self._bits = bytearray((size + 7) >> 3)

    def __contains__(self, i: int) -> bool:
        return bool(self._bits[i >> 3] & (1 << (i & 7)))

    def add(self, i: int) -> bool:
        """Set bit ``i``; return True if it was clear."""
        byte, mask = i >> 3, 1 << (i & 7)
        if self._bits[byte] & mask:
            return False
        self._bits[byte] |= mask
        return True


class TransitionAdjacency:
    """Per-(state, symbol) projections of a transition set.

    ``back[(q, C)]`` lists every ``q2`` with ``(q, C, q2)``;
    ``front[(C, q)]`` lists every ``q2`` with ``(q2, C, q)``.
    """

    def __init__(self):
        self.back: dict[tuple[int, Symbol], list[int]] = defaultdict(list)
        self.front: dict[tuple[Symbol, int], list[int]] = defaultdict(list)

    def record(self, q: int, sym: Symbol, q2: int) -> None:
        self.back[(q, sym)].append(q2)
        self.front[(sym, q2)].append(q)

    def successors(self, q: int, sym: Symbol) -> list[int]:
        return self.back.get((q, sym), [])

    def predecessors(self, sym: Symbol, q: int) -> list[int]:
        return self.front.get((sym, q), [])


class Nfa:
    """A = (Q, Sigma, delta, q0, F) with states ``0 .. state_count-1``."""

    def __init__(
        self,
        state_count: int,
        alphabet: Iterable[Symbol],
        initial: int = 0,
        finals: Iterable[int] = (),
        transitions: Iterable[Transition] = (),
        state_names: Sequence[str] | None = None,
    ):
        if state_count < 1:
            raise AutomatonError("an automaton needs at least one state")
        self.state_count = state_count
        self.alphabet: tuple[Symbol, ...] = tuple(dict.fromkeys(alphabet))
        self._index = {sym: i for i, sym in enumerate(self.alphabet)}
        self.initial = initial
        self.finals = frozenset(finals)
        if not 0 <= initial < state_count:
            raise AutomatonError(f"initial state {initial} out of range")
        for f in self.finals:
            if not 0 <= f < state_count:
                raise AutomatonError(f"final state {f} out of range")
        if state_names is not None and len(state_names) != state_count:
            raise AutomatonError("state_names must name every state")
        self.state_names = tuple(state_names) if state_names is not None else None
        self._bits = BitSet(self.capacity)
        self._transitions: list[Transition] = []
        self.adjacency = TransitionAdjacency()
        self._sealed = False
        for t in transitions:
            self.add(*t)

    @property
    def capacity(self) -> int:
        return self.state_count * len(self.alphabet) * self.state_count

    def key(self, q: int, sym: Symbol, q2: int) -> int:
        """Dense index of a transition; raises KeyError for foreign symbols."""
        return (q * len(self.alphabet) + self._index[sym]) * self.state_count + q2

    def add(self, q: int, sym: Symbol, q2: int) -> bool:
        """Insert a transition; return False if it was already present."""
        if self._sealed:
            raise AutomatonError("automaton is sealed")
        if not (0 <= q < self.state_count and 0 <= q2 < self.state_count):
            raise AutomatonError(f"transition ({q}, {sym}, {q2}) has a state out of range")
        if sym not in self._index:
            raise AutomatonError(f"symbol {sym.name!r} is not in the alphabet")
        if not self._bits.add(self.key(q, sym, q2)):
            return False
        self._transitions.append((q, sym, q2))
        self.adjacency.record(q, sym, q2)
        return True

    def seal(self) -> Nfa:
        self._sealed = True
        return self

    def __contains__(self, t: Transition) -> bool:
        q, sym, q2 = t
        if sym not in self._index or not (0 <= q < self.state_count and 0 <= q2 < self.state_count):
            return False
        return self.key(q, sym, q2) in self._bits

    def __iter__(self) -> Iterator[Transition]:
        return iter(self._transitions)

    def __len__(self) -> int:
        return len(self._transitions)

    @property
    def transitions(self) -> list[Transition]:
        return list(self._transitions)

    def transition_set(self) -> set[Transition]:
        return set(self._transitions)

    def has_symbol(self, sym: Symbol) -> bool:
        return sym in self._index

    def state_name(self, q: int) -> str:
        return self.state_names[q] if self.state_names else f"q{q}"

    def copy(self, alphabet: Iterable[Symbol] | None = None) -> Nfa:
        """Unsealed copy, optionally over a larger alphabet."""
        alpha = list(self.alphabet)
        if alphabet is not None:
            alpha.extend(alphabet)
        return Nfa(self.state_count, alpha, self.initial, self.finals, self._transitions, self.state_names)

    def step(self, states: Iterable[int], sym: Symbol) -> set[int]:
        out: set[int] = set()
        for q in states:
            out.update(self.adjacency.successors(q, sym))
        return out

    def accepts(self, word: Sequence[Symbol]) -> bool:
        return accepts(self, word)

    def __repr__(self) -> str:
        return (
            f"Nfa(states={self.state_count}, initial={self.initial}, "
            f"finals={sorted(self.finals)}, transitions={len(self)})"
        )


def accepts(a: Nfa, word: Sequence[Symbol]) -> bool:
    """Subset simulation of ``a`` on ``word``."""
    current = {a.initial}
    for sym in word:
        if not a.has_symbol(sym):
            raise AutomatonError(f"symbol {sym.name!r} is not in the alphabet")
        current = a.step(current, sym)
        if not current:
            return False
    return not current.isdisjoint(a.finals)


# ---------------------------------------------------------------------------
# Builders for the regular languages the analyses need


def word_automaton(word: Sequence[Symbol], alphabet: Iterable[Symbol] = ()) -> Nfa:
    """The (n+1)-state chain accepting exactly ``word``."""
    n = len(word)
    alpha = list(alphabet) + list(word)
    return Nfa(
        n + 1,
        alpha,
        initial=0,
        finals={n},
        transitions=[(i, sym, i + 1) for i, sym in enumerate(word)],
    ).seal()


def sigma_star_automaton(symbols: Iterable[Symbol]) -> Nfa:
    symbols = sorted(symbols)
    return Nfa(1, symbols, 0, {0}, [(0, s, 0) for s in symbols]).seal()


def epsilon_automaton(alphabet: Iterable[Symbol] = ()) -> Nfa:
    """One state, no transitions: accepts only the empty string."""
    return Nfa(1, alphabet, 0, {0}).seal()


def tstar_A_tstar_automaton(terminals: Iterable[Symbol], var: Symbol) -> Nfa:
    """Accepts T* A T* (exactly one occurrence of ``var``)."""
    terminals = sorted(terminals)
    trans = [(0, t, 0) for t in terminals] + [(0, var, 1)] + [(1, t, 1) for t in terminals]
    return Nfa(2, [*terminals, var], 0, {1}, trans).seal()


def pumping_pattern_automaton(terminals: Iterable[Symbol], var: Symbol) -> Nfa:
    """Accepts T+ A T* | T* A T+, i.e. ``x A y`` with ``xy`` a nonempty terminal string.

    States: 0 nothing read, 1 terminals before A, 2 bare A, 3 A with at
    least one terminal around it.
    """
    terminals = sorted(terminals)
    trans: list[Transition] = []
    for t in terminals:
        trans += [(0, t, 1), (1, t, 1), (2, t, 3), (3, t, 3)]
    trans += [(0, var, 2), (1, var, 3)]
    return Nfa(4, [*terminals, var], 0, {3}, trans).seal()


def complement(a: Nfa, alphabet: Iterable[Symbol] | None = None,
               max_states: int = DEFAULT_MAX_DFA_STATES) -> Nfa:
    """Automaton for ``alphabet* - L(a)`` via subset construction.

    ``alphabet`` defaults to the automaton's own and is merged with it
    otherwise. The determinized automaton can have up to ``2**s`` states;
    exceeding ``max_states`` raises :class:`ResourceLimitError`.
    """
    alpha = list(a.alphabet)
    if alphabet is not None:
        alpha.extend(alphabet)
    alpha = list(dict.fromkeys(alpha))

    start = frozenset([a.initial])
    ids: dict[frozenset[int], int] = {start: 0}
    order = [start]
    trans: list[Transition] = []
    i = 0
    while i < len(order):
        subset = order[i]
        for sym in alpha:
            nxt = frozenset(a.step(subset, sym)) if a.has_symbol(sym) else frozenset()
            if nxt not in ids:
                if len(ids) >= max_states:
                    raise ResourceLimitError(
                        f"complement needs more than {max_states} deterministic states"
                    )
                ids[nxt] = len(order)
                order.append(nxt)
            trans.append((i, sym, ids[nxt]))
        i += 1
    # the empty subset doubles as the sink state, so the result is complete
    finals = {ids[s] for s in order if s.isdisjoint(a.finals)}
    return Nfa(len(order), alpha, 0, finals, trans).seal()


# ---------------------------------------------------------------------------
# Text format and DOT export


def parse_automaton(text: str, grammar: Grammar | None = None, source: str | None = None) -> Nfa:
    """Parse ``states:``/``initial:``/``final:`` headers followed by ``p a q`` lines.

    Labels are resolved against ``grammar`` when given; unknown labels become
    terminals foreign to the grammar (they never take part in saturation).
    """
    states: list[str] | None = None
    initial: str | None = None
    finals: list[str] = []
    edges: list[tuple[int, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = []
        for tok in raw.split():
            if tok.startswith("#"):
                break
            toks.append(tok)
        if not toks:
            continue
        head = toks[0]
        if head == "states:":
            if states is not None:
                raise AutomatonError("duplicate 'states:' line", lineno, source)
            states = toks[1:]
            if not states:
                raise AutomatonError("'states:' lists no states", lineno, source)
            if len(set(states)) != len(states):
                raise AutomatonError("duplicate state name", lineno, source)
        elif head == "initial:":
            if len(toks) != 2:
                raise AutomatonError("expected 'initial: <state>'", lineno, source)
            initial = toks[1]
        elif head in ("final:", "finals:"):
            finals.extend(toks[1:])
        else:
            if len(toks) != 3:
                raise AutomatonError("expected '<state> <symbol> <state>'", lineno, source)
            if toks[1] == EPS:
                raise AutomatonError("epsilon transitions are not supported", lineno, source)
            edges.append((lineno, *toks))
    if states is None:
        raise AutomatonError("missing 'states:' line", None, source)
    pos = {name: i for i, name in enumerate(states)}

    def state(name: str, lineno: int | None) -> int:
        if name not in pos:
            raise AutomatonError(f"unknown state {name!r}", lineno, source)
        return pos[name]

    if initial is None:
        initial = states[0]
    symbols: dict[str, Symbol] = {}
    foreign: list[str] = []
    for lineno, _, label, _ in edges:
        if label in symbols:
            continue
        if grammar is not None and label in grammar:
            symbols[label] = grammar.symbol(label)
        else:
            symbols[label] = Symbol(label, Kind.TERMINAL)
            if grammar is not None:
                foreign.append(label)
    if foreign:
        log.warning("automaton labels not in the grammar: %s", ", ".join(foreign))
    alphabet = list(symbols.values())
    if grammar is not None:
        alphabet += list(grammar.terminals)
    return Nfa(
        len(states),
        alphabet,
        state(initial, None),
        {state(f, None) for f in finals},
        [(state(p, ln), symbols[a], state(q, ln)) for ln, p, a, q in edges],
        state_names=states,
    ).seal()


def render_automaton(a: Nfa) -> str:
    names = [a.state_name(q) for q in range(a.state_count)]
    lines = [
        "states: " + " ".join(names),
        f"initial: {names[a.initial]}",
        "final: " + " ".join(names[f] for f in sorted(a.finals)),
    ]
    lines += [f"{names[p]} {sym.name} {names[q]}" for p, sym, q in a]
    return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(a: Nfa, highlight: Iterable[Transition] = (), name: str = "automaton") -> str:
    """GraphViz source, one edge per transition; ``highlight`` edges are dashed."""
    marked = set(highlight)
    out = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;"]
    for q in range(a.state_count):
        attrs = "shape=doublecircle" if q in a.finals else "shape=circle"
        if q == a.initial:
            attrs += ", style=bold"
        out.append(f"  {_dot_id(a.state_name(q))} [{attrs}];")
    for p, sym, q in sorted(a, key=lambda t: (t[0], t[2], t[1].kind.value, t[1].name)):
        attrs = f"label={_dot_id(sym.name)}"
        if (p, sym, q) in marked:
            attrs += ", style=dashed, color=blue"
        out.append(f"  {_dot_id(a.state_name(p))} -> {_dot_id(a.state_name(q))} [{attrs}];")
    out.append("}")
    return "\n".join(out) + "\n"
