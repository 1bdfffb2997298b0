"""Worklist saturation computing an automaton for pre*(L(A)).

Given a grammar in extended CNF and an automaton ``A``, :func:`saturate`
returns the least transition set containing ``A``'s transitions and closed
under the rule

    if ``X -> beta`` is a production and ``q --beta--> q'``, add ``(q, X, q')``.

Each transition is examined once. Partners for binary productions are found
through the adjacency lists of the growing result, so the work is bounded by
``p * s**3`` and the storage by ``p * s**2`` for ``p`` productions and ``s``
states.
"""

from __future__ import annotations

import enum
import json
import logging
import random
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .automaton import BitSet, Nfa, Transition, accepts
from .grammar import Production, ProductionIndex, Symbol

log = logging.getLogger(__name__)


class Reason(enum.Enum):
    ORIGINAL = "original"
    TERMINAL = "terminal"
    EPSILON = "epsilon"
    UNIT = "unit"
    BINARY = "binary"


@dataclass(frozen=True)
class Provenance:
    """Why a transition is in the result: constant size per transition."""

    reason: Reason
    timestamp: int
    production: Production | None = None
    middle: int | None = None
    children: tuple[Transition, ...] = ()


@dataclass
class Counters:
    pops: int = 0
    unit_fires: int = 0
    binary_fires: int = 0
    adds: int = 0  # transitions added on top of the input automaton
    pushes: int = 0

    def to_json(self) -> str:
        data = asdict(self)
        del data["pushes"]
        return json.dumps(data, sort_keys=False)

    def __iadd__(self, other: Counters) -> Counters:
        for k, v in asdict(other).items():
            setattr(self, k, getattr(self, k) + v)
        return self


@dataclass
class SaturatedAutomaton:
    nfa: Nfa
    original: Nfa
    provenance: dict[Transition, Provenance]
    counters: Counters
    index: ProductionIndex = field(repr=False)

    def added(self) -> list[Transition]:
        """Transitions not present in the input automaton, in insertion order."""
        return [t for t in self.nfa if t not in self.original]

    def __contains__(self, t: Transition) -> bool:
        return t in self.nfa

    def accepts(self, form: Sequence[Symbol]) -> bool:
        return prestar_accepts(self, form)


def saturate(index: ProductionIndex, a: Nfa, rng: random.Random | None = None) -> SaturatedAutomaton:
    """Saturate ``a`` with the productions in ``index``.

    The worklist is a stack. Passing ``rng`` pops a uniformly random pending
    transition instead; the resulting transition set does not depend on it.
    """
    grammar_symbols = set(index.symbols)
    foreign = sorted({sym for _, sym, _ in a if sym not in grammar_symbols})
    if foreign:
        log.warning("labels outside the grammar stay inert: %s", ", ".join(s.name for s in foreign))

    result = Nfa(a.state_count, [*a.alphabet, *index.symbols], a.initial, a.finals, (), a.state_names)
    seen = BitSet(result.capacity)
    key = result.key
    eta: list[Transition] = []
    pending: dict[Transition, tuple] = {}
    provenance: dict[Transition, Provenance] = {}
    counters = Counters()
    chain, front, back = index.chain, index.front, index.back
    succ, pred = result.adjacency.successors, result.adjacency.predecessors

    def push(t: Transition, why: tuple) -> None:
        if seen.add(key(*t)):
            eta.append(t)
            pending[t] = why
            counters.pushes += 1

    for t in a:
        push(t, (Reason.ORIGINAL,))
    for q, sym, q2 in a:
        for prod in index.term.get(sym, ()):
            push((q, prod.lhs, q2), (Reason.TERMINAL, prod))
    for prod in index.eps:
        for q in range(a.state_count):
            push((q, prod.lhs, q), (Reason.EPSILON, prod))

    stamp = 0
    while eta:
        if rng is not None:
            i = rng.randrange(len(eta))
            eta[i], eta[-1] = eta[-1], eta[i]
        t = eta.pop()
        counters.pops += 1
        if t in result:
            continue
        result.add(*t)
        why = pending.pop(t)
        provenance[t] = Provenance(why[0], stamp, *why[1:])
        stamp += 1
        if why[0] is not Reason.ORIGINAL:
            counters.adds += 1

        q, b, q1 = t
        for prod in chain.get(b, ()):
            counters.unit_fires += 1
            push((q, prod.lhs, q1), (Reason.UNIT, prod, None, (t,)))
        # t is the left child: look for (q1, C, q2)
        for prod in front.get(b, ()):
            c = prod.body[1]
            for q2 in succ(q1, c):
                counters.binary_fires += 1
                push((q, prod.lhs, q2), (Reason.BINARY, prod, q1, (t, (q1, c, q2))))
        # t is the right child: look for (q0, C, q)
        for prod in back.get(b, ()):
            c = prod.body[0]
            for q0 in pred(c, q):
                if c == b and q0 == q == q1:
                    # t paired with itself was already handled as a left child
                    continue
                counters.binary_fires += 1
                push((q0, prod.lhs, q1), (Reason.BINARY, prod, q, ((q0, c, q), t)))

    result.seal()
    bound = index.p * a.state_count ** 3
    if counters.binary_fires > bound:
        raise AssertionError(f"binary_fires {counters.binary_fires} exceeds p*s^3 = {bound}")
    return SaturatedAutomaton(result, a, provenance, counters, index)


def prestar_accepts(sat: SaturatedAutomaton, form: Sequence[Symbol]) -> bool:
    """Is ``form`` a predecessor of some string the input automaton accepts?"""
    return accepts(sat.nfa, form)


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Derivation:
    """A (partial) derivation tree.

    Inner nodes carry the production applied at that node and one child per
    body symbol. Leaves have ``production is None``; their labels, read left
    to right, form the derived string.
    """

    label: Symbol
    production: Production | None = None
    children: tuple[Derivation, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.production is None

    def frontier(self) -> list[Symbol]:
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.label)
            else:
                stack.extend(reversed(node.children))
        return out

    def nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def productions(self) -> list[Production]:
        return [n.production for n in self.nodes() if n.production is not None]

    def pretty(self, indent: str = "  ") -> str:
        lines = []
        stack = [(self, 0)]
        while stack:
            node, depth = stack.pop()
            if node.is_leaf:
                continue
            lines.append(indent * depth + str(node.production))
            stack.extend((c, depth + 1) for c in reversed(node.children))
        return "\n".join(lines)


class DerivationError(ValueError):
    pass


def extract_derivation(sat: SaturatedAutomaton, t: Transition) -> Derivation:
    """Rebuild the derivation that justified ``t`` from provenance records."""
    if t not in sat.provenance:
        raise DerivationError(f"transition {t} is not in the saturated automaton")
    if sat.provenance[t].reason is Reason.ORIGINAL and t[1].is_terminal:
        raise DerivationError(f"transition {t} is an input transition with a terminal label")

    built: dict[Transition, Derivation] = {}
    stack: list[tuple[Transition, bool]] = [(t, False)]
    while stack:
        cur, expanded = stack.pop()
        if cur in built:
            continue
        prov = sat.provenance[cur]
        label = cur[1]
        if prov.reason is Reason.ORIGINAL:
            built[cur] = Derivation(label)
        elif prov.reason is Reason.TERMINAL:
            built[cur] = Derivation(label, prov.production, (Derivation(prov.production.body[0]),))
        elif prov.reason is Reason.EPSILON:
            built[cur] = Derivation(label, prov.production, ())
        elif not expanded:
            for child in prov.children:
                if sat.provenance[child].timestamp >= prov.timestamp:
                    raise DerivationError(f"provenance of {cur} is not well-founded")
            stack.append((cur, True))
            stack.extend((child, False) for child in prov.children)
        else:
            kids = tuple(built[c] for c in prov.children)
            built[cur] = Derivation(label, prov.production, kids)
    return built[t]


def explain(sat: SaturatedAutomaton, form: Sequence[Symbol]) -> list[Derivation] | None:
    """One derivation tree per symbol of an accepted ``form``, or None if rejected.

    The concatenated frontiers label a path accepted by the input automaton,
    so the trees witness that ``form`` is a predecessor of an accepted string.
    """
    nfa = sat.nfa
    # states reachable after each prefix, then walk back from a final state
    layers = [{nfa.initial}]
    for sym in form:
        if not nfa.has_symbol(sym):
            return None
        layers.append(nfa.step(layers[-1], sym))
    ends = layers[-1] & nfa.finals
    if not ends:
        return None
    q = min(ends)
    path: list[Transition] = []
    for i in range(len(form) - 1, -1, -1):
        sym = form[i]
        prev = min(p for p in nfa.adjacency.predecessors(sym, q) if p in layers[i])
        path.append((prev, sym, q))
        q = prev
    path.reverse()
    out = []
    for t in path:
        if sat.provenance[t].reason is Reason.ORIGINAL:
            out.append(Derivation(t[1]))
        else:
            out.append(extract_derivation(sat, t))
    return out
