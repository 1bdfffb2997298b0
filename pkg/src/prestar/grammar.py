"""Context-free grammars: text format, extended Chomsky normal form, production index.

A grammar is stored as plain symbols and productions. The saturation engine
only understands four production shapes (``A -> B C``, ``A -> a``, ``A -> B``,
``A -> eps``); :func:`normalize` rewrites any grammar into that form and keeps
enough bookkeeping to map derivations back.
"""

from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

EPS = "eps"
ARROW = "->"
ALT = "|"


class Kind(enum.Enum):
    VARIABLE = "variable"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class Symbol:
    """A grammar symbol. Identity is (name, kind); ``id`` is a per-grammar handle."""

    name: str
    kind: Kind
    id: int = field(default=-1, compare=False)

    @property
    def is_variable(self) -> bool:
        return self.kind is Kind.VARIABLE

    @property
    def is_terminal(self) -> bool:
        return self.kind is Kind.TERMINAL

    def __repr__(self) -> str:
        return self.name

    def __lt__(self, other: Symbol) -> bool:
        return (self.name, self.kind.value) < (other.name, other.kind.value)


@dataclass(frozen=True)
class Production:
    lhs: Symbol
    body: tuple[Symbol, ...]

    def __str__(self) -> str:
        rhs = " ".join(s.name for s in self.body) if self.body else EPS
        return f"{self.lhs.name} -> {rhs}"

    def __repr__(self) -> str:
        return f"<{self}>"


class GrammarError(ValueError):
    """Malformed grammar, optionally pointing at a line of the source text."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class Grammar:
    """G = (V, T, P, S).

    Equality is structural (symbol sets, production sequence, start); the dense
    ``symbols`` table is not compared.
    """

    variables: frozenset[Symbol]
    terminals: frozenset[Symbol]
    productions: tuple[Production, ...]
    start: Symbol
    symbols: tuple[Symbol, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.variables & self.terminals:
            raise GrammarError("variables and terminals overlap")
        if self.start not in self.variables:
            raise GrammarError(f"start symbol {self.start.name!r} is not a variable")
        for p in self.productions:
            if p.lhs not in self.variables:
                raise GrammarError(f"production {p} has a non-variable head")
            for s in p.body:
                if s not in self.variables and s not in self.terminals:
                    raise GrammarError(f"production {p} uses unknown symbol {s.name!r}")
        if not self.symbols:
            ordered = _first_appearance(self)
            object.__setattr__(self, "symbols", tuple(_with_ids(ordered)))
        by_name = {s.name: s for s in self.symbols}
        object.__setattr__(self, "_by_name", by_name)

    @classmethod
    def build(
        cls,
        rules: Iterable[tuple[str, Sequence[str]]],
        start: str | None = None,
        variables: Iterable[str] = (),
        terminals: Iterable[str] = (),
    ) -> Grammar:
        """Build from ``(lhs, body)`` name pairs.

        Every lhs name is a variable, as is every name in ``variables``; all
        other names, including extra ``terminals``, are terminals.
        """
        rules = [(lhs, tuple(body)) for lhs, body in rules]
        var_names = dict.fromkeys(itertools.chain((lhs for lhs, _ in rules), variables))
        if start is None:
            if not var_names:
                raise GrammarError("grammar has no variables")
            start = next(iter(var_names))
        if start not in var_names:
            raise GrammarError(f"unknown start variable {start!r}")
        order: dict[str, None] = {}
        for lhs, body in rules:
            order[lhs] = None
            order.update(dict.fromkeys(body))
        order.update(dict.fromkeys(var_names))
        order.update(dict.fromkeys(terminals))
        symbols = {}
        for i, name in enumerate(order):
            kind = Kind.VARIABLE if name in var_names else Kind.TERMINAL
            symbols[name] = Symbol(name, kind, i)
        prods = tuple(
            Production(symbols[lhs], tuple(symbols[s] for s in body)) for lhs, body in rules
        )
        return cls(
            variables=frozenset(s for s in symbols.values() if s.is_variable),
            terminals=frozenset(s for s in symbols.values() if s.is_terminal),
            productions=prods,
            start=symbols[start],
            symbols=tuple(symbols.values()),
        )

    def symbol(self, name: str) -> Symbol:
        try:
            return self._by_name[name]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name  # type: ignore[attr-defined]

    def with_start(self, name: str) -> Grammar:
        sym = self.symbol(name)
        if not sym.is_variable:
            raise GrammarError(f"start symbol {name!r} is not a variable")
        return Grammar(self.variables, self.terminals, self.productions, sym, self.symbols)

    def restrict(self, keep: Iterable[Production]) -> Grammar:
        """Same symbols and start, only the given productions."""
        keep = set(keep)
        prods = tuple(p for p in self.productions if p in keep)
        return Grammar(self.variables, self.terminals, prods, self.start, self.symbols)

    def productions_of(self, lhs: Symbol) -> list[Production]:
        return [p for p in self.productions if p.lhs == lhs]

    def sorted_variables(self) -> list[Symbol]:
        return [s for s in self.symbols if s.is_variable]

    def sorted_terminals(self) -> list[Symbol]:
        return [s for s in self.symbols if s.is_terminal]

    @property
    def size(self) -> int:
        """Total body length plus production count."""
        return sum(len(p.body) for p in self.productions) + len(self.productions)

    def render(self) -> str:
        return render_grammar(self)


def _first_appearance(g: Grammar) -> list[Symbol]:
    seen: dict[Symbol, None] = {g.start: None}
    for p in g.productions:
        seen[p.lhs] = None
        seen.update(dict.fromkeys(p.body))
    for s in sorted(g.variables | g.terminals):
        seen[s] = None
    return list(seen)


def _with_ids(symbols: Iterable[Symbol]) -> Iterable[Symbol]:
    for i, s in enumerate(symbols):
        yield Symbol(s.name, s.kind, i)


# ---------------------------------------------------------------------------
# Text format


def _tokens(line: str) -> list[str]:
    out = []
    for tok in line.split():
        if tok.startswith("#"):
            break
        out.append(tok)
    return out


def parse_grammar(text: str, source: str | None = None) -> Grammar:
    """Parse the line-oriented grammar format.

    ``S -> A B | a`` defines alternatives, ``eps`` is the empty body, a line
    starting with ``|`` continues the previous rule, a token starting with
    ``#`` opens a comment, and ``start: S`` names the start symbol (default:
    head of the first rule).
    """
    rules: list[tuple[str, tuple[str, ...]]] = []
    start: str | None = None
    start_line = 0
    current: str | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if not toks:
            continue
        if toks[0] == "start:":
            if len(toks) != 2:
                raise GrammarError("expected 'start: <variable>'", lineno, source)
            if start is not None:
                raise GrammarError("duplicate start directive", lineno, source)
            start, start_line = toks[1], lineno
            continue
        if toks[0] == ALT:
            if current is None:
                raise GrammarError("continuation '|' without a preceding rule", lineno, source)
            rhs = toks[1:]
            rhs.insert(0, ALT)
            alts = _split_alternatives(rhs, lineno, source, leading=True)
        else:
            if len(toks) < 2 or toks[1] != ARROW:
                raise GrammarError(f"expected '<variable> {ARROW} ...'", lineno, source)
            current = toks[0]
            if current in (ARROW, ALT, EPS):
                raise GrammarError(f"reserved token {current!r} used as a variable", lineno, source)
            alts = _split_alternatives(toks[2:], lineno, source)
        for body in alts:
            rules.append((current, body))

    if not rules:
        raise GrammarError("grammar has no rules", None, source)
    heads = {lhs for lhs, _ in rules}
    if start is not None and start not in heads:
        raise GrammarError(f"start symbol {start!r} is not defined by any rule", start_line, source)
    return Grammar.build(rules, start=start)


def _split_alternatives(toks, lineno, source, leading=False) -> list[tuple[str, ...]]:
    alts: list[list[str]] = [[]]
    for tok in toks:
        if tok == ALT:
            alts.append([])
        elif tok == ARROW:
            raise GrammarError(f"unexpected {ARROW!r}", lineno, source)
        else:
            alts[-1].append(tok)
    if leading:
        alts = alts[1:]
    out = []
    for alt in alts:
        if not alt:
            raise GrammarError("empty alternative (write 'eps' for the empty body)", lineno, source)
        if EPS in alt:
            if alt != [EPS]:
                raise GrammarError(f"{EPS!r} must stand alone in an alternative", lineno, source)
            alt = []
        out.append(tuple(alt))
    return out


def render_grammar(g: Grammar) -> str:
    """Inverse of :func:`parse_grammar`; rules grouped by head in first-appearance order."""
    groups: dict[Symbol, list[Production]] = {}
    for p in g.productions:
        groups.setdefault(p.lhs, []).append(p)
    lines = []
    if not groups or next(iter(groups)) != g.start:
        lines.append(f"start: {g.start.name}")
    for lhs, prods in groups.items():
        alts = " | ".join(" ".join(s.name for s in p.body) if p.body else EPS for p in prods)
        lines.append(f"{lhs.name} {ARROW} {alts}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Extended Chomsky normal form


def is_extended_cnf(p: Production) -> bool:
    body = p.body
    if len(body) == 0:
        return True
    if len(body) == 1:
        return True
    return len(body) == 2 and body[0].is_variable and body[1].is_variable


@dataclass(frozen=True)
class NormalizedGrammar:
    """A grammar in extended CNF plus the map back to the source grammar.

    ``origin`` sends every normalized production to the source production it
    helps simulate; terminal wrapper productions (shared between source
    productions) map to ``None``. ``wrappers`` maps each wrapper variable to
    its terminal and ``helpers`` holds the binarization variables.
    """

    grammar: Grammar
    source: Grammar
    origin: Mapping[Production, Production | None]
    wrappers: Mapping[Symbol, Symbol]
    helpers: frozenset[Symbol]

    @property
    def productions(self) -> tuple[Production, ...]:
        return self.grammar.productions

    @property
    def start(self) -> Symbol:
        return self.grammar.start

    @property
    def fresh(self) -> frozenset[Symbol]:
        return self.helpers | frozenset(self.wrappers)


def normalize(g: Grammar) -> NormalizedGrammar:
    """Rewrite ``g`` into extended CNF without changing its language.

    Bodies of length two or more get their terminals replaced by wrapper
    variables ``_a`` (with ``_a -> a``); bodies longer than two are split
    right-to-left into binary productions using helpers ``<lhs>#<k>``, with
    ``k`` counting up across the whole call. Shorter bodies are kept as is.
    """
    taken = {s.name for s in g.symbols}
    symbols = list(g.symbols)

    def fresh_variable(base: str) -> Symbol:
        name = base
        while name in taken:
            name += "'"
        taken.add(name)
        sym = Symbol(name, Kind.VARIABLE, len(symbols))
        symbols.append(sym)
        return sym

    wrappers: dict[Symbol, Symbol] = {}  # terminal -> wrapper variable
    helpers: list[Symbol] = []
    origin: dict[Production, Production | None] = {}
    out: list[Production] = []
    wrapper_prods: list[Production] = []
    counter = itertools.count(1)

    def emit(p: Production, src: Production | None) -> None:
        if p not in origin:
            origin[p] = src
            out.append(p)

    for p in g.productions:
        body = p.body
        if len(body) <= 1:
            emit(p, p)
            continue
        wrapped = []
        for s in body:
            if s.is_terminal:
                if s not in wrappers:
                    w = fresh_variable(f"_{s.name}")
                    wrappers[s] = w
                    wrapper_prods.append(Production(w, (s,)))
                s = wrappers[s]
            wrapped.append(s)
        head = p.lhs
        while len(wrapped) > 2:
            helper = fresh_variable(f"{p.lhs.name}#{next(counter)}")
            helpers.append(helper)
            emit(Production(head, (wrapped[0], helper)), p)
            head = helper
            wrapped = wrapped[1:]
        emit(Production(head, tuple(wrapped)), p)

    for wp in wrapper_prods:
        if wp not in origin:
            origin[wp] = None
            out.append(wp)

    new_vars = frozenset(wrappers.values()) | frozenset(helpers)
    normalized = Grammar(
        variables=g.variables | new_vars,
        terminals=g.terminals,
        productions=tuple(out),
        start=g.start,
        symbols=tuple(symbols),
    )
    return NormalizedGrammar(
        grammar=normalized,
        source=g,
        origin=origin,
        wrappers={w: t for t, w in wrappers.items()},
        helpers=frozenset(helpers),
    )


# ---------------------------------------------------------------------------
# Production index


@dataclass
class ProductionIndex:
    """Extended-CNF productions bucketed by the body symbol that triggers them.

    ``chain[B]`` holds ``A -> B``, ``front[B]`` holds ``A -> B C``,
    ``back[C]`` holds ``A -> B C``, ``term[a]`` holds ``A -> a`` and ``eps``
    holds ``A -> eps``.
    """

    chain: dict[Symbol, list[Production]]
    front: dict[Symbol, list[Production]]
    back: dict[Symbol, list[Production]]
    term: dict[Symbol, list[Production]]
    eps: list[Production]
    production_count: int
    symbols: tuple[Symbol, ...] = ()

    @property
    def p(self) -> int:
        return self.production_count

    @property
    def binary_count(self) -> int:
        return sum(len(v) for v in self.front.values())


def build_index(g: NormalizedGrammar | Grammar) -> ProductionIndex:
    grammar = g.grammar if isinstance(g, NormalizedGrammar) else g
    chain: dict[Symbol, list[Production]] = defaultdict(list)
    front: dict[Symbol, list[Production]] = defaultdict(list)
    back: dict[Symbol, list[Production]] = defaultdict(list)
    term: dict[Symbol, list[Production]] = defaultdict(list)
    eps: list[Production] = []
    for p in grammar.productions:
        body = p.body
        if not body:
            eps.append(p)
        elif len(body) == 1:
            if body[0].is_terminal:
                term[body[0]].append(p)
            else:
                chain[body[0]].append(p)
        elif len(body) == 2 and body[0].is_variable and body[1].is_variable:
            front[body[0]].append(p)
            back[body[1]].append(p)
        else:
            raise GrammarError(f"production {p} is not in extended CNF; normalize first")
    return ProductionIndex(
        chain=dict(chain),
        front=dict(front),
        back=dict(back),
        term=dict(term),
        eps=eps,
        production_count=len(grammar.productions),
        symbols=grammar.symbols,
    )


def occurring_symbols(g: NormalizedGrammar | Grammar) -> set[Symbol]:
    grammar = g.grammar if isinstance(g, NormalizedGrammar) else g
    out: set[Symbol] = set()
    for p in grammar.productions:
        out.add(p.lhs)
        out.update(p.body)
    return out
