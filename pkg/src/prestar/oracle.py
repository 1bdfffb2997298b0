"""Slow, independent reference implementations used to check the engine.

Nothing here uses the worklist engine or :func:`prestar.grammar.normalize`.
Grammars are handled as plain ``(lhs, body)`` name tuples wherever possible so
that a bug in the main data model cannot leak into both sides of a check.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .automaton import Nfa
from .grammar import Grammar, NormalizedGrammar, Symbol

Rule = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class OracleConfig:
    max_word_length: int = 12
    max_bfs_depth: int = 12
    random_seed: int = 20240611

    def __post_init__(self):
        if self.max_word_length <= 0 or self.max_bfs_depth <= 0 or self.random_seed < 0:
            raise ValueError("oracle limits must be positive")

    def rng(self) -> random.Random:
        return random.Random(self.random_seed)


def rules_of(g: Grammar | NormalizedGrammar) -> list[Rule]:
    grammar = g.grammar if isinstance(g, NormalizedGrammar) else g
    return [(p.lhs.name, tuple(s.name for s in p.body)) for p in grammar.productions]


# ---------------------------------------------------------------------------
# Naive saturation: rescan everything until nothing changes


def _ends(edges: set[tuple[int, str, int]], start: int, body: Sequence[str]) -> set[int]:
    states = {start}
    for sym in body:
        states = {q2 for (q1, a, q2) in edges for q in states if q1 == q and a == sym}
        if not states:
            break
    return states


def naive_saturate(g: Grammar | NormalizedGrammar, a: Nfa) -> set[tuple[int, str, int]]:
    """Least superset of ``a``'s transitions closed under the saturation rule.

    Works for bodies of any length. Transitions are returned with symbol names.
    """
    rules = rules_of(g)
    edges = {(q, sym.name, q2) for q, sym, q2 in a}
    changed = True
    while changed:
        changed = False
        for lhs, body in rules:
            for q in range(a.state_count):
                for q2 in _ends(edges, q, body):
                    if (q, lhs, q2) not in edges:
                        edges.add((q, lhs, q2))
                        changed = True
    return edges


def named(transitions: Iterable[tuple[int, Symbol, int]]) -> set[tuple[int, str, int]]:
    return {(q, s.name, q2) for q, s, q2 in transitions}


# ---------------------------------------------------------------------------
# Derivation search


def _rewrites(form: tuple[str, ...], rules: Sequence[Rule]) -> Iterable[tuple[str, ...]]:
    for i, sym in enumerate(form):
        for lhs, body in rules:
            if lhs == sym:
                yield form[:i] + body + form[i + 1:]


def _name_accepts(a: Nfa, form: Sequence[str]) -> bool:
    by_name = {s.name: s for s in a.alphabet}
    states = {a.initial}
    for name in form:
        if name not in by_name:
            return False
        sym = by_name[name]
        states = {q2 for q in states for q2 in a.adjacency.successors(q, sym)}
        if not states:
            return False
    return not states.isdisjoint(a.finals)


def bounded_bfs_reaches(g: Grammar, form: Sequence[str], target: Nfa | Callable[[tuple], bool],
                        depth: int, max_length: int | None = None) -> bool:
    """Breadth-first search over single rewrite steps from ``form``.

    Explores at most ``depth`` steps and drops forms longer than
    ``max_length``; true if some visited form is accepted by ``target``.
    """
    rules = rules_of(g)
    accept = target if callable(target) else (lambda f: _name_accepts(target, f))
    start = tuple(form)
    seen = {start}
    frontier = [start]
    if accept(start):
        return True
    for _ in range(depth):
        nxt = []
        for f in frontier:
            for f2 in _rewrites(f, rules):
                if max_length is not None and len(f2) > max_length:
                    continue
                if f2 in seen:
                    continue
                if accept(f2):
                    return True
                seen.add(f2)
                nxt.append(f2)
        if not nxt:
            break
        frontier = nxt
    return False


def derivable_forms(rules: Sequence[Rule], symbols: Iterable[str], max_length: int,
                    keep: Callable[[tuple[str, ...]], bool] | None = None) -> dict[str, set[tuple[str, ...]]]:
    """For each symbol X, every string of length <= max_length that X derives.

    Every subtree of a derivation tree yields a substring of the final
    string, so building yields bottom-up with the length cut is exhaustive.
    ``keep`` may prune strings; it must hold for every substring of a string
    it holds for.
    """
    forms: dict[str, set[tuple[str, ...]]] = {s: {(s,)} for s in symbols}
    for lhs, body in rules:
        forms.setdefault(lhs, {(lhs,)})
        for s in body:
            forms.setdefault(s, {(s,)})
    # semi-naive: every round joins at least one string found in the round before
    old: dict[str, set] = {s: set() for s in forms}
    delta: dict[str, set] = {s: set(f) for s, f in forms.items()}
    first = True
    while first or any(delta.values()):
        found: dict[str, set] = {s: set() for s in forms}
        for lhs, body in rules:
            if not body:
                if first:
                    found[lhs].add(())
                continue
            for i in range(len(body)):
                if not delta[body[i]]:
                    continue
                parts = [old[s] for s in body[:i]] + [delta[body[i]]] + [forms[s] for s in body[i + 1:]]
                found[lhs] |= _join(parts, max_length, keep)
        first = False
        for s in forms:
            old[s] = set(forms[s])
            delta[s] = found[s] - forms[s]
            forms[s] |= delta[s]
    return forms


def _join(parts, max_length, keep):
    acc: set[tuple[str, ...]] = {()}
    for part in parts:
        by_len: dict[int, list] = {}
        for y in part:
            by_len.setdefault(len(y), []).append(y)
        nxt = set()
        for x in acc:
            room = max_length - len(x)
            for n, ys in by_len.items():
                if n <= room:
                    for y in ys:
                        z = x + y
                        if keep is None or keep(z):
                            nxt.add(z)
        acc = nxt
        if not acc:
            break
    return acc


class BoundedPrestar:
    """Decides ``form in pre*(L(a))`` restricted to witnesses of bounded length.

    Each symbol's derivable strings are enumerated once, run through the
    automaton by brute force, and a form is then checked by chaining the
    per-symbol state relations. Strings labelling no path at all are dropped
    during enumeration.
    """

    def __init__(self, g: Grammar, a: Nfa, max_length: int = 6):
        names = [s.name for s in g.symbols] + [s.name for s in a.alphabet]
        cache: dict[tuple[str, ...], bool] = {}

        def labels_a_path(w: tuple[str, ...]) -> bool:
            if w not in cache:
                cache[w] = any(_run_names(a, p, w) for p in range(a.state_count))
            return cache[w]

        forms = derivable_forms(rules_of(g), names, max_length, keep=labels_a_path)
        self.a = a
        self.relation: dict[str, set[tuple[int, int]]] = {}
        for sym, strings in forms.items():
            rel = set()
            for p in range(a.state_count):
                for w in strings:
                    for q in _run_names(a, p, w):
                        rel.add((p, q))
            self.relation[sym] = rel

    def accepts(self, form: Sequence[str]) -> bool:
        states = {self.a.initial}
        for sym in form:
            rel = self.relation.get(sym, set())
            states = {q for (p, q) in rel if p in states}
            if not states:
                return False
        return not states.isdisjoint(self.a.finals)


class BehaviourSearch:
    """Decides ``form in pre*(L(a))`` exactly by enumerating derivable strings up to behaviour.

    The behaviour of a string is the set of state pairs ``(p, q)`` it
    connects in ``a``. Strings with equal behaviour are interchangeable inside
    any context, so it suffices to enumerate, bottom-up, the set of
    behaviours each symbol can derive. There are at most ``2**(s*s)`` of
    them, so the search is exhaustive without a length bound. Behaviours are
    tuples of successor bitmasks, one per source state.
    """

    def __init__(self, g: Grammar, a: Nfa):
        s = a.state_count
        self.a = a
        rules = rules_of(g)
        ident = tuple(1 << p for p in range(s))

        def letter(name: str) -> tuple[int, ...]:
            sym = next((x for x in a.alphabet if x.name == name), None)
            rows = [0] * s
            if sym is not None:
                for p in range(s):
                    for q in a.adjacency.successors(p, sym):
                        rows[p] |= 1 << q
            return tuple(rows)

        def compose(r1, r2):
            out = []
            for row in r1:
                acc = 0
                q = 0
                while row:
                    if row & 1:
                        acc |= r2[q]
                    row >>= 1
                    q += 1
                out.append(acc)
            return tuple(out)

        names = {s_.name for s_ in g.symbols} | {x.name for x in a.alphabet}
        for lhs, body in rules:
            names.add(lhs)
            names.update(body)
        beh: dict[str, set] = {n: {letter(n)} for n in names}
        changed = True
        while changed:
            changed = False
            for lhs, body in rules:
                acc = {ident}
                for sym in body:
                    acc = {compose(r1, r2) for r1 in acc for r2 in beh[sym]}
                new = acc - beh[lhs]
                if new:
                    beh[lhs] |= new
                    changed = True
        self.behaviours = beh

    def accepts(self, form: Sequence[str]) -> bool:
        states = 1 << self.a.initial
        for sym in form:
            nxt = 0
            for rows in self.behaviours.get(sym, ()):
                for p, row in enumerate(rows):
                    if states >> p & 1:
                        nxt |= row
            states = nxt
            if not states:
                return False
        return any(states >> f & 1 for f in self.a.finals)


def _run_names(a: Nfa, p: int, w: Sequence[str]) -> set[int]:
    by_name = {s.name: s for s in a.alphabet}
    states = {p}
    for name in w:
        sym = by_name.get(name)
        if sym is None:
            return set()
        states = {q2 for q in states for q2 in a.adjacency.successors(q, sym)}
        if not states:
            break
    return states


def check_certificate(rules: Sequence[Rule], form: Sequence[str], trees: Sequence, a: Nfa) -> bool:
    """Replay-check a claimed derivation ``form =>* frontier`` with ``frontier`` in L(a).

    ``trees`` holds one derivation tree per symbol of ``form``; each node must
    expose ``label``, ``production`` and ``children``. Only names are compared.
    """
    rule_set = set(rules)
    if len(trees) != len(form):
        return False
    frontier: list[str] = []
    for root, sym in zip(trees, form):
        if root.label.name != sym:
            return False
        stack = [root]
        leaves = []
        while stack:
            node = stack.pop()
            if node.production is None:
                if node.children:
                    return False
                leaves.append(node.label.name)
                continue
            lhs = node.production.lhs.name
            body = tuple(c.label.name for c in node.children)
            if lhs != node.label.name or (lhs, body) not in rule_set:
                return False
            if body != tuple(s.name for s in node.production.body):
                return False
            stack.extend(reversed(node.children))
        frontier.extend(leaves)
    return _name_accepts(a, frontier)


# ---------------------------------------------------------------------------
# Textbook marking algorithms


def nullable_marking(rules: Sequence[Rule]) -> set[str]:
    marked: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, body in rules:
            if lhs not in marked and all(s in marked for s in body):
                marked.add(lhs)
                changed = True
    return marked


def productive_marking(rules: Sequence[Rule], variables: Iterable[str]) -> set[str]:
    variables = set(variables)
    marked: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, body in rules:
            if lhs not in marked and all(s in marked or s not in variables for s in body):
                marked.add(lhs)
                changed = True
    return marked


def graph_reachable(rules: Sequence[Rule], start: str, usable: Callable[[str], bool] | None = None) -> set[str]:
    """Symbols reachable from ``start`` in the production graph.

    With ``usable``, a production is followed only if all its body symbols
    other than the one being reached satisfy the predicate.
    """
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for lhs, body in rules:
            if lhs != x:
                continue
            for i, s in enumerate(body):
                if s in seen:
                    continue
                if usable is not None and not all(usable(t) for j, t in enumerate(body) if j != i):
                    continue
                seen.add(s)
                todo.append(s)
    return seen


def useless_marking(rules: Sequence[Rule], variables: Iterable[str], start: str) -> set[str]:
    variables = set(variables)
    productive = productive_marking(rules, variables)
    kept = [(l, b) for l, b in rules
            if l in productive and all(s in productive or s not in variables for s in b)]
    if start not in productive:
        return variables
    useful = graph_reachable(kept, start) & productive
    return variables - useful


# ---------------------------------------------------------------------------
# Full Chomsky normal form and CYK


@dataclass
class FullCnf:
    rules: list[Rule]
    start: str
    start_nullable: bool
    variables: set[str]


def to_full_cnf(rules: Sequence[Rule], variables: Iterable[str], start: str) -> FullCnf:
    """Textbook conversion: drop eps-rules, drop unit rules, wrap terminals, binarize."""
    variables = set(variables)
    nullable = nullable_marking(rules)

    no_eps: set[Rule] = set()
    for lhs, body in rules:
        optional = [i for i, s in enumerate(body) if s in nullable]
        for k in range(len(optional) + 1):
            for drop in itertools.combinations(optional, k):
                nb = tuple(s for i, s in enumerate(body) if i not in drop)
                if nb:
                    no_eps.add((lhs, nb))

    unit_pairs = {(v, v) for v in variables}
    changed = True
    while changed:
        changed = False
        for lhs, body in no_eps:
            if len(body) == 1 and body[0] in variables:
                for a, b in list(unit_pairs):
                    if b == lhs and (a, body[0]) not in unit_pairs:
                        unit_pairs.add((a, body[0]))
                        changed = True
    no_unit: set[Rule] = set()
    for a, b in unit_pairs:
        for lhs, body in no_eps:
            if lhs == b and not (len(body) == 1 and body[0] in variables):
                no_unit.add((a, body))

    out: set[Rule] = set()
    new_vars = set(variables)
    for lhs, body in sorted(no_unit):
        if len(body) == 1:
            out.add((lhs, body))
            continue
        syms = []
        for s in body:
            if s in variables:
                syms.append(s)
            else:
                w = f"<T:{s}>"
                new_vars.add(w)
                out.add((w, (s,)))
                syms.append(w)
        head = lhs
        for i in range(len(syms) - 2):
            helper = f"<{lhs}|{'.'.join(body)}|{i}>"
            new_vars.add(helper)
            out.add((head, (syms[i], helper)))
            head = helper
        out.add((head, (syms[-2], syms[-1])))
    return FullCnf(sorted(out), start, start in nullable, new_vars)


def cyk_membership(cnf: FullCnf, word: Sequence[str]) -> bool:
    n = len(word)
    if n == 0:
        return cnf.start_nullable
    unary = [(l, b[0]) for l, b in cnf.rules if len(b) == 1]
    binary = [(l, b[0], b[1]) for l, b in cnf.rules if len(b) == 2]
    table = [[set() for _ in range(n + 1)] for _ in range(n)]
    for i, a in enumerate(word):
        table[i][i + 1] = {l for l, t in unary if t == a}
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            cell = table[i][j]
            for k in range(i + 1, j):
                left, right = table[i][k], table[k][j]
                if not left or not right:
                    continue
                for l, b, c in binary:
                    if b in left and c in right:
                        cell.add(l)
    return cnf.start in table[0][n]


def grammar_cyk(g: Grammar, word: Sequence[str]) -> bool:
    cnf = to_full_cnf(rules_of(g), [v.name for v in g.variables], g.start.name)
    return cyk_membership(cnf, word)


# ---------------------------------------------------------------------------
# Finiteness by cycle detection


def is_finite_cnf(g: Grammar) -> bool:
    """Finite iff the variable graph of the reduced full-CNF grammar is acyclic."""
    cnf = to_full_cnf(rules_of(g), [v.name for v in g.variables], g.start.name)
    useless = useless_marking(cnf.rules, cnf.variables, cnf.start)
    rules = [(l, b) for l, b in cnf.rules
             if l not in useless and not any(s in useless for s in b)]
    graph: dict[str, set[str]] = {}
    for l, b in rules:
        graph.setdefault(l, set()).update(s for s in b if s in cnf.variables)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(graph, WHITE)

    def has_cycle(v: str) -> bool:
        colour[v] = GREY
        for w in graph.get(v, ()):
            c = colour.get(w, WHITE)
            if c == GREY:
                return True
            if c == WHITE and has_cycle(w):
                return True
        colour[v] = BLACK
        return False

    return not any(colour[v] == WHITE and has_cycle(v) for v in list(graph))


# ---------------------------------------------------------------------------
# Random instances


def random_rules(rng: random.Random, n_vars: int = 4, n_terms: int = 3, n_prods: int = 8,
                 max_body: int = 3) -> tuple[list[Rule], list[str], list[str]]:
    variables = [f"V{i}" for i in range(rng.randint(1, n_vars))]
    terminals = [t for t in "abc"[: rng.randint(1, n_terms)]]
    symbols = variables + terminals
    rules = []
    for _ in range(rng.randint(1, n_prods)):
        lhs = rng.choice(variables)
        body = tuple(rng.choice(symbols) for _ in range(rng.randint(0, max_body)))
        rules.append((lhs, body))
    return rules, variables, terminals


def random_grammar(rng: random.Random, **kw) -> Grammar:
    rules, variables, terminals = random_rules(rng, **kw)
    return Grammar.build(rules, start=variables[0], variables=variables, terminals=terminals)


def random_nfa(rng: random.Random, alphabet: Sequence[Symbol], max_states: int = 4,
               max_transitions: int = 10) -> Nfa:
    s = rng.randint(1, max_states)
    trans = [
        (rng.randrange(s), rng.choice(alphabet), rng.randrange(s))
        for _ in range(rng.randint(0, max_transitions))
    ]
    finals = {q for q in range(s) if rng.random() < 0.4}
    return Nfa(s, alphabet, rng.randrange(s), finals, trans).seal()


def random_word_from(g: Grammar, rng: random.Random, max_length: int, attempts: int = 20) -> list[str] | None:
    """Sample a terminal word by random leftmost expansion; None if nothing short turns up."""
    rules = rules_of(g)
    variables = {v.name for v in g.variables}
    for _ in range(attempts):
        form = [g.start.name]
        for _ in range(60):
            idx = next((i for i, s in enumerate(form) if s in variables), None)
            if idx is None:
                break
            choices = [b for l, b in rules if l == form[idx]]
            if not choices:
                break
            form[idx:idx + 1] = list(rng.choice(choices))
            if len(form) > max_length + 4:
                break
        if all(s not in variables for s in form) and len(form) <= max_length:
            return form
    return None
