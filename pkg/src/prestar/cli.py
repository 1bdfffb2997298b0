"""Command-line front end: context-free grammar questions answered by pre* saturation.

Boolean queries answer through the exit status: 0 yes, 1 no, 2 usage or
input error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path

from . import analyses, oracle
from .automaton import (
    DEFAULT_MAX_DFA_STATES,
    AutomatonError,
    ResourceLimitError,
    parse_automaton,
    to_dot,
)
from .grammar import GrammarError, Grammar, build_index, normalize, parse_grammar
from .saturation import Counters, saturate

YES, NO, USAGE, RESOURCE = 0, 1, 2, 3

SUBCOMMANDS = {
    "prestar": "saturate an automaton and print (or export) the result",
    "member": "is the word in the language?",
    "parse": "print a derivation of the word",
    "empty": "is the language empty?",
    "finite": "is the language finite?",
    "useless": "list useless variables",
    "productive": "list productive variables",
    "reachable": "list reachable variables",
    "nullable": "list nullable variables",
    "contain": "is the language contained in a regular language?",
}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prestar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-g", "--grammar", required=True, type=Path, help="grammar file")
    common.add_argument("--start", help="override the start variable")
    common.add_argument("--stats", action="store_true", help="write counters as JSON lines to stderr")
    common.add_argument("--seed", type=int, default=None,
                        help="pop the worklist in a seeded random order (prestar only)")
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("prestar", "contain"):
            p.add_argument("-a", "--automaton", type=Path, required=True, help="automaton file")
        if name in ("member", "parse"):
            p.add_argument("-w", "--word", required=True,
                           help="whitespace-separated terminals (empty string for eps)")
        if name == "prestar":
            p.add_argument("--dot", type=Path, help="write the saturated automaton as DOT")
        if name == "parse":
            p.add_argument("--normalized", action="store_true",
                           help="print the derivation over the normalized grammar")
        if name == "contain":
            p.add_argument("--complement", action="store_true",
                           help="the automaton accepts L itself; complement it first")
            p.add_argument("--max-dfa-states", type=int, default=DEFAULT_MAX_DFA_STATES)
    # debugging aid, kept out of the help listing
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("-a", "--automaton", type=Path, required=True)
    return parser


def _load_grammar(args) -> Grammar:
    text = args.grammar.read_text(encoding="utf-8")
    g = parse_grammar(text, source=str(args.grammar))
    if args.start is not None:
        if args.start not in g or not g.symbol(args.start).is_variable:
            raise UsageError(f"--start {args.start!r} is not a variable of the grammar")
        g = g.with_start(args.start)
    return g


def _emit_stats(args, counters: list[Counters]) -> None:
    if args.stats:
        for c in counters:
            print(c.to_json(), file=sys.stderr)


def _symbols_out(symbols) -> None:
    for name in sorted(s.name for s in symbols):
        print(name)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else YES
    try:
        return _dispatch(args)
    except (GrammarError, AutomatonError, UsageError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"prestar: error: {msg}", file=sys.stderr)
        return USAGE
    except ResourceLimitError as exc:
        print(f"prestar: resource limit: {exc}", file=sys.stderr)
        return RESOURCE


def _dispatch(args) -> int:
    g = _load_grammar(args)
    cmd = args.command

    if cmd in ("prestar", "oracle"):
        a = parse_automaton(args.automaton.read_text(encoding="utf-8"), g, source=str(args.automaton))
        if cmd == "oracle":
            for q, name, q2 in sorted(oracle.naive_saturate(normalize(g), a)):
                print(a.state_name(q), name, a.state_name(q2))
            return YES
        rng = random.Random(args.seed) if args.seed is not None else None
        sat = saturate(build_index(normalize(g)), a, rng=rng)
        for q, sym, q2 in sat.nfa:
            marker = "+" if (q, sym, q2) not in a else " "
            print(f"{marker} {a.state_name(q)} {sym.name} {a.state_name(q2)}")
        if args.dot is not None:
            args.dot.write_text(to_dot(sat.nfa, highlight=sat.added()), encoding="utf-8")
        _emit_stats(args, [sat.counters])
        return YES

    if cmd == "contain":
        a = parse_automaton(args.automaton.read_text(encoding="utf-8"), g, source=str(args.automaton))
        report = analyses.analyze("contain", g, automaton=a, complement_first=args.complement,
                                  max_states=args.max_dfa_states)
    elif cmd in ("member", "parse"):
        report = analyses.analyze(cmd, g, word=args.word.split())
    else:
        report = analyses.analyze(cmd, g)
    _emit_stats(args, report.counters)

    if isinstance(report.result, frozenset):
        _symbols_out(report.result)
        return YES
    if cmd == "parse":
        if report.derivation is None:
            print("not in language")
            return NO
        tree = report.derivation.tree if args.normalized else report.derivation.original()
        print(tree.pretty())
        return YES
    print("yes" if report.result else "no")
    return YES if report.result else NO


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="prestar: %(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
