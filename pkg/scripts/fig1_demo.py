"""Saturate the running example and print every added transition with its derivation."""

import argparse
from pathlib import Path

from prestar import build_index, normalize, parse_automaton, parse_grammar, saturate, to_dot
from prestar.saturation import extract_derivation

DATA = Path(__file__).parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dot", type=Path, help="also write the saturated automaton as DOT")
    args = ap.parse_args()

    g = parse_grammar((DATA / "fig1.cfg").read_text())
    a = parse_automaton((DATA / "fig1.aut").read_text(), g)
    sat = saturate(build_index(normalize(g)), a)
    for t in sat.added():
        q, sym, q2 = t
        print(f"({a.state_name(q)}, {sym.name}, {a.state_name(q2)})")
        tree = extract_derivation(sat, t)
        print("   ", tree.pretty().replace("\n", "\n    "))
    print("counters:", sat.counters.to_json())
    if args.dot:
        args.dot.write_text(to_dot(sat.nfa, highlight=sat.added()))


if __name__ == "__main__":
    main()
