"""Compare the saturation engine with the naive fixpoint and the exhaustive pre* search.

Prints mismatch counts and the time spent in each implementation.
"""

import argparse
import itertools
import random
import time

from prestar import build_index, normalize, saturate
from prestar.oracle import BehaviourSearch, naive_saturate, random_grammar, random_nfa


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--form-length", type=int, default=3)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    t_engine = t_naive = t_search = 0.0
    fixpoint_diff = accept_diff = forms = 0
    for _ in range(args.instances):
        g = random_grammar(rng)
        a = random_nfa(rng, list(g.symbols))
        ng = normalize(g)
        t0 = time.perf_counter()
        sat = saturate(build_index(ng), a)
        t1 = time.perf_counter()
        naive = naive_saturate(ng, a)
        t2 = time.perf_counter()
        search = BehaviourSearch(g, a)
        t3 = time.perf_counter()
        t_engine += t1 - t0
        t_naive += t2 - t1
        t_search += t3 - t2
        fixpoint_diff += {(q, s.name, r) for q, s, r in sat.nfa} != naive
        symbols = sorted(set(g.symbols) | set(a.alphabet))
        for n in range(args.form_length + 1):
            for form in itertools.product(symbols, repeat=n):
                forms += 1
                accept_diff += sat.accepts(list(form)) != search.accepts([s.name for s in form])
    print(f"instances: {args.instances}, forms checked: {forms}")
    print(f"fixpoint mismatches: {fixpoint_diff}, acceptance mismatches: {accept_diff}")
    print(f"time: engine {t_engine:.2f} s, naive {t_naive:.2f} s, exhaustive search {t_search:.2f} s")


if __name__ == "__main__":
    main()
