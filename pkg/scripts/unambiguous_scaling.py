"""Binary-production work of membership for a^n b^n, against an ambiguous grammar.

For the unambiguous grammar S -> X_a S X_b | eps the number of binary firings
should grow roughly quadratically (ratio ~4 per doubling or less); the
ambiguous S -> S S | a on a^n is expected to grow cubically (ratio ~8).
"""

import argparse
import time

from prestar import membership, parse_grammar

UNAMBIGUOUS = "S -> X_a S X_b | eps\nX_a -> a\nX_b -> b"
AMBIGUOUS = "S -> S S | a"


def run(grammar: str, word_of, sizes):
    g = parse_grammar(grammar)
    prev = None
    for n in sizes:
        stats = []
        t0 = time.perf_counter()
        assert membership(g, word_of(n), stats)
        ms = (time.perf_counter() - t0) * 1e3
        fires = sum(c.binary_fires for c in stats)
        ratio = f"{fires / prev:5.2f}" if prev else "    -"
        print(f"  n={n:4d}  binary_fires={fires:9d}  ratio={ratio}  {ms:8.1f} ms")
        prev = fires


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=128)
    args = ap.parse_args()
    sizes = []
    n = 8
    while n <= args.max_n:
        sizes.append(n)
        n *= 2
    print("unambiguous S -> X_a S X_b | eps on a^n b^n")
    run(UNAMBIGUOUS, lambda n: ["a"] * n + ["b"] * n, sizes)
    print("ambiguous S -> S S | a on a^n")
    run(AMBIGUOUS, lambda n: ["a"] * n, [s for s in sizes if s <= 64])


if __name__ == "__main__":
    main()
