"""Benchmark the compiled LCS kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_lcs.py [--pairs N] [--len L]

The LCS kernel dominates step alignment (every source step is scored
against every target step of every candidate pair) and ROUGE-L, so this
is the hot path worth compiling.
"""

import argparse
import random
import time

from recipe_rewriter import kernels
from recipe_rewriter.kernels import _pure

VOCAB = ("mix", "pour", "heat", "stir", "milk", "sugar", "bowl", "mug",
         "add", "the", "and", "until", "warm", "gently", "serve", "top")


def make_pairs(n: int, length: int, seed: int = 42):
    rng = random.Random(seed)
    return [([rng.choice(VOCAB) for _ in range(length)],
             [rng.choice(VOCAB) for _ in range(length)])
            for _ in range(n)]


def bench(fn, pairs) -> float:
    start = time.perf_counter()
    for a, b in pairs:
        fn(a, b)
    return time.perf_counter() - start


def pure_lcs(a, b):
    return _pure.lcs_length_ids(*kernels._encode(a, b))


def pure_run(a, b):
    return _pure.longest_common_run_ids(*kernels._encode(a, b))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--len", dest="length", type=int, default=40)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.length)
    print(f"backend selected at import: {kernels.BACKEND}")
    print(f"{args.pairs} pairs of length {args.length}\n")

    for name, selected, pure in (
            ("lcs_length", kernels.lcs_length, pure_lcs),
            ("longest_common_run", kernels.longest_common_run, pure_run)):
        # correctness cross-check before timing
        for a, b in pairs[:200]:
            assert selected(a, b) == pure(a, b)
        t_sel = bench(selected, pairs)
        t_pure = bench(pure, pairs)
        speedup = t_pure / t_sel if t_sel else float("inf")
        print(f"{name:20s} selected: {t_sel:8.4f}s   "
              f"pure: {t_pure:8.4f}s   speedup: {speedup:5.2f}x")


if __name__ == "__main__":
    main()
