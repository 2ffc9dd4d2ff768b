#!/usr/bin/env python3
"""Compare the compiled and pure-Python hashing kernels.

Times trigram counting over a mixed corpus of instruction-like strings
and scene captions at several embedding dimensions.

Run from the repo root:  python benchmarks/bench_kernels.py
"""

import importlib
import random
import statistics
import time

from twolane.kernels import pure

try:
    fast = importlib.import_module("twolane.kernels._fast")
except ImportError:
    fast = None

WORDS = (
    "pick place rotate cube bowl toy box tile zone stack sort solve word "
    "equation red green blue yellow left right table the into onto"
).split()


def corpus(n=2000, seed=7):
    rng = random.Random(seed)
    texts = []
    for _ in range(n):
        k = rng.randint(4, 24)
        texts.append(" ".join(rng.choice(WORDS) for _ in range(k)))
    return texts


def timed(fn, texts, dim, repeats=5):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for text in texts:
            fn(text, dim)
        samples.append(time.perf_counter() - t0)
    return min(samples)


def main():
    texts = corpus()
    chars = sum(len(t) for t in texts)
    print(f"corpus: {len(texts)} texts, {chars} chars")
    print(f"{'dim':>5} {'pure (s)':>10} {'cython (s)':>11} {'speedup':>8}")
    for dim in (64, 512, 2048):
        t_pure = timed(pure.trigram_counts, texts, dim)
        if fast is None:
            print(f"{dim:>5} {t_pure:>10.3f} {'n/a':>11} {'n/a':>8}")
            continue
        t_fast = timed(fast.trigram_counts, texts, dim)
        print(f"{dim:>5} {t_pure:>10.3f} {t_fast:>11.3f} {t_pure / t_fast:>7.1f}x")
    if fast is None:
        print("compiled kernel unavailable; built pure-only")


if __name__ == "__main__":
    main()
