#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot loops on realistic workloads: transducer execution
(tagging), rule scoring and rule application (learning). Run after an
editable install:

    python benchmarks/bench_backends.py
"""

import argparse
import random
import time
from array import array

from fstner import _pykernels
from fstner.corpus import TagAlphabet
from fstner.fst import PackedFst
from fstner.tbl import ContextualRule, LearnedRule, compile_rules

try:
    from fstner import _ckernels
except ImportError:
    _ckernels = None


def build_workload(n_tokens, seed=1234):
    rng = random.Random(seed)
    alphabet = TagAlphabet()
    n = len(alphabet)
    tags = alphabet.symbols

    rules = []
    while len(rules) < 12:
        i = rng.randint(0, 2)
        j = rng.randint(0 if i else 1, 2)
        frm = rng.choice(tags)
        to = rng.choice([t for t in tags if t != frm])
        rules.append(LearnedRule(ContextualRule(
            tuple(rng.choice(tags) for _ in range(i)), frm, to,
            tuple(rng.choice(tags) for _ in range(j))), 1, 1))
    packed = PackedFst(compile_rules(rules, alphabet))

    sentences = []
    total = 0
    while total < n_tokens:
        sent = array("i", (rng.randrange(n) for _ in range(rng.randint(5, 30))))
        sentences.append(sent)
        total += len(sent)
    gold = [array("i", (rng.randrange(n) for _ in s)) for s in sentences]
    pattern = tuple(rng.randrange(n) for _ in range(3))
    return packed, sentences, gold, pattern, total


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_backend(kernels, packed, sentences, gold, pattern, total):
    def run_all():
        for sent in sentences:
            kernels.fst_run(packed.next_tab, packed.out_start,
                            packed.out_syms, packed.n_syms, packed.initial,
                            sent)

    def score_all():
        kernels.score_rule(sentences, gold, pattern, 1, 0)

    def apply_all():
        for sent in sentences:
            kernels.apply_rule(sent, pattern, 1, 0)

    return {
        "fst_run": total / timeit(run_all),
        "score_rule": total / timeit(score_all),
        "apply_rule": total / timeit(apply_all),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tokens", type=int, default=200_000,
                        help="workload size in tokens")
    args = parser.parse_args()

    packed, sentences, gold, pattern, total = build_workload(args.tokens)
    print(f"workload: {total} tokens in {len(sentences)} sentences, "
          f"{packed.next_tab.__len__() // packed.n_syms} transducer states")

    results = {"python": bench_backend(_pykernels, packed, sentences, gold,
                                       pattern, total)}
    if _ckernels is not None:
        results["c"] = bench_backend(_ckernels, packed, sentences, gold,
                                     pattern, total)
    else:
        print("compiled kernels not built; benchmarking pure Python only")

    print(f"\n{'kernel':<12}" + "".join(f"{name:>16}" for name in results)
          + ("        speedup" if "c" in results else ""))
    for kernel in ("fst_run", "score_rule", "apply_rule"):
        row = f"{kernel:<12}"
        for name in results:
            row += f"{results[name][kernel]:>12,.0f} t/s"
        if "c" in results:
            row += f"{results['c'][kernel] / results['python'][kernel]:>14.1f}x"
        print(row)


if __name__ == "__main__":
    main()
