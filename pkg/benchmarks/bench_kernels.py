#!/usr/bin/env python3
"""Benchmark the counting kernels: compiled extension vs pure Python.

Times batched subset counting (the Apriori/metrics hot loop) and
subsequence counting (the GSP hot loop) on synthetic workloads through the
same backend interface the miners use.

  python benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]
"""

import argparse
import random
import time

from engage_miner.kernels import available_backends


def _subset_workload(rng, scale):
    n_bits = 80
    n_rows = int(20000 * scale)
    n_queries = int(300 * scale)
    masks = [rng.getrandbits(n_bits) for _ in range(n_rows)]
    queries = [
        rng.getrandbits(n_bits) & rng.getrandbits(n_bits) & rng.getrandbits(n_bits)
        for _ in range(n_queries)
    ]
    return masks, queries, n_bits


def _sequence_workload(rng, scale):
    sequences = [
        [rng.randrange(8) for _ in range(rng.randint(20, 120))]
        for _ in range(int(3000 * scale))
    ]
    patterns = [
        [rng.randrange(8) for _ in range(rng.randint(1, 4))]
        for _ in range(int(200 * scale))
    ]
    return sequences, patterns


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("note: compiled backend not built; only the pure backend will run")

    rng = random.Random(args.seed)
    masks, queries, n_bits = _subset_workload(rng, args.scale)
    sequences, patterns = _sequence_workload(rng, args.scale)

    print(f"subset counting: {len(masks)} transactions x {len(queries)} queries, "
          f"{n_bits} bits")
    print(f"subsequence counting: {len(sequences)} sequences x {len(patterns)} patterns")
    print()
    print(f"{'kernel':<28}{'backend':<10}{'best (ms)':>12}{'speedup':>10}")

    for label, make in (
        ("subset counting", lambda mod: lambda: mod.count_subsets(
            mod.pack_masks(masks, n_bits), queries, n_bits)),
        ("subsequence counting", lambda mod: lambda: mod.count_subsequences(
            mod.pack_sequences(sequences), patterns)),
    ):
        timings = {}
        results = {}
        for name, mod in sorted(backends.items()):
            timings[name], results[name] = _time(make(mod), args.repeat)
        if len(results) == 2 and results["python"] != results["cython"]:
            raise SystemExit(f"{label}: backends disagree")
        base = timings.get("python")
        for name in sorted(timings):
            speedup = f"{base / timings[name]:.1f}x" if base else "-"
            print(f"{label:<28}{name:<10}{timings[name] * 1e3:>12.1f}{speedup:>10}")

    print(f"\n(best of {args.repeat} runs per cell; results verified equal across backends)")


if __name__ == "__main__":
    main()
