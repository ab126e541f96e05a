"""Compare the numpy and numba backends on gram-matrix construction.

Both backends must produce bitwise-identical matrices; this script asserts
that while timing them, so it doubles as an end-to-end equivalence check
on data larger than the test suite uses.

Run from the repository root after installing the package:

    python3 benchmarks/bench_backends.py --graphs 60 --max-nodes 16
"""

import argparse
import time

import numpy as np

from graphkern import GhConfig, NodeKernelSpec, from_edges, gram, make_dataset
from graphkern import backend


def random_dataset(count, max_nodes, seed):
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(count):
        n = int(rng.integers(4, max_nodes + 1))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < 3.0 / n]
        graphs.append(from_edges(n, edges, labels=rng.integers(0, 4, size=n)))
    classes = [i % 2 for i in range(count)]
    return make_dataset(graphs, classes, f"random-{count}")


def timed_gram(dataset, config, threads, repeat):
    gram(dataset, config, threads=threads)  # warm (JIT compile, caches)
    best = float("inf")
    result = None
    for _ in range(repeat):
        started = time.perf_counter()
        result = gram(dataset, config, threads=threads)
        best = min(best, time.perf_counter() - started)
    return best, result.values


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--graphs", type=int, default=60)
    parser.add_argument("--max-nodes", type=int, default=16)
    parser.add_argument("--s", default="0,1,2",
                        help="comma-separated gap sizes")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions; the best run is reported")
    args = parser.parse_args()

    dataset = random_dataset(args.graphs, args.max_nodes, args.seed)
    gap_sizes = [int(tok) for tok in args.s.split(",")]
    spec = NodeKernelSpec("dirac")

    print(f"dataset: {args.graphs} graphs, 4..{args.max_nodes} nodes, "
          f"threads={args.threads}, best of {args.repeat}")
    header = f"{'s':>3} {'numpy':>10} {'numba':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    try:
        for s in gap_sizes:
            config = GhConfig(s=s, node_kernel=spec)
            results = {}
            for name in ("numpy", "numba"):
                backend.use(name)
                results[name] = timed_gram(dataset, config, args.threads,
                                           args.repeat)
            assert np.array_equal(results["numpy"][1], results["numba"][1]), \
                f"backends disagree at s={s}"
            t_np, t_nb = results["numpy"][0], results["numba"][0]
            print(f"{s:>3} {t_np:>9.3f}s {t_nb:>9.3f}s {t_np / t_nb:>8.1f}x")
    finally:
        backend.use(None)  # back to the GRAPHKERN_BACKEND / auto default
    print("matrices bitwise identical across backends")


if __name__ == "__main__":
    main()
