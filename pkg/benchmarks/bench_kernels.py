"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints one line per (kernel, backend) with the best wall time and the
speed-up of the compiled backend. Outputs are checked to be identical.
"""

import argparse
import time

import numpy as np

from palab import kernels
from palab.census import builtin_motif, count_embeddings
from palab.coloring import greedy_by_ordering
from palab.model import PAParams, as_ordered_digraph, generate


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--t", type=int, default=20000)
    args = ap.parse_args()
    backends = kernels.available()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python backend is timed")
    params = PAParams(2, -1, args.t, 1)
    host = as_ordered_digraph(generate(params))
    cases = {
        "pa_edges": lambda b: generate(params, backend=b).targets,
        "greedy_colors": lambda b: greedy_by_ordering(host, backend=b).colors,
        "count(triangle)": lambda b: count_embeddings(host, builtin_motif("triangle"), backend=b),
        "count(c7)": lambda b: count_embeddings(host, builtin_motif("c7"), backend=b),
    }
    print(f"t={args.t} m=2 delta=-1, best of {args.repeat}")
    for name, fn in cases.items():
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = best_of(lambda: fn(b), args.repeat)
        same = all(np.array_equal(outs[b], outs[backends[0]]) for b in backends)
        line = "  ".join(f"{b}={times[b] * 1e3:9.2f} ms" for b in backends)
        if "cython" in times:
            line += f"  speed-up x{times['python'] / times['cython']:.1f}"
        print(f"{name:16s} {line}  identical={same}")


if __name__ == "__main__":
    main()
