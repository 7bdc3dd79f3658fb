#!/usr/bin/env python3
"""Microbenchmark of the hot kernels: compiled extension vs numpy/scipy.

Times one synchronous diffusion round over a stack of status matrices and
all-pairs shortest path lengths, at a few problem sizes, for whichever
backends are importable.  Median per-call wall time is reported together
with the compiled-over-python speedup.

Run from anywhere after installing the package:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 20 --sizes 40x35 100x116 200x116
"""

import argparse
import statistics
import time

import numpy as np

from netatlas import _kernels_py

try:
    from netatlas import _kernels
except ImportError:
    _kernels = None


def make_diffusion_inputs(n, r, seed=0):
    """Random well-formed inputs: symmetric statuses with 1/2 diagonals and
    row-stochastic sparse local kernels, stacked C-contiguously."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.0, 0.05, (n, r, r))
    p = (p + p.transpose(0, 2, 1)) / 2.0
    idx = np.arange(r)
    p[:, idx, idx] = 0.5
    q = rng.uniform(0.0, 1.0, (n, r, r))
    q[:, idx, idx] = 0.0
    cut = np.sort(q, axis=2)[:, :, max(r - 25, 1) - 1][:, :, None]
    q[q < cut] = 0.0
    q /= q.sum(axis=2, keepdims=True)
    s = p.sum(axis=0)
    out = np.empty_like(p)
    return (
        np.ascontiguousarray(p),
        np.ascontiguousarray(q),
        np.ascontiguousarray(s),
        out,
    )


def make_graph(r, seed=0):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.1, 1.0, (r, r))
    w[rng.random((r, r)) < 0.4] = 0.0
    w = np.triu(w, 1)
    return np.ascontiguousarray(w + w.T)


def timed(fn, repeats):
    """Median wall time per call, after one warmup call."""
    fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    return f"{seconds * 1e3:8.2f} ms"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=10, help="timed calls per case")
    ap.add_argument(
        "--sizes",
        nargs="+",
        default=["40x35", "100x116", "200x116"],
        metavar="NxR",
        help="diffusion stack sizes as <subjects>x<nodes>",
    )
    args = ap.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled extension not available; timing the fallback only\n")

    rows = []
    for size in args.sizes:
        n, r = (int(v) for v in size.lower().split("x"))
        p, q, s, out = make_diffusion_inputs(n, r)
        times = {
            name: timed(lambda m=mod: m.diffusion_round(p, q, s, out, 0, n), args.repeats)
            for name, mod in backends
        }
        rows.append((f"diffusion_round    N={n:<4d} r={r}", times))

    for r in sorted({int(size.lower().split("x")[1]) for size in args.sizes}):
        w = make_graph(r)
        times = {
            name: timed(lambda m=mod: m.shortest_path_lengths(w), args.repeats)
            for name, mod in backends
        }
        rows.append((f"shortest_paths     r={r}", times))

    header = f"{'kernel / size':<34s} {'python':>12s}"
    if _kernels is not None:
        header += f" {'compiled':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for label, times in rows:
        line = f"{label:<34s} {fmt(times['python']):>12s}"
        if "compiled" in times:
            ratio = times["python"] / times["compiled"]
            line += f" {fmt(times['compiled']):>12s} {ratio:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
