#!/usr/bin/env python3
"""Measure non-linear head wall time against the token count n and fit the
growth exponent. The coefficient path computes c_j through G = AV in
O(n^2 d_v), so the fit should stay near 2 (plus call overhead at small n),
not 3.

Example:
    python scripts/cost_scaling.py --sizes 8,16,32,64,128,256 --repeats 25
"""

import argparse
import time

import numpy as np

import energy_attention as ea
from energy_attention.rng import GaussianStream


def timed_head(n, d, d_k, d_v, iters, repeats):
    stream = GaussianStream(n)
    scale = 1.0 / d**0.5
    x = stream.matrix(n, d, scale)
    weights = ea.ProjectionWeights(
        stream.matrix(d, d_k, scale),
        stream.matrix(d, d_k, scale),
        stream.matrix(d, d_v, scale),
    )
    spec = ea.HeadSpec(
        d=d, d_k=d_k, d_v=d_v, form=ea.QUADRATIC,
        descent=ea.DescentConfig(eta=1e-6, max_iters=iters, grad_tol=0.0, backtracking=False),
        perturb_sigma=0.1, perturb_seed=n,
    )
    ea.run_head(x, weights, spec)  # warmup
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        ea.run_head(x, weights, spec)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,128")
    parser.add_argument("--d-v", type=int, default=4)
    parser.add_argument("--iters", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=25)
    args = parser.parse_args()

    sizes = [int(tok) for tok in args.sizes.split(",")]
    times = []
    print(f"{'n':>6s} {'best wall time':>16s}")
    for n in sizes:
        best = timed_head(n, 8, 4, args.d_v, args.iters, args.repeats)
        times.append(best)
        print(f"{n:6d} {best * 1e3:13.3f} ms")
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    print(f"fitted exponent: {slope:.2f}")


if __name__ == "__main__":
    main()
