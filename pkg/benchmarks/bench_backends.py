#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Runs the same integration workloads in two child processes, one with
``IGFLOW_BACKEND=numba`` and one with ``IGFLOW_BACKEND=numpy``, and prints a
timing table.  Each child warms up once (covering JIT compilation) and then
reports the best of ``--repeat`` timed runs, so the comparison measures
steady-state stepping cost only.

Usage:  python benchmarks/bench_backends.py [--repeat 3] [--steps 200000]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, time
import numpy as np
import igflow as ig
from igflow import kernels

steps = {steps}
repeat = {repeat}

def workloads():
    ideal = ig.ideal_gas()
    vdw = ig.vdw_gas(a=0.5, b=0.1)
    span = 2.0
    h = span / steps
    out = np.array([0.0, span])
    yield "hamilton ideal", (
        kernels.HAM_DIAG, ideal.state([1.0, 1.0]).as_vector(),
        np.concatenate([[ideal.energy], ideal.eta.values]), 0.0, span, h, out,
    )
    yield "hamilton vdw", (
        kernels.HAM_VDW, vdw.state([2.0, 1.0]).as_vector(),
        np.array([vdw.energy, 0.5, 0.1, vdw.eta.alpha2, vdw.eta.beta2]), 0.0, span, h, out,
    )
    yield "gradient vdw", (
        kernels.GRAD_VDW, np.array([2.0, 1.0]),
        np.array([0.5, 0.1, vdw.eta.alpha2, vdw.eta.beta2, 1.5, 1.0]), 0.0, span, h, out,
    )
    rng = np.random.default_rng(0)
    q0 = 0.05 + rng.random(8); q0 /= q0.sum()
    q2 = 0.05 + rng.random(8); q2 /= q2.sum()
    yield "discrete KL N=8", (kernels.KL, q0, np.log(q2), 0.0, span, h, out)

results = {{}}
for name, args in workloads():
    kernels.run_rk4(*args)  # warm-up (includes JIT compile under numba)
    best = min(
        (lambda t0: (kernels.run_rk4(*args), time.perf_counter() - t0)[1])(time.perf_counter())
        for _ in range(repeat)
    )
    results[name] = best
print(json.dumps({{"backend": ig.backend_name(), "seconds": results}}))
"""


def run_child(backend: str, steps: int, repeat: int) -> dict:
    env = dict(os.environ, IGFLOW_BACKEND=backend)
    code = CHILD.format(steps=steps, repeat=repeat)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--steps", type=int, default=200_000)
    args = parser.parse_args()

    numba = run_child("numba", args.steps, args.repeat)
    numpy_ = run_child("numpy", args.steps, args.repeat)

    print(f"RK4 steps per run: {args.steps}, best of {args.repeat}\n")
    print(f"{'workload':<20} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9}")
    for name in numba["seconds"]:
        tn = numba["seconds"][name]
        tp = numpy_["seconds"][name]
        print(f"{name:<20} {tn:>12.4f} {tp:>12.4f} {tp / tn:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
