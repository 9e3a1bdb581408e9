"""Solver accuracy against exactly solvable flows.

Two families have closed-form solutions: the round profile of radius r0
(a sphere in revolution) dies at T = r0^2/(2n), and under n = 1 the
Angenent oval evolves through its own closed form, kappa(theta, t) =
sqrt(1/(e^{-2t} - 1) + cos^2 theta).  This script measures both.

Run:  python demos/shrinking_benchmarks.py
"""
import time

import numpy as np

from slabflow.angenent_oval import oval_curvature, sample_profile
from slabflow.profile import grid
from slabflow.solver import FlowState, SolverConfig, evolve
from slabflow.harness import sphere_benchmark


def main():
    print("shrinking sphere, r0 = 1: relative error of the estimated")
    print("extinction time against T = 1/(2n).")
    print(f"{'n':>3} {'N':>6} {'rel error':>12} {'seconds':>9}")
    for n in (1, 2, 3):
        for N in (64, 128, 256):
            start = time.perf_counter()
            err = sphere_benchmark(n, 1.0, SolverConfig(N=N, safety=0.35))
            wall = time.perf_counter() - start
            print(f"{n:3d} {N:6d} {err:12.3e} {wall:9.2f}")
        print()
    print("doubling N cuts the error about fourfold (second-order scheme);")
    print("n = 1 is exact to extrapolation accuracy because the area of a")
    print("shrinking circle is exactly linear in time.")
    print()

    print("curve shortening of the oval, t = -2 -> -1:")
    print(f"{'N':>6} {'max rel kappa err':>18} {'seconds':>9}")
    prev = None
    for N in (256, 512):
        start = time.perf_counter()
        s0 = FlowState(curve=sample_profile(-2.0, N, 1), t=-2.0)
        rec = evolve(s0, SolverConfig(N=N, safety=0.35), stop_time=-1.0)
        wall = time.perf_counter() - start
        exact = oval_curvature(grid(N)[0], float(rec.times[-1]))
        err = float(np.max(np.abs(rec.kappas[-1] - exact) / exact))
        ratio = "" if prev is None else f"   ({prev / err:.2f}x down)"
        print(f"{N:6d} {err:18.3e} {wall:9.2f}{ratio}")
        prev = err


if __name__ == "__main__":
    main()
