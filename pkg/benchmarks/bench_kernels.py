#!/usr/bin/env python3
"""Benchmark the compiled (numba) kernels against the pure-numpy fallback.

The two backends produce bit-identical outputs (asserted here on every
workload), so this measures speed only.

    python benchmarks/bench_kernels.py [--trials 20000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from mtlimits import mc, scenarios
from mtlimits.mc.backend import available_backends


def workloads(trials: int):
    fn_big = scenarios.make_fair_noisy_scenario(4, 1024, 0.5, 2.0)
    fn_mid = scenarios.make_fair_noisy_scenario(4, 64, 0.5, 2.0)
    agn = scenarios.make_agnostic_scenario(20, 256, 0.5)
    ibb = scenarios.make_agnostic_scenario(50, 200, float(np.exp(-3.125)))
    return [
        ("bayes fair/noisy N=1024",
         lambda b: mc.simulate_bayes_test_error(fn_big, trials, 1, backend=b)),
        ("kl fair/noisy N=64",
         lambda b: mc.estimate_mixture_kl_mc(fn_mid, trials, 2, backend=b)),
        ("bayes agnostic N=256",
         lambda b: mc.simulate_bayes_test_error(agn, trials, 3, backend=b)),
        ("risk pool fair/noisy N=64",
         lambda b: mc.simulate_learner_risk(fn_mid, mc.LearnerSpec.pool(), trials, 4,
                                            backend=b)),
        ("risk ibb agnostic N=200",
         lambda b: mc.simulate_learner_risk(ibb, mc.LearnerSpec.ibb(1.0, 0.01),
                                            trials, 5, backend=b)),
        ("construction N+1=1000",
         lambda b: mc.estimate_construction_feasibility(1000, trials, 6, backend=b)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    if "numba" not in backends:
        print("numba unavailable; nothing to compare"); return

    print(f"{'workload':34s} {'numba':>9s} {'numpy':>9s} {'speedup':>8s}  identical")
    for name, run in workloads(args.trials):
        run("numba")  # compile outside the timed region
        results, times = {}, {}
        for backend in ("numba", "numpy"):
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[backend] = run(backend)
                best = min(best, time.perf_counter() - t0)
            times[backend] = best
        same = results["numba"] == results["numpy"]
        print(f"{name:34s} {times['numba']:8.3f}s {times['numpy']:8.3f}s "
              f"{times['numpy'] / times['numba']:7.1f}x  {same}")
        assert same, f"backend mismatch on {name}"


if __name__ == "__main__":
    main()
