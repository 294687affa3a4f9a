#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy/Python fallback.

Runs the hot paths (radial integration, Sturm counting/bisection, inverse
iteration, a full singular eigensolve) in the current process and then once
more in a subprocess with HENONMORSE_NO_NUMBA=1, printing a side-by-side
table.

    python benchmarks/bench_kernels.py            # both paths
    python benchmarks/bench_kernels.py --inner    # just the current mode
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def timed(fn, *args, repeat=3, **kwargs):
    fn(*args, **kwargs)  # warm-up / JIT
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks():
    from henonmorse import _kernels as K
    from henonmorse.radial import linearized_potential, solve_nodal_power
    from henonmorse.spectral import (SpectralConfig, WeightedSLProblem,
                                     solve_singular_spectrum)

    results = {"numba": K.NUMBA_ENABLED}

    results["integrate m=3 (rtol 1e-10)"] = timed(
        K.integrate_radial_power, 3.0, 1.0, 3.0, 1.0, 1e4, 1e-10, 1e-12,
        3, 400000, 1e-12)

    rng = np.random.default_rng(0)
    n = 8192
    d = rng.normal(size=n) * 3
    e = rng.normal(size=n - 1)
    results["sturm count (n=8192)"] = timed(K.sturm_count, d, e, 0.0,
                                            repeat=10)
    lo = float(d.min() - 2 * np.abs(e).max())
    results["bisect 4 eigenvalues (n=8192)"] = timed(
        K.bisect_eigenvalues, d, e, lo, 0.0, 1, 4, 1e-13, 1e-300)
    lam = K.bisect_eigenvalues(d, e, lo, 0.0, 1, 1, 1e-13, 1e-300)[0]
    results["inverse iteration (n=8192)"] = timed(
        K.inverse_iteration, d, e, lam, 3, repeat=10)

    prof = solve_nodal_power(3.0, 3.0, 2)
    prob = WeightedSLProblem(M=3.0, a=linearized_potential(prof),
                             kind="singular")
    results["full singular solve (n=4096)"] = timed(
        solve_singular_spectrum, prob, 2, SpectralConfig(), repeat=2)
    return results


def main():
    if "--inner" in sys.argv:
        print(json.dumps(run_benchmarks()))
        return
    here = run_benchmarks()
    env = dict(os.environ, HENONMORSE_NO_NUMBA="1")
    out = subprocess.run([sys.executable, __file__, "--inner"], env=env,
                         capture_output=True, text=True, check=True)
    other = json.loads(out.stdout.strip().splitlines()[-1])
    first, second = (here, other) if here["numba"] else (other, here)
    print(f"{'benchmark':<36} {'numba':>12} {'fallback':>12} {'speedup':>9}")
    for key in first:
        if key == "numba":
            continue
        a, b = first[key], second[key]
        print(f"{key:<36} {a * 1e3:>10.2f}ms {b * 1e3:>10.2f}ms "
              f"{b / a:>8.1f}x")


if __name__ == "__main__":
    main()
