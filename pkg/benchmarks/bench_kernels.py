"""Timing comparison of the jitted kernels against the numpy fallbacks.

Run as a script:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--shots 1000000]

Each workload is timed as the best of several repeats after a warmup call,
so jit compilation never counts.  When numba is unavailable (or disabled via
LGSIM_DISABLE_NUMBA) only the fallback column is produced.
"""

import argparse
import math
import time

import numpy as np

from lgsim import _kernels
from lgsim.dynamics import HamiltonianSpec, LindbladSpec, lindblad_propagator


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(shots):
    spec = LindbladSpec(HamiltonianSpec(1.0), 0.002)
    gap = lindblad_propagator(spec, math.pi).ptm
    gap2 = lindblad_propagator(spec, 2.0 * math.pi).ptm
    thetas = np.linspace(0.01, math.pi - 0.01, 20_000)

    for n in (1, 8):
        gap13 = lindblad_propagator(spec, (2 * n + 3) * math.pi).ptm
        yield (
            f"protocol_lg  n={n}, {len(thetas)} thetas",
            lambda g13=gap13, nn=n: _kernels.protocol_lg(thetas, nn, gap, g13),
            lambda g13=gap13, nn=n: _kernels.protocol_lg_numpy(thetas, nn, gap, g13),
        )

    yield (
        f"battery_eps  {len(thetas)} thetas",
        lambda: _kernels.battery_eps(thetas, gap, gap2),
        lambda: _kernels.battery_eps_numpy(thetas, gap, gap2),
    )

    k = 6
    rng = np.random.Generator(np.random.Philox(key=np.array([7, 0], dtype=np.uint64)))
    u = rng.random((shots, k))
    lin = np.stack([gap[1:, 1:]] * k)
    aff = np.stack([gap[1:, 0]] * k)
    axes = np.tile(np.array([0.0, 0.0, 1.0]), (k, 1))
    r0 = np.zeros(3)
    out = np.empty((shots, k), dtype=np.int8)
    yield (
        f"sample_paths {shots} shots x {k} events",
        lambda: _kernels.sample_paths(u, lin, aff, axes, r0, out),
        lambda: _kernels.sample_paths_numpy(u, lin, aff, axes, r0, out),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--shots", type=int, default=1_000_000)
    args = ap.parse_args()

    if _kernels.using_numba:
        header = f"{'workload':<42} {'jit (ms)':>10} {'numpy (ms)':>11} {'speedup':>8}"
    else:
        header = f"{'workload':<42} {'numpy (ms)':>11}   (numba inactive)"
    print(header)
    print("-" * len(header))

    for name, jitted, plain in workloads(args.shots):
        plain()  # warmup (allocations, caches)
        t_np = best_of(plain, args.repeats)
        if _kernels.using_numba:
            jitted()  # warmup (compilation)
            t_jit = best_of(jitted, args.repeats)
            print(
                f"{name:<42} {t_jit * 1e3:>10.2f} {t_np * 1e3:>11.2f} {t_np / t_jit:>7.1f}x"
            )
        else:
            print(f"{name:<42} {t_np * 1e3:>11.2f}")


if __name__ == "__main__":
    main()
