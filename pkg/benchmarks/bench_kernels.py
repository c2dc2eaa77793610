#!/usr/bin/env python3
"""Benchmark the compiled kernel lane against the NumPy fallback.

Per-kernel micro-benchmarks run both implementations in-process; the
end-to-end multi-height reconstruction runs in subprocesses so each lane is
selected at import (HOLOFORGE_NO_EXT=1 forces the fallback).

Usage: python benchmarks/bench_kernels.py [--size 256] [--repeats 5]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from holoforge import _kernels_np, kernels


def timeit(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def bench_kernels(size, repeats):
    rng = np.random.default_rng(0)
    u = (rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
    target = np.abs(rng.normal(size=(size, size))).astype(np.float64)
    img = rng.normal(size=(size * 3, size * 3)).astype(np.float64)
    frame = rng.normal(size=(size, size)).astype(np.float64)

    cases = {
        "transfer_function": lambda impl: impl.transfer_function(
            size, size, 1.12, 0.53, 300.0),
        "amplitude_update": lambda impl: impl.amplitude_update(u.copy(), target),
        "rms_amplitude_mismatch": lambda impl: impl.rms_amplitude_mismatch(u, target),
        "magnitude_differential": lambda impl: impl.magnitude_differential(u, u * 1.01),
        "block_mean(k=3)": lambda impl: impl.block_mean(img, 3),
        "psr_accumulate": lambda impl: impl.psr_accumulate(
            np.zeros((size * 3, size * 3)), np.zeros((size * 3, size * 3)),
            frame, 1, 2, 3),
    }
    print(f"\nper-kernel ({size}x{size}, best of {repeats}):")
    print(f"{'kernel':<24} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, call in cases.items():
        t_np, _ = timeit(lambda: call(_kernels_np), repeats)
        if kernels.BACKEND == "compiled":
            from holoforge import _kernels
            t_ext, _ = timeit(lambda: call(_kernels), repeats)
            print(f"{name:<24} {t_np * 1e3:>8.2f}ms {t_ext * 1e3:>8.2f}ms "
                  f"{t_np / t_ext:>7.1f}x")
        else:
            print(f"{name:<24} {t_np * 1e3:>8.2f}ms {'-':>10} {'-':>8}")


PIPELINE_SNIPPET = """
import time
import numpy as np
from holoforge import (OpticalConfig, make_phantom, multiheight_recover,
                       default_heights, synthesize_stack)
from holoforge.kernels import BACKEND

size = {size}
cfg = OpticalConfig(0.53, 300.0)
phantom = make_phantom("cells", size, 1.12, seed=7, target_scattering=0.30)
stack = synthesize_stack(phantom, default_heights(300.0), cfg)
t0 = time.perf_counter()
result = multiheight_recover(stack, iterations=50, z2_um=300.0, min_improvement=0.0)
print(f"  {{BACKEND:>8}} lane: {{time.perf_counter() - t0:6.2f}}s "
      f"(residual {{result.per_iteration_residual[-1]:.2e}})")
"""


def bench_pipeline(size):
    print(f"\nend-to-end multi-height recovery (8 planes, 50 iterations, {size}^2):",
          flush=True)
    snippet = PIPELINE_SNIPPET.format(size=size)
    for env_extra in ({}, {"HOLOFORGE_NO_EXT": "1"}):
        env = dict(os.environ, **env_extra)
        subprocess.run([sys.executable, "-c", snippet], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--skip-pipeline", action="store_true")
    args = parser.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    bench_kernels(args.size, args.repeats)
    if not args.skip_pipeline:
        bench_pipeline(args.size)


if __name__ == "__main__":
    main()
