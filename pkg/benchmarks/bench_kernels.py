#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot query paths on synthetic data sized like a dense store
region: polygon membership over cell centers and the nearest-cell scan.

Usage: python3 benchmarks/bench_kernels.py [--cells 200000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from terratrace import kernels


def time_best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=200_000,
                        help="number of synthetic cell centers")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(12345)
    clats = rng.uniform(34.875, 37.25, args.cells)
    clons = rng.uniform(-124.5, -119.3, args.cells)

    # a 12-vertex query polygon in the middle of the block
    angles = np.sort(rng.uniform(0, 2 * np.pi, 12))
    radii = rng.uniform(0.3, 1.0, 12)
    vlats = 36.0 + radii * np.sin(angles)
    vlons = -121.5 + radii * np.cos(angles)

    queries = list(zip(rng.uniform(35, 37, 50), rng.uniform(-123, -120, 50)))

    print(f"cells: {args.cells:,}   active backend: {kernels.BACKEND}")
    print(f"{'kernel':<22} {'backend':<8} {'best time':>12}")
    results: dict[tuple[str, str], float] = {}
    for name in kernels.available_backends():
        mod = kernels.backend_module(name)
        t = time_best(lambda: mod.points_in_polygon(clats, clons, vlats, vlons),
                      args.repeats)
        results[("points_in_polygon", name)] = t
        print(f"{'points_in_polygon':<22} {name:<8} {t * 1e3:>10.2f} ms")
    for name in kernels.available_backends():
        mod = kernels.backend_module(name)

        def run_nearest(m=mod):
            for lat, lon in queries:
                m.nearest_index(float(lat), float(lon), clats, clons)

        t = time_best(run_nearest, args.repeats)
        results[("nearest_index x50", name)] = t
        print(f"{'nearest_index x50':<22} {name:<8} {t * 1e3:>10.2f} ms")

    if {"c", "python"} <= set(kernels.available_backends()):
        for kernel in ("points_in_polygon", "nearest_index x50"):
            speedup = results[(kernel, "python")] / results[(kernel, "c")]
            print(f"{kernel}: compiled is {speedup:.1f}x the numpy fallback")


if __name__ == "__main__":
    main()
