"""Benchmark: compiled spatial-hash core vs the pure-Python fallback.

The placement loop spends nearly all of its time in any_overlap, so this
micro-benchmark tracks the numbers that matter for rule application:
insert throughput, overlap queries against a populated grid, and one
end-to-end collision-checked fill.

Run:  python3 benchmarks/bench_collision.py [--spheres N] [--queries N]
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from mesochat.engine import Ingredient, RuleParams, RuleType, Scene, apply_rule, create_rule
from mesochat.geometry import Box, hash_py

try:
    from mesochat import _hash_core
except ImportError:
    _hash_core = None


def bench_core(core_module, centers, radii, queries, query_radii):
    label = core_module.IMPLEMENTATION
    grid = core_module.HashCore(2.0 * float(radii.max()))

    start = time.perf_counter()
    for i in range(len(centers)):
        grid.insert(i, float(centers[i, 0]), float(centers[i, 1]),
                    float(centers[i, 2]), float(radii[i]))
    insert_s = time.perf_counter() - start

    start = time.perf_counter()
    hits = 0
    for i in range(len(queries)):
        if grid.any_overlap(float(queries[i, 0]), float(queries[i, 1]),
                            float(queries[i, 2]), float(query_radii[i])):
            hits += 1
    query_s = time.perf_counter() - start
    return label, insert_s, query_s, hits


def bench_fill(elements: int) -> float:
    scene = Scene(seed=42)
    scene.register_ingredient(Ingredient(name="probe", bounding_radius=2.0))
    scene.register_skeleton(Box(name="box", extents=[120, 120, 120]))
    rule = create_rule(scene, RuleType.FILL, ["probe"], "box",
                       params=RuleParams(elements=elements, collision_detection=True))
    start = time.perf_counter()
    apply_rule(scene, rule.id)
    return time.perf_counter() - start


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--spheres", type=int, default=20_000)
    parser.add_argument("--queries", type=int, default=50_000)
    parser.add_argument("--fill-elements", type=int, default=2_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    centers = rng.uniform(-60, 60, size=(args.spheres, 3))
    radii = rng.uniform(0.3, 2.0, size=args.spheres)
    queries = rng.uniform(-62, 62, size=(args.queries, 3))
    query_radii = rng.uniform(0.3, 2.0, size=args.queries)

    cores = [hash_py]
    if _hash_core is not None:
        cores.append(_hash_core)
    else:
        print("compiled core not built; benchmarking the fallback only")

    print(f"{args.spheres} spheres inserted, {args.queries} any_overlap queries\n")
    print(f"{'core':<8} {'insert':>10} {'queries':>10} {'hits':>8}")
    results = {}
    for core in cores:
        label, insert_s, query_s, hits = bench_core(
            core, centers, radii, queries, query_radii)
        results[label] = query_s
        print(f"{label:<8} {insert_s:>9.3f}s {query_s:>9.3f}s {hits:>8}")
    if len(results) == 2:
        speedup = results["python"] / results["cython"]
        print(f"\nquery speedup: {speedup:.1f}x")

    print(f"\nend-to-end fill, {args.fill_elements} elements, collision on:")
    fill_s = bench_fill(args.fill_elements)
    kernel = "python" if os.environ.get("MESOCHAT_PURE_PYTHON") else (
        "cython" if _hash_core is not None else "python")
    print(f"  {kernel}: {fill_s:.3f}s "
          f"(rerun with MESOCHAT_PURE_PYTHON=1 to compare)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
