"""Benchmark the jit kernels against the pure-numpy fallback.

Run as ``python -m consensus_hulls.bench``. Times both code paths of every
hot kernel on representative workloads regardless of the
``CONSENSUS_HULLS_DISABLE_JIT`` setting (the jit column is skipped when
numba is unavailable or disabled). Jit timings exclude the first call so
compilation is not counted.
"""
from __future__ import annotations

import time

import numpy as np

from . import _kernels as K


def _time(fn, *args, repeats: int = 5) -> float:
    fn(*args)  # warm-up / compile
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run(report=print) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(0)
    pts = rng.uniform(-5, 5, size=(600, 2))
    poly = np.array([[0.0, 0.0], [4.0, 0.0], [5.0, 3.0], [2.0, 5.0], [-1.0, 2.0]])
    edges = np.roll(poly, -1, axis=0) - poly
    normals = np.stack((edges[:, 1], -edges[:, 0]), axis=1)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = (normals * poly).sum(axis=1)
    queries = rng.uniform(-3, 7, size=(5000, 2))
    samples = rng.uniform(-5, 5, size=(160, 2))

    cases = [
        ("pairwise_max_dist (600 pts)",
         lambda: K._pairwise_max_dist_loops(pts),
         lambda: K._pairwise_max_dist_np(pts)),
        ("pullback_max (160 samples x 128 path)",
         lambda: K._pullback_max_loops(samples, 0.04, 128),
         lambda: K._pullback_max_np(samples, 0.04, 128)),
        ("polygon_distance (5000 queries)",
         lambda: K._polygon_distance_loops(
             poly, np.ascontiguousarray(normals[:, 0]),
             np.ascontiguousarray(normals[:, 1]), offsets, queries),
         lambda: K._polygon_distance_np(
             poly, normals[:, 0], normals[:, 1], offsets, queries)),
        ("polygon_margin (5000 queries)",
         lambda: K._polygon_margin_loops(
             np.ascontiguousarray(normals[:, 0]),
             np.ascontiguousarray(normals[:, 1]), offsets, queries),
         lambda: K._polygon_margin_np(normals[:, 0], normals[:, 1], offsets, queries)),
    ]

    rows = []
    report(f"jit enabled: {K.JIT_ENABLED}")
    report(f"{'kernel':<42} {'jit [ms]':>10} {'numpy [ms]':>11} {'speedup':>8}")
    for name, jit_fn, np_fn in cases:
        t_np = _time(np_fn) * 1e3
        if K.JIT_ENABLED:
            t_jit = _time(jit_fn) * 1e3
            report(f"{name:<42} {t_jit:10.3f} {t_np:11.3f} {t_np / t_jit:8.1f}x")
        else:
            t_jit = float("nan")
            report(f"{name:<42} {'-':>10} {t_np:11.3f} {'-':>8}")
        rows.append((name, t_jit, t_np))
    return rows


if __name__ == "__main__":  # pragma: no cover
    run()
