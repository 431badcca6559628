"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The fallback is selected by setting the environment variable
``CONSENSUS_HULLS_DISABLE_JIT`` to a truthy value (or automatically when
numba is not importable). Both paths compute the same quantities; they may
differ in the last couple of bits because of summation order, which is why
callers never rely on bit-identical kernel output. Run
``python -m consensus_hulls.bench`` to compare the two paths.
"""
from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "CONSENSUS_HULLS_DISABLE_JIT"

_disabled = os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError("jit disabled by environment flag")
    from numba import njit

    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False

    def njit(*args, **kwargs):
        # passthrough decorator so the loop variants stay importable for the bench
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# ---------------------------------------------------------------------------
# loop variants (compiled under numba)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _pairwise_max_dist_loops(pts):
    m = pts.shape[0]
    best = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            d2 = 0.0
            for c in range(pts.shape[1]):
                diff = pts[i, c] - pts[j, c]
                d2 += diff * diff
            if d2 > best:
                best = d2
    return np.sqrt(best)


@njit(cache=True)
def _swirl_inverse_point(ux, uy, rate):
    r2 = ux * ux + uy * uy
    theta = rate * r2
    c = np.cos(theta)
    s = np.sin(theta)
    return c * ux - s * uy, s * ux + c * uy


@njit(cache=True)
def _pullback_length_loops(u0x, u0y, u1x, u1y, rate, n_path):
    # polyline length of the inverse-image of the straight segment u0 -> u1
    px, py = _swirl_inverse_point(u0x, u0y, rate)
    total = 0.0
    for i in range(1, n_path + 1):
        lam = i / n_path
        ux = u0x + lam * (u1x - u0x)
        uy = u0y + lam * (u1y - u0y)
        qx, qy = _swirl_inverse_point(ux, uy, rate)
        dx = qx - px
        dy = qy - py
        total += np.sqrt(dx * dx + dy * dy)
        px, py = qx, qy
    return total


@njit(cache=True)
def _pullback_max_loops(samples, rate, n_path):
    m = samples.shape[0]
    best = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            length = _pullback_length_loops(
                samples[i, 0], samples[i, 1], samples[j, 0], samples[j, 1], rate, n_path
            )
            if length > best:
                best = length
    return best


@njit(cache=True)
def _polygon_distance_loops(verts, nx, ny, off, queries):
    # verts CCW, (nx, ny, off) the outward unit edge normals with n.v <= off
    q = queries.shape[0]
    m = verts.shape[0]
    out = np.empty(q)
    for a in range(q):
        x = queries[a, 0]
        y = queries[a, 1]
        inside = True
        for e in range(m):
            if nx[e] * x + ny[e] * y - off[e] > 0.0:
                inside = False
                break
        if inside:
            out[a] = 0.0
            continue
        best = np.inf
        for e in range(m):
            x0 = verts[e, 0]
            y0 = verts[e, 1]
            x1 = verts[(e + 1) % m, 0]
            y1 = verts[(e + 1) % m, 1]
            ex = x1 - x0
            ey = y1 - y0
            ee = ex * ex + ey * ey
            if ee > 0.0:
                t = ((x - x0) * ex + (y - y0) * ey) / ee
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            dx = x - (x0 + t * ex)
            dy = y - (y0 + t * ey)
            d = np.sqrt(dx * dx + dy * dy)
            if d < best:
                best = d
        out[a] = best
    return out


@njit(cache=True)
def _polygon_margin_loops(nx, ny, off, queries):
    q = queries.shape[0]
    m = nx.shape[0]
    out = np.empty(q)
    for a in range(q):
        best = np.inf
        for e in range(m):
            s = off[e] - (nx[e] * queries[a, 0] + ny[e] * queries[a, 1])
            if s < best:
                best = s
        out[a] = best
    return out


# ---------------------------------------------------------------------------
# numpy variants
# ---------------------------------------------------------------------------


def _pairwise_max_dist_np(pts):
    if pts.shape[0] < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=2).max()))


def _pullback_length_np(u0x, u0y, u1x, u1y, rate, n_path):
    lam = np.linspace(0.0, 1.0, n_path + 1)
    ux = u0x + lam * (u1x - u0x)
    uy = u0y + lam * (u1y - u0y)
    theta = rate * (ux * ux + uy * uy)
    c = np.cos(theta)
    s = np.sin(theta)
    qx = c * ux - s * uy
    qy = s * ux + c * uy
    return float(np.sqrt(np.diff(qx) ** 2 + np.diff(qy) ** 2).sum())


def _pullback_max_np(samples, rate, n_path, chunk=2048):
    m = samples.shape[0]
    if m < 2:
        return 0.0
    ii, jj = np.triu_indices(m, k=1)
    lam = np.linspace(0.0, 1.0, n_path + 1)[None, :, None]
    best = 0.0
    for lo in range(0, ii.shape[0], chunk):
        hi = min(lo + chunk, ii.shape[0])
        u0 = samples[ii[lo:hi], None, :]
        u1 = samples[jj[lo:hi], None, :]
        pts = u0 * (1.0 - lam) + u1 * lam
        theta = rate * (pts * pts).sum(axis=2)
        c = np.cos(theta)
        s = np.sin(theta)
        qx = c * pts[:, :, 0] - s * pts[:, :, 1]
        qy = s * pts[:, :, 0] + c * pts[:, :, 1]
        lengths = np.sqrt(np.diff(qx, axis=1) ** 2 + np.diff(qy, axis=1) ** 2).sum(axis=1)
        block_best = lengths.max()
        if block_best > best:
            best = float(block_best)
    return best


def _polygon_distance_np(verts, nx, ny, off, queries):
    margins = off[None, :] - (queries[:, 0:1] * nx[None, :] + queries[:, 1:2] * ny[None, :])
    inside = margins.min(axis=1) >= 0.0
    out = np.zeros(queries.shape[0])
    if inside.all():
        return out
    qs = queries[~inside]
    a = verts
    b = np.roll(verts, -1, axis=0)
    e = b - a
    ee = (e * e).sum(axis=1)
    ee = np.where(ee > 0.0, ee, 1.0)
    rel = qs[:, None, :] - a[None, :, :]
    t = np.clip((rel * e[None, :, :]).sum(axis=2) / ee[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * e[None, :, :]
    d = np.sqrt(((qs[:, None, :] - proj) ** 2).sum(axis=2)).min(axis=1)
    out[~inside] = d
    return out


def _polygon_margin_np(nx, ny, off, queries):
    margins = off[None, :] - (queries[:, 0:1] * nx[None, :] + queries[:, 1:2] * ny[None, :])
    return margins.min(axis=1)


# ---------------------------------------------------------------------------
# public surface: one name per kernel, path picked at import time
# ---------------------------------------------------------------------------


def pairwise_max_dist(pts: np.ndarray) -> float:
    """Max pairwise Euclidean distance of an (m, p) point array."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if pts.shape[0] < 2:
        return 0.0
    if JIT_ENABLED:
        return float(_pairwise_max_dist_loops(pts))
    return _pairwise_max_dist_np(pts)


def pullback_length(u0: np.ndarray, u1: np.ndarray, rate: float, n_path: int) -> float:
    """Polyline length of the swirl-inverse image of the segment u0 -> u1."""
    if JIT_ENABLED:
        return float(
            _pullback_length_loops(
                float(u0[0]), float(u0[1]), float(u1[0]), float(u1[1]), rate, n_path
            )
        )
    return _pullback_length_np(float(u0[0]), float(u0[1]), float(u1[0]), float(u1[1]), rate, n_path)


def pullback_max(samples: np.ndarray, rate: float, n_path: int) -> float:
    """Max pullback polyline length over all sample pairs."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    if JIT_ENABLED:
        return float(_pullback_max_loops(samples, rate, n_path))
    return _pullback_max_np(samples, rate, n_path)


def polygon_distance(verts: np.ndarray, normals: np.ndarray, offsets: np.ndarray,
                     queries: np.ndarray) -> np.ndarray:
    """Euclidean distance from each query to a CCW convex polygon (0 inside)."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    nx = np.ascontiguousarray(normals[:, 0])
    ny = np.ascontiguousarray(normals[:, 1])
    off = np.ascontiguousarray(offsets)
    if JIT_ENABLED:
        return _polygon_distance_loops(verts, nx, ny, off, queries)
    return _polygon_distance_np(verts, nx, ny, off, queries)


def polygon_margin(normals: np.ndarray, offsets: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Signed inward margin of each query w.r.t. the polygon's edges."""
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    nx = np.ascontiguousarray(normals[:, 0])
    ny = np.ascontiguousarray(normals[:, 1])
    off = np.ascontiguousarray(offsets)
    if JIT_ENABLED:
        return _polygon_margin_loops(nx, ny, off, queries)
    return _polygon_margin_np(nx, ny, off, queries)
