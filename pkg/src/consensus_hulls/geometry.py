"""Planar convex geometry primitives used by every hull kind.

Everything here is a pure function of immutable values (point arrays are
marked read-only on construction), so concurrent use is safe. The fully
supported dimension for polygon geometry is 2; degenerate inputs come out
as dimension 0 or 1 polytopes instead of raising.

Tolerances: point sets deduplicate within ``DEDUP_TOL`` and membership
queries default to the same ``DEFAULT_TOL = 1e-9``. Queries against a
lower-dimensional polytope accept points within ``AFFINE_SLACK`` of its
affine hull.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEDUP_TOL = 1e-9
DEFAULT_TOL = 1e-9
AFFINE_SLACK = 1e-9


def as_point(x) -> np.ndarray:
    pt = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.isfinite(pt).all():
        raise ValueError("point has non-finite coordinates")
    return pt


def as_point_array(pts) -> np.ndarray:
    arr = np.asarray(pts, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("expected a nonempty (m, p) point array")
    if not np.isfinite(arr).all():
        raise ValueError("points have non-finite coordinates")
    return arr


def dedup_points(arr: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Drop points within ``tol`` of an earlier point, keeping first occurrences."""
    arr = as_point_array(arr)
    out = np.empty_like(arr)
    k = 0
    t2 = tol * tol
    for row in arr:
        if k == 0 or ((out[:k] - row) ** 2).sum(axis=1).min() > t2:
            out[k] = row
            k += 1
    return out[:k].copy()


class PointSet:
    """Finite multiset of positions, deduplicated within ``tol``."""

    __slots__ = ("points",)

    def __init__(self, pts, tol: float = DEDUP_TOL):
        pts = dedup_points(as_point_array(pts), tol)
        pts.setflags(write=False)
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def is_singleton(self) -> bool:
        return len(self) == 1

    def __repr__(self) -> str:  # pragma: no cover
        return f"PointSet({self.points.tolist()})"


@dataclass(frozen=True)
class Polytope:
    """Convex polytope given by its vertices.

    ``dim`` is the affine dimension: 2 for a polygon (vertices in strictly
    counterclockwise convex position), 1 for a segment (two endpoints),
    0 for a single point.
    """

    dim: int
    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: PointSet | np.ndarray) -> Polytope:
    """Monotone-chain convex hull; collinear and single inputs degrade gracefully.

    Only exact duplicate points are dropped internally, and orientation
    tests run on centered coordinates with a threshold relative to the
    point spread, so hulls of tightly clustered sets keep their (tiny)
    extent instead of collapsing. Vertices are input points, bit-exact.
    """
    pts = points.points if isinstance(points, PointSet) else as_point_array(points)
    if pts.shape[1] != 2:
        raise ValueError("convex_hull supports planar point sets only")
    spts = np.unique(pts, axis=0)  # lexicographically sorted, exact dedup
    m = spts.shape[0]
    if m == 1:
        return Polytope(0, spts[:1])
    centered = spts - spts.mean(axis=0)
    extent = float(np.ptp(spts, axis=0).max())
    eps = 1e-12 * extent * extent

    def build(idx_seq):
        chain: list[int] = []
        for i in idx_seq:
            while len(chain) >= 2 and _cross(
                centered[chain[-2]], centered[chain[-1]], centered[i]
            ) <= eps:
                chain.pop()
            chain.append(i)
        return chain

    lower = build(range(m))
    upper = build(range(m - 1, -1, -1))
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2:
        # collinear: endpoints are the lexicographic extremes
        return Polytope(1, np.array([spts[0], spts[-1]]))
    return Polytope(2, spts[hull])


def _edge_planes(poly: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normals and offsets (n . x <= b) of a dim-2 polytope."""
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    n = np.stack((e[:, 1], -e[:, 0]), axis=1)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    b = (n * v).sum(axis=1)
    return n, b


def polytope_distance(poly: Polytope, x: np.ndarray) -> float:
    """Euclidean distance from x to the polytope (0 when inside)."""
    x = as_point(x)
    if poly.dim == 0:
        return float(np.linalg.norm(x - poly.vertices[0]))
    if poly.dim == 1:
        return _segment_distance(poly.vertices[0], poly.vertices[1], x)
    n, b = _edge_planes(poly)
    return float(_kernels.polygon_distance(poly.vertices, n, b, x.reshape(1, 2))[0])


def _segment_distance(a, b, x) -> float:
    e = b - a
    ee = float(e @ e)
    t = float((x - a) @ e) / ee if ee > 0.0 else 0.0
    t = min(max(t, 0.0), 1.0)
    return float(np.linalg.norm(x - (a + t * e)))


def contains(poly: Polytope, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff x is within Euclidean distance ``tol`` of the polytope."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return polytope_distance(poly, x) <= tol


def rb_margin(poly: Polytope, x: np.ndarray) -> float:
    """Distance from x to the relative boundary, measured inside the affine hull.

    Positive inside the relative interior, negative outside. Points farther
    than ``AFFINE_SLACK`` from the affine hull of a degenerate polytope get
    ``-inf``; a dim-0 polytope always gets ``-inf`` (its relative interior
    is empty).
    """
    x = as_point(x)
    if poly.dim == 0:
        return -np.inf
    if poly.dim == 1:
        a, b = poly.vertices
        e = b - a
        length = float(np.linalg.norm(e))
        u = e / length
        t = float((x - a) @ u)
        perp = float(np.linalg.norm(x - a - t * u))
        if perp > AFFINE_SLACK:
            return -np.inf
        return min(t, length - t)
    n, b = _edge_planes(poly)
    return float(_kernels.polygon_margin(n, b, x.reshape(1, 2))[0])


def ri_contains(poly: Polytope, x: np.ndarray, tol: float = 0.0) -> bool:
    """Relative-interior membership with margin ``tol`` from the relative boundary.

    Always false for dim-0 polytopes: the relative interior of a singleton
    is empty.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if poly.dim == 0:
        return False
    return rb_margin(poly, x) > tol


def ray_exit_scale(poly: Polytope, origin: np.ndarray, direction: np.ndarray) -> float:
    """Largest t >= 0 with origin + t * direction still inside the polytope.

    Assumes the origin lies in (or numerically on) the polytope. Returns 0
    when the ray leaves immediately, e.g. a direction off a degenerate
    polytope's affine hull.
    """
    origin = as_point(origin)
    d = as_point(direction)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        return 0.0
    if poly.dim == 0:
        return 0.0
    if poly.dim == 1:
        a, b = poly.vertices
        e = b - a
        length = float(np.linalg.norm(e))
        u = e / length
        perp = d - (d @ u) * u
        if float(np.linalg.norm(perp)) > 1e-9 * nd:
            return 0.0
        along = float(d @ u)
        t0 = float((origin - a) @ u)
        if along > 0:
            return max((length - t0) / along, 0.0)
        if along < 0:
            return max(t0 / -along, 0.0)
        return 0.0
    n, b = _edge_planes(poly)
    nd_dot = n @ d
    gaps = b - n @ origin
    t_best = np.inf
    for i in range(n.shape[0]):
        # near-parallel edges are skipped well above float noise, else the
        # gap/dot ratio of an on-edge origin is garbage
        if nd_dot[i] > 1e-12 * nd:
            t_best = min(t_best, gaps[i] / nd_dot[i])
    return max(float(t_best), 0.0)


def boundary_samples(poly: Polytope, per_edge: int = 16) -> np.ndarray:
    """Vertices plus ``per_edge - 1`` interior samples along each edge/segment."""
    v = poly.vertices
    if poly.dim == 0:
        return v.copy()
    if poly.dim == 1:
        ts = np.linspace(0.0, 1.0, per_edge + 1)[:, None]
        return v[0] * (1 - ts) + v[1] * ts
    out = [v]
    nxt = np.roll(v, -1, axis=0)
    ts = np.arange(1, per_edge)[:, None] / per_edge
    for i in range(v.shape[0]):
        out.append(v[i] * (1 - ts) + nxt[i] * ts)
    return np.concatenate(out, axis=0)


def euclidean_diameter(points: PointSet | np.ndarray) -> float:
    """Maximum pairwise Euclidean distance."""
    pts = points.points if isinstance(points, PointSet) else as_point_array(points)
    return _kernels.pairwise_max_dist(pts)


def affine_dim(points: PointSet | np.ndarray) -> int:
    """Affine dimension of a point set in {0, ..., p}."""
    pts = points.points if isinstance(points, PointSet) else as_point_array(points)
    if pts.shape[0] == 1:
        return 0
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    return int((s > 1e-9 * max(1.0, s[0])).sum())


def vertex_centroid(poly: Polytope) -> np.ndarray:
    """Mean of the vertices; inside the relative interior unless dim 0."""
    return poly.vertices.mean(axis=0)


def _clip_segment(a: np.ndarray, b: np.ndarray, normals, offsets,
                  eps: float) -> np.ndarray | None:
    """Clip segment a->b against half-planes n.x <= off; None when empty."""
    t0, t1 = 0.0, 1.0
    d = b - a
    for n, off in zip(normals, offsets):
        num = off - float(n @ a)
        den = float(n @ d)
        if abs(den) < 1e-15:
            if num < -eps:
                return None
            continue
        t = num / den
        if den > 0:
            t1 = min(t1, t)
        else:
            t0 = max(t0, t)
        if t0 > t1 + 1e-12:
            return None
    return np.array([a + t0 * d, a + t1 * d])


def _halfplanes(poly: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Half-plane description n.x <= b covering also degenerate polytopes."""
    if poly.dim == 2:
        return _edge_planes(poly)
    if poly.dim == 1:
        a, b = poly.vertices
        u = (b - a) / np.linalg.norm(b - a)
        n_perp = np.array([u[1], -u[0]])
        normals = np.array([n_perp, -n_perp, u, -u])
        offsets = np.array([n_perp @ a, -(n_perp @ a), u @ b, -(u @ a)])
        return normals, offsets
    v = poly.vertices[0]
    normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    offsets = np.array([v[0], -v[0], v[1], -v[1]])
    return normals, offsets


def intersect_polytopes(a: Polytope, b: Polytope) -> Polytope:
    """Exact intersection of two planar convex polytopes.

    Raises ValueError when the intersection is empty; callers in this
    package always intersect hulls of a shared source set, which cannot
    be empty.
    """
    scale = max(
        1.0,
        float(np.abs(a.vertices).max()) if a.vertices.size else 0.0,
        float(np.abs(b.vertices).max()) if b.vertices.size else 0.0,
    )
    eps = 1e-12 * scale
    if a.dim == 0:
        if contains(b, a.vertices[0], 1e-9):
            return a
        raise ValueError("intersection is empty")
    if b.dim == 0:
        return intersect_polytopes(b, a)
    if a.dim == 1 or b.dim == 1:
        seg, other = (a, b) if a.dim == 1 else (b, a)
        normals, offsets = _halfplanes(other)
        clipped = _clip_segment(seg.vertices[0], seg.vertices[1], normals, offsets, eps)
        if clipped is None:
            raise ValueError("intersection is empty")
        return convex_hull(PointSet(clipped))
    # Sutherland-Hodgman, clipping a by the half-planes of b
    normals, offsets = _edge_planes(b)
    subject = list(a.vertices)
    for n, off in zip(normals, offsets):
        if not subject:
            break
        clipped = []
        prev = subject[-1]
        prev_m = off - float(n @ prev)
        for cur in subject:
            cur_m = off - float(n @ cur)
            if prev_m >= -eps and cur_m >= -eps:
                clipped.append(cur)
            elif prev_m >= -eps and cur_m < -eps:
                t = prev_m / (prev_m - cur_m)
                clipped.append(prev + t * (cur - prev))
            elif prev_m < -eps and cur_m >= -eps:
                t = prev_m / (prev_m - cur_m)
                clipped.append(prev + t * (cur - prev))
                clipped.append(cur)
            prev, prev_m = cur, cur_m
        subject = clipped
    if not subject:
        raise ValueError("intersection is empty")
    return convex_hull(PointSet(np.array(subject)))


def hausdorff_distance(a: Polytope, b: Polytope) -> float:
    """Hausdorff distance between two convex polytopes (exact via vertices)."""
    d_ab = max(polytope_distance(b, v) for v in a.vertices)
    d_ba = max(polytope_distance(a, v) for v in b.vertices)
    return max(d_ab, d_ba)
