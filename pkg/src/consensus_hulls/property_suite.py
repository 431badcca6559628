"""Reusable property checks for hull builders.

The hull kinds shipped here are spot-checked, not proved: these suites
draw seeded random point sets and verify the containment, idempotence and
monotonicity properties every compliant hull map must satisfy, plus the
nonempty-relative-interior and boundary-count consequences. They take a
generic builder so a candidate map can be screened the same way; the
smallest enclosing ball is included as the canonical non-example (it
violates monotonicity on a triangle versus its shortest edge).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry
from .geometry import PointSet
from .hulls import Hull, HullSpec, WarpedSpec, build_hull, hull_subset


def random_point_set(rng: np.random.Generator, max_points: int = 10,
                     box: float = 5.0) -> np.ndarray:
    """Random planar set; occasionally a singleton, collinear, or duplicated."""
    style = rng.random()
    if style < 0.1:
        return rng.uniform(-box, box, size=(1, 2))
    m = int(rng.integers(2, max_points + 1))
    pts = rng.uniform(-box, box, size=(m, 2))
    if style < 0.25:
        # collapse onto a random line
        direction = rng.normal(size=2)
        direction /= np.linalg.norm(direction)
        origin = pts[0].copy()
        ts = (pts - origin) @ direction
        pts = origin + ts[:, None] * direction[None, :]
    elif style < 0.35 and m >= 3:
        pts[-1] = pts[0]  # exact duplicate
    return pts


@dataclass
class SuiteReport:
    instances: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_inclusion(spec: HullSpec, pts: np.ndarray) -> list[str]:
    """Source points lie in the hull; a singleton source gives a singleton hull."""
    problems = []
    hull = build_hull(spec, pts)
    for x in hull.source.points:
        if not hull.contains(x, 1e-9):
            problems.append(f"source point {x.tolist()} escapes its hull")
    if hull.source.is_singleton():
        if not hull.is_singleton:
            problems.append("singleton source built a non-singleton hull")
        ref = hull.interior_reference()
        if np.linalg.norm(ref - hull.source.points[0]) > 1e-9:
            problems.append("singleton hull is not the source point")
    return problems


def check_idempotence(spec: HullSpec, pts: np.ndarray, tol: float = 1e-6,
                      per_edge: int = 16) -> list[str]:
    """Rebuilding from a dense boundary sampling reproduces the hull.

    Compared as Hausdorff distance between the convex cores, which for
    warped kinds means the comparison happens in warp coordinates.
    """
    hull = build_hull(spec, pts)
    samples = hull.boundary_points(per_edge=per_edge, world=True)
    rebuilt = build_hull(spec, samples)
    d = _core_hausdorff(hull, rebuilt)
    if d > tol:
        return [f"rebuild from boundary sampling moved the hull by {d:.3g}"]
    return []


def _core_hausdorff(a: Hull, b: Hull) -> float:
    from .hulls import BoxCore, _core_vertices

    if isinstance(a.core, BoxCore) or isinstance(b.core, BoxCore):
        va, vb = _core_vertices(a.core), _core_vertices(b.core)
        d_ab = max(b.core.distance(v) for v in va)
        d_ba = max(a.core.distance(v) for v in vb)
        return max(d_ab, d_ba)
    return geometry.hausdorff_distance(a.core, b.core)


def check_monotonicity(spec: HullSpec, pts: np.ndarray,
                       rng: np.random.Generator, tol: float = 1e-9) -> list[str]:
    """A hull of a subset is contained in the hull of the whole set."""
    if pts.shape[0] < 2:
        return []
    m = pts.shape[0]
    size = int(rng.integers(1, m))
    idx = rng.choice(m, size=size, replace=False)
    sub = pts[idx]
    inner = build_hull(spec, sub)
    outer = build_hull(spec, pts)
    if not hull_subset(inner, outer, tol):
        return [f"hull of subset {idx.tolist()} is not contained in the full hull"]
    return []


def check_interior_and_boundary(spec: HullSpec, pts: np.ndarray) -> list[str]:
    """Non-singleton sources: nonempty relative interior, positive diameter,
    and at least two source points on the relative boundary."""
    hull = build_hull(spec, pts)
    if hull.source.is_singleton():
        return []
    problems = []
    ref = hull.interior_reference()
    if not hull.in_relative_interior(ref, 0.0):
        problems.append("core centroid is not in the relative interior")
    # coarse sampling is enough here: any sampled path length already
    # bounds the diameter from below, so positivity is certified
    if not hull.geodesic_diameter(4, 16) > 0.0:
        problems.append("non-singleton hull has zero diameter")
    on_boundary = sum(
        1 for x in hull.source.points if not hull.in_relative_interior(x, 1e-9)
    )
    if on_boundary < 2:
        problems.append(f"only {on_boundary} source points on the relative boundary")
    return problems


def run_assumption_suite(spec: HullSpec, instances: int = 500, seed: int = 0,
                         idempotence: bool = True,
                         interior_instances: int | None = None) -> SuiteReport:
    """Run the full battery on seeded random instances."""
    rng = np.random.default_rng(seed)
    report = SuiteReport()
    interior_budget = interior_instances if interior_instances is not None else instances
    for i in range(instances):
        pts = random_point_set(rng)
        for problem in check_inclusion(spec, pts):
            report.failures.append(f"[{i}] inclusion: {problem}")
        if idempotence:
            for problem in check_idempotence(spec, pts):
                report.failures.append(f"[{i}] idempotence: {problem}")
        for problem in check_monotonicity(spec, pts, rng):
            report.failures.append(f"[{i}] monotonicity: {problem}")
        if i < interior_budget:
            for problem in check_interior_and_boundary(spec, pts):
                report.failures.append(f"[{i}] interior/boundary: {problem}")
        report.instances += 1
    return report


# ---------------------------------------------------------------------------
# the non-example: smallest enclosing ball
# ---------------------------------------------------------------------------


def enclosing_ball(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball (Welzl's algorithm, planar)."""
    pts = geometry.as_point_array(pts)

    def ball_from(boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
        if not boundary:
            return np.zeros(2), 0.0
        if len(boundary) == 1:
            return boundary[0], 0.0
        if len(boundary) == 2:
            c = 0.5 * (boundary[0] + boundary[1])
            return c, float(np.linalg.norm(boundary[0] - c))
        a, b, c = boundary
        ab, ac = b - a, c - a
        d = 2.0 * (ab[0] * ac[1] - ab[1] * ac[0])
        if abs(d) < 1e-15:
            # collinear support: fall back to the widest pair
            pairs = [(a, b), (a, c), (b, c)]
            far = max(pairs, key=lambda pq: np.linalg.norm(pq[0] - pq[1]))
            center = 0.5 * (far[0] + far[1])
            return center, float(np.linalg.norm(far[0] - center))
        ux = (ac[1] * (ab @ ab) - ab[1] * (ac @ ac)) / d
        uy = (ab[0] * (ac @ ac) - ac[0] * (ab @ ab)) / d
        center = a + np.array([ux, uy])
        return center, float(np.linalg.norm(center - a))

    def welzl(points: list[np.ndarray], boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
        if not points or len(boundary) == 3:
            return ball_from(boundary)
        p = points[0]
        center, radius = welzl(points[1:], boundary)
        if np.linalg.norm(p - center) <= radius + 1e-12:
            return center, radius
        return welzl(points[1:], boundary + [p])

    rng = np.random.default_rng(12345)
    order = [pts[i] for i in rng.permutation(pts.shape[0])]
    return welzl(order, [])


def ball_subset(inner: tuple[np.ndarray, float], outer: tuple[np.ndarray, float],
                tol: float = 1e-9) -> bool:
    (ci, ri), (co, ro) = inner, outer
    return float(np.linalg.norm(ci - co)) + ri <= ro + tol


def ball_monotonicity_violations(pts: np.ndarray) -> list[str]:
    """Check subset monotonicity of the enclosing ball on all point pairs."""
    problems = []
    outer = enclosing_ball(pts)
    m = pts.shape[0]
    for i in range(m):
        for j in range(i + 1, m):
            inner = enclosing_ball(pts[[i, j]])
            if not ball_subset(inner, outer):
                problems.append(
                    f"ball of pair ({i}, {j}) is not inside the ball of the full set"
                )
    return problems


def monotonicity_witness_triangle() -> np.ndarray:
    """Acute scalene triangle; its shortest edge's ball escapes the triangle's ball."""
    return np.array([[0.0, 0.0], [1.0, 0.0], [0.4, 0.9]])
