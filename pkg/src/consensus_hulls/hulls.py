"""The hull map family: per-step decision regions and the set-valued Lyapunov machinery.

A hull spec names a set-valued map taking a finite point set S to a compact
region containing it. Five kinds are provided:

* ``ConvexSpec`` — the convex hull of S.
* ``BoxSpec`` — product of coordinate ranges in an orthonormal basis
  (componentwise hull). The only kind supported for p != 2.
* ``DirectionalSpec`` — smallest polytope containing S whose boundary is
  parallel to three fixed non-parallel lines (normals must admit a strictly
  positive combination summing to zero, which bounds the polytope).
* ``WarpedSpec`` — conjugate an inner kind through a bijective bi-Lipschitz
  warp: build the inner hull on the warped points and map back. Generally
  nonconvex in world coordinates.
* ``IntersectionSpec`` — set intersection of two identity-warp kinds,
  realized exactly as the clipped polygon.

Every built hull stores a convex core in warp space (a planar polytope, or
an interval box when p != 2); membership, relative interior, subset and
boundary queries are all answered on that core and conjugated through the
warp. Hulls are immutable after construction and safe for concurrent reads
(the cached geodesic diameter is computed idempotently).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import _kernels, geometry
from .geometry import DEDUP_TOL, PointSet, Polytope
from .warps import IDENTITY, WarpMap

EXIT_TOL = 1e-9

# unit normals at 90, 210 and 330 degrees: they sum to zero with weights (1,1,1)
DEFAULT_TRIAD = (
    (0.0, 1.0),
    (-math.sqrt(3.0) / 2.0, -0.5),
    (math.sqrt(3.0) / 2.0, -0.5),
)


@dataclass(frozen=True)
class ConvexSpec:
    kind = "convex"


@dataclass(frozen=True)
class BoxSpec:
    kind = "box"
    basis: tuple | None = None

    def __post_init__(self):
        if self.basis is not None:
            object.__setattr__(
                self, "basis", tuple(tuple(float(c) for c in row) for row in self.basis)
            )


@dataclass(frozen=True)
class DirectionalSpec:
    kind = "directional"
    normals: tuple = DEFAULT_TRIAD
    mode: str = "max"

    def __post_init__(self):
        object.__setattr__(
            self, "normals", tuple(tuple(float(c) for c in row) for row in self.normals)
        )


@dataclass(frozen=True)
class WarpedSpec:
    kind = "warped"
    inner: "HullSpec" = field(default_factory=ConvexSpec)
    warp: WarpMap = IDENTITY


@dataclass(frozen=True)
class IntersectionSpec:
    kind = "intersection"
    left: "HullSpec" = field(default_factory=ConvexSpec)
    right: "HullSpec" = field(default_factory=BoxSpec)


HullSpec = Union[ConvexSpec, BoxSpec, DirectionalSpec, WarpedSpec, IntersectionSpec]


def spec_warp(spec: HullSpec) -> WarpMap:
    return spec.warp if isinstance(spec, WarpedSpec) else IDENTITY


def validate_spec(spec: HullSpec, space_dim: int) -> list[str]:
    """Structural checks; returns a list of human-readable problems."""
    errors: list[str] = []
    if isinstance(spec, ConvexSpec):
        if space_dim != 2:
            errors.append("convex kind supports p=2 only")
    elif isinstance(spec, BoxSpec):
        if spec.basis is not None:
            b = np.asarray(spec.basis, dtype=np.float64)
            if b.shape != (space_dim, space_dim):
                errors.append(f"box basis must be {space_dim}x{space_dim}")
            elif not np.allclose(b @ b.T, np.eye(space_dim), atol=1e-9):
                errors.append("box basis rows must be orthonormal")
    elif isinstance(spec, DirectionalSpec):
        if space_dim != 2:
            errors.append("directional kind supports p=2 only")
        if spec.mode not in ("max", "min"):
            errors.append(f"directional mode must be 'max' or 'min', got {spec.mode!r}")
        n = np.asarray(spec.normals, dtype=np.float64)
        if n.shape != (3, 2):
            errors.append("directional kind needs exactly 3 planar normals")
        else:
            norms = np.linalg.norm(n, axis=1)
            if (norms < 1e-12).any():
                errors.append("directional normals must be nonzero")
            else:
                lam = _positive_combination(n)
                if lam is None:
                    errors.append(
                        "directional normals must admit a strictly positive "
                        "combination summing to zero (pairwise non-parallel)"
                    )
    elif isinstance(spec, WarpedSpec):
        if space_dim != 2:
            errors.append("warped kind supports p=2 only")
        if isinstance(spec.inner, (WarpedSpec, IntersectionSpec)):
            errors.append("warped inner kind must be convex, box or directional")
        else:
            errors.extend(validate_spec(spec.inner, space_dim))
    elif isinstance(spec, IntersectionSpec):
        if space_dim != 2:
            errors.append("intersection kind supports p=2 only")
        for side, sub in (("left", spec.left), ("right", spec.right)):
            if isinstance(sub, WarpedSpec):
                errors.append(f"intersection {side} operand must be an identity-warp kind")
            else:
                errors.extend(validate_spec(sub, space_dim))
    else:
        errors.append(f"unknown hull spec {type(spec).__name__}")
    return errors


def _positive_combination(normals: np.ndarray) -> np.ndarray | None:
    """Strictly positive weights with sum_j w_j e_j = 0, or None."""
    e1, e2, e3 = normals
    lam = np.array(
        [
            e2[0] * e3[1] - e2[1] * e3[0],
            e3[0] * e1[1] - e3[1] * e1[0],
            e1[0] * e2[1] - e1[1] * e2[0],
        ]
    )
    scale = np.abs(lam).max()
    if scale < 1e-12:
        return None
    lam = lam / scale
    if (lam > 1e-9).all():
        return lam
    if (lam < -1e-9).all():
        return -lam
    return None


class BoxCore:
    """Interval box in an orthonormal basis; the p != 2 hull core."""

    __slots__ = ("basis", "lo", "hi")

    def __init__(self, basis: np.ndarray, lo: np.ndarray, hi: np.ndarray):
        self.basis = basis
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_points(cls, pts: np.ndarray, basis: np.ndarray | None) -> "BoxCore":
        p = pts.shape[1]
        b = np.eye(p) if basis is None else np.asarray(basis, dtype=np.float64)
        coords = pts @ b.T
        return cls(b, coords.min(axis=0), coords.max(axis=0))

    @property
    def dim(self) -> int:
        return int((self.hi > self.lo).sum())

    def to_world(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self.basis

    def distance(self, x: np.ndarray) -> float:
        c = self.basis @ x
        return float(np.linalg.norm(np.clip(c, self.lo, self.hi) - c))

    def rb_margin(self, x: np.ndarray) -> float:
        c = self.basis @ x
        free = self.hi > self.lo
        fixed = ~free
        if fixed.any() and np.abs(c[fixed] - self.lo[fixed]).max() > geometry.AFFINE_SLACK:
            return -np.inf
        if not free.any():
            return -np.inf
        return float(np.minimum(c[free] - self.lo[free], self.hi[free] - c[free]).min())

    def ray_exit(self, origin: np.ndarray, direction: np.ndarray) -> float:
        c = self.basis @ origin
        d = self.basis @ direction
        nd = float(np.linalg.norm(d))
        if nd == 0.0:
            return 0.0
        t_best = np.inf
        for i in range(c.shape[0]):
            if self.hi[i] == self.lo[i]:
                if abs(d[i]) > 1e-9 * nd:
                    return 0.0
                continue
            if d[i] > 1e-12 * nd:
                t_best = min(t_best, (self.hi[i] - c[i]) / d[i])
            elif d[i] < -1e-12 * nd:
                t_best = min(t_best, (self.lo[i] - c[i]) / d[i])
        if not np.isfinite(t_best):
            return 0.0
        return max(float(t_best), 0.0)

    def vertices(self) -> np.ndarray:
        free = np.nonzero(self.hi > self.lo)[0]
        corners = [self.lo.copy()]
        for axis in free:
            corners = [c.copy() for c in corners] + [
                np.where(np.arange(self.lo.size) == axis, self.hi, c) for c in corners
            ]
        return self.to_world(np.array(corners))

    def centroid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def boundary_samples(self, per_edge: int) -> np.ndarray:
        corners = self.vertices() @ self.basis.T  # back to box coords
        if corners.shape[0] == 1:
            return self.to_world(corners)
        samples = [corners]
        ts = np.arange(1, per_edge)[:, None] / per_edge
        for i in range(corners.shape[0]):
            for j in range(i + 1, corners.shape[0]):
                if (corners[i] != corners[j]).sum() == 1:  # box edge
                    samples.append(corners[i] * (1 - ts) + corners[j] * ts)
        return self.to_world(np.concatenate(samples, axis=0))


Core = Union[Polytope, BoxCore]


def _core_distance(core: Core, u: np.ndarray) -> float:
    if isinstance(core, Polytope):
        return geometry.polytope_distance(core, u)
    return core.distance(u)


def _core_margin(core: Core, u: np.ndarray) -> float:
    if isinstance(core, Polytope):
        return geometry.rb_margin(core, u)
    return core.rb_margin(u)


def _core_ray_exit(core: Core, u: np.ndarray, d: np.ndarray) -> float:
    if isinstance(core, Polytope):
        return geometry.ray_exit_scale(core, u, d)
    return core.ray_exit(u, d)


def _core_vertices(core: Core) -> np.ndarray:
    if isinstance(core, Polytope):
        return core.vertices
    return core.vertices()


def _core_dim(core: Core) -> int:
    return core.dim


def _core_centroid(core: Core) -> np.ndarray:
    if isinstance(core, Polytope):
        return geometry.vertex_centroid(core)
    return core.to_world(core.centroid())


def _core_boundary(core: Core, per_edge: int) -> np.ndarray:
    if isinstance(core, Polytope):
        return geometry.boundary_samples(core, per_edge)
    return core.boundary_samples(per_edge)


class Hull:
    """A realized hull: the decision region generated from a source point set.

    ``core`` is the convex body in warp coordinates; ``warped_source`` holds
    the warp images of the source points. World-space queries conjugate
    through the warp.
    """

    __slots__ = ("spec", "source", "warp", "core", "warped_source", "_mu_cache")

    def __init__(self, spec: HullSpec, source: PointSet, warp: WarpMap,
                 core: Core, warped_source: np.ndarray):
        self.spec = spec
        self.source = source
        self.warp = warp
        self.core = core
        self.warped_source = warped_source
        self._mu_cache: dict = {}

    # -- basic queries ------------------------------------------------

    @property
    def is_singleton(self) -> bool:
        return _core_dim(self.core) == 0

    def contains(self, x, tol: float = 1e-9) -> bool:
        """Membership within Euclidean distance ``tol`` (in warp coordinates)."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        u = self.warp.forward(geometry.as_point(x))
        return _core_distance(self.core, u) <= tol

    def in_relative_interior(self, x, tol: float = 0.0) -> bool:
        """Relative-interior membership with margin ``tol``; false for singletons."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        if self.is_singleton:
            return False
        u = self.warp.forward(geometry.as_point(x))
        return _core_margin(self.core, u) > tol

    def relative_interior_margin(self, x) -> float:
        """Signed distance of warp(x) to the core's relative boundary."""
        u = self.warp.forward(geometry.as_point(x))
        return _core_margin(self.core, u)

    def interior_reference(self) -> np.ndarray:
        """A point in the relative interior (the core's vertex centroid, mapped back)."""
        return self.warp.inverse(_core_centroid(self.core))

    # -- critical boundary --------------------------------------------

    def exit_set_contains(self, x, y, tol: float = EXIT_TOL) -> bool:
        """True iff y is the farthest hull point along the ray from x through y.

        This is the critical portion of the relative boundary seen from a
        source point x: agents leave it irreversibly. x itself never
        belongs to it.
        """
        x = geometry.as_point(x)
        y = geometry.as_point(y)
        src = self.source.points
        if ((src - x) ** 2).sum(axis=1).min() > (1e-9) ** 2:
            raise ValueError("x is not a source point of this hull")
        u_x = self.warp.forward(x)
        u_y = self.warp.forward(y)
        d = u_y - u_x
        scale = max(1.0, float(np.abs(self.warped_source).max()))
        if float(np.linalg.norm(d)) <= 1e-12 * scale:
            return False
        if _core_distance(self.core, u_y) > tol:
            return False
        t = _core_ray_exit(self.core, u_x, d)
        # the exit scale must be ~1: with tolerance-based membership, y can
        # sit epsilon outside the hull in a direction that leaves the hull
        # immediately (t ~ 0), and such a y is not a far boundary point
        slack = max(tol, 1e-12)
        return 1.0 - slack <= t <= 1.0 + slack

    # -- intrinsic distances -------------------------------------------

    def path_distance(self, x0, x1, samples: int = 1000) -> float:
        """Length of the warp-straight path between two hull points.

        The path is the inverse image of the straight segment between the
        warped endpoints, measured as a polyline at ``samples`` + 1
        equispaced parameters. Exact for identity warps (it is the chord);
        an upper bound on the intrinsic distance otherwise.
        """
        if samples < 2:
            raise ValueError("samples must be >= 2")
        x0 = geometry.as_point(x0)
        x1 = geometry.as_point(x1)
        for pt in (x0, x1):
            if not self.contains(pt, 1e-9):
                raise ValueError("path endpoints must lie in the hull")
        if self.warp.is_identity:
            return float(np.linalg.norm(x1 - x0))
        u0 = self.warp.forward(x0)
        u1 = self.warp.forward(x1)
        return _kernels.pullback_length(u0, u1, self.warp.rate, samples)

    def geodesic_diameter(self, edge_samples: int = 64, path_samples: int = 1000) -> float:
        """Max intrinsic distance between hull points.

        Exact (the Euclidean diameter of the core vertices) for identity
        warps. For warped hulls, the maximum of the warp-straight path
        length over pairs of core boundary samples plus warped source
        points; a sampling approximation whose resolution is controlled by
        the two parameters. Zero iff the hull is a singleton.
        """
        key = (edge_samples, path_samples)
        if key in self._mu_cache:
            return self._mu_cache[key]
        if self.is_singleton:
            value = 0.0
        elif self.warp.is_identity:
            value = _kernels.pairwise_max_dist(_core_vertices(self.core))
        else:
            samples = np.concatenate(
                [_core_boundary(self.core, edge_samples), self.warped_source], axis=0
            )
            value = _kernels.pullback_max(samples, self.warp.rate, path_samples)
        self._mu_cache[key] = value
        return value

    def boundary_points(self, per_edge: int = 16, world: bool = True) -> np.ndarray:
        """Samples of the hull boundary (vertices plus per-edge interpolants)."""
        u = _core_boundary(self.core, per_edge)
        return self.warp.inverse(u) if world else u

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"Hull(kind={self.spec.kind}, source={len(self.source)} pts, "
            f"core_dim={_core_dim(self.core)})"
        )


def _build_core(spec: HullSpec, upts: np.ndarray) -> Core:
    if upts.shape[0] == 1 and upts.shape[1] == 2:
        # singleton sources build the singleton, exactly, for every kind
        return Polytope(0, upts[:1])
    if isinstance(spec, ConvexSpec):
        return geometry.convex_hull(upts)
    if isinstance(spec, BoxSpec):
        p = upts.shape[1]
        if p != 2:
            return BoxCore.from_points(upts, spec.basis)
        box = BoxCore.from_points(upts, spec.basis)
        lo, hi = box.lo, box.hi
        corners = np.array(
            [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
        )
        return geometry.convex_hull(box.to_world(corners))
    if isinstance(spec, DirectionalSpec):
        return _directional_core(spec, upts)
    if isinstance(spec, IntersectionSpec):
        left = _build_core(spec.left, upts)
        right = _build_core(spec.right, upts)
        return geometry.intersect_polytopes(left, right)
    raise TypeError(f"cannot build core for {type(spec).__name__}")


def _directional_core(spec: DirectionalSpec, upts: np.ndarray) -> Polytope:
    normals = np.asarray(spec.normals, dtype=np.float64)
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    if spec.mode == "min":
        normals = -normals
    supports = (upts @ normals.T).max(axis=0)
    scale = max(1.0, float(np.abs(upts).max()))
    candidates = []
    for i in range(3):
        for j in range(i + 1, 3):
            a = np.array([normals[i], normals[j]])
            b = np.array([supports[i], supports[j]])
            pt = np.linalg.solve(a, b)
            candidates.append(pt)
    candidates = np.array(candidates)
    feasible = candidates[
        (candidates @ normals.T <= supports[None, :] + 1e-9 * scale).all(axis=1)
    ]
    if feasible.shape[0] == 0:
        feasible = candidates
    return geometry.convex_hull(feasible)


def build_hull(spec: HullSpec, points, dedup_tol: float = DEDUP_TOL) -> Hull:
    """Build the hull of a nonempty point set under the given spec."""
    source = points if isinstance(points, PointSet) else PointSet(points, dedup_tol)
    errors = validate_spec(spec, source.dim)
    if errors:
        raise ValueError("; ".join(errors))
    warp = spec_warp(spec)
    inner = spec.inner if isinstance(spec, WarpedSpec) else spec
    upts = warp.forward(source.points)
    core = _build_core(inner, upts)
    return Hull(spec, source, warp, core, upts)


def hull_subset(a: Hull, b: Hull, tol: float = 1e-9) -> bool:
    """True iff a is contained in b; requires hulls of the same spec.

    Exact for shared-warp convex cores: checked as containment of every
    core vertex of ``a`` in the core of ``b``.
    """
    if a.spec != b.spec:
        raise ValueError("hull_subset requires hulls of the same kind")
    for v in _core_vertices(a.core):
        if _core_distance(b.core, v) > tol:
            return False
    return True


def set_path_distance(hull: Hull, pts, predicate: Callable[[np.ndarray], bool],
                      per_edge: int = 64, path_samples: int = 256) -> float:
    """Approximate least intrinsic distance from a point set to a boundary region.

    The region is given as a membership predicate over world points; it is
    sampled on the hull boundary. Returns 0 when a point of ``pts`` itself
    satisfies the predicate, and ``inf`` when no boundary sample does.
    """
    pts = geometry.as_point_array(pts)
    for a in pts:
        if not hull.contains(a, 1e-9):
            raise ValueError("point set must lie inside the hull")
        if predicate(a):
            return 0.0
    targets = [s for s in hull.boundary_points(per_edge) if predicate(s)]
    if not targets:
        return math.inf
    best = math.inf
    for a in pts:
        for s in targets:
            best = min(best, hull.path_distance(a, s, path_samples))
    return best
