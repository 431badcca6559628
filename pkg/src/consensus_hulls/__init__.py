"""Simulator and hull geometry for leaderless multi-agent consensus under delays."""

from .dynamics import SystemState, Trace, UpdatePolicy, simulate, step
from .geometry import PointSet, Polytope, convex_hull, euclidean_diameter
from .graphs import (
    DelayArc,
    DelayGraph,
    ExplicitSchedule,
    PeriodicSchedule,
    RandomJointSchedule,
    in_neighborhood,
    is_connected,
    root_across,
    union_over,
    verify_uniform_connectivity,
)
from .hulls import (
    BoxSpec,
    ConvexSpec,
    DirectionalSpec,
    Hull,
    HullSpec,
    IntersectionSpec,
    WarpedSpec,
    build_hull,
    hull_subset,
    set_path_distance,
)
from .warps import IDENTITY, WarpMap, norm_rotation

__version__ = "0.1.0"

__all__ = [
    "BoxSpec",
    "ConvexSpec",
    "DelayArc",
    "DelayGraph",
    "DirectionalSpec",
    "ExplicitSchedule",
    "Hull",
    "HullSpec",
    "IDENTITY",
    "IntersectionSpec",
    "PeriodicSchedule",
    "PointSet",
    "Polytope",
    "RandomJointSchedule",
    "SystemState",
    "Trace",
    "UpdatePolicy",
    "WarpMap",
    "WarpedSpec",
    "build_hull",
    "convex_hull",
    "euclidean_diameter",
    "hull_subset",
    "in_neighborhood",
    "is_connected",
    "norm_rotation",
    "root_across",
    "set_path_distance",
    "simulate",
    "step",
    "union_over",
    "verify_uniform_connectivity",
]
