"""The delayed difference inclusion: per-agent decision hulls and update selection.

State layout: ``values[k-1, j]`` is agent k's position j steps ago, so slot
0 is the present position. One step reads the whole pre-step state, picks
every agent's next position from the relative interior of the hull of its
received points, and shifts the delay slots.

The inclusion itself only constrains updates to that relative interior; a
simulator must commit to concrete selections. Two policies are provided:

* ``shrink_to_centroid`` — move a fraction of the way from the agent's own
  (warped) position toward the warped centroid of the received points;
  deterministic.
* ``random_interior`` — sample uniformly from the decision hull's core,
  shrunk toward its centroid so the draw stays strictly interior.

Both stay put when the received set collapses to the agent's own position
(no information means no motion), and both return a point guaranteed to be
in the relative interior whenever the received set is not a singleton.

``self_delay`` selects which copy of the agent's own position enters its
received set. The compliant value is 0 (present position); 1 reproduces
the delayed-self counterexample where consensus fails.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry
from .geometry import PointSet, Polytope
from .graphs import DelayGraph, Schedule
from .hulls import (
    BoxCore,
    Hull,
    HullSpec,
    _core_centroid,
    _core_dim,
    _core_margin,
    _core_vertices,
    build_hull,
)

# relative-interior safety shrink for the random policy, as a fraction of
# the core centroid's boundary margin
RI_SHRINK = 1e-6


@dataclass(frozen=True)
class UpdatePolicy:
    kind: str = "shrink_to_centroid"
    step_fraction: float = 0.5
    self_delay: int = 0

    def __post_init__(self):
        if self.kind not in ("shrink_to_centroid", "random_interior"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if not (0.0 < self.step_fraction < 1.0):
            raise ValueError("step_fraction must lie strictly between 0 and 1")
        if self.self_delay < 0:
            raise ValueError("self_delay must be >= 0")


@dataclass(frozen=True)
class SystemState:
    """Full delayed state: an (n, h, p) array with values[k-1, j] = x_k(t - j)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError("state array must have shape (n, h, p)")
        if not np.isfinite(v).all():
            raise ValueError("state has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_positions(cls, positions, h: int) -> "SystemState":
        """All delay slots initialized equal to the present positions."""
        pos = geometry.as_point_array(positions)
        return cls(np.repeat(pos[:, None, :], h, axis=1))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> int:
        return self.values.shape[1]

    @property
    def p(self) -> int:
        return self.values.shape[2]

    def position(self, k: int, delay: int = 0) -> np.ndarray:
        return self.values[k - 1, delay]

    def current(self) -> np.ndarray:
        return self.values[:, 0, :]


def received_set(state: SystemState, graph: DelayGraph, k: int,
                 self_delay: int = 0) -> PointSet:
    """The agent's own position copy plus all delayed positions sent to it."""
    if not (1 <= k <= state.n):
        raise ValueError(f"agent {k} out of range")
    if self_delay >= state.h:
        raise ValueError("self_delay must be < h")
    pts = [state.values[k - 1, self_delay]]
    for (i, j, l) in sorted(
        (a.from_agent, a.delay, a.to_agent) for a in graph.arcs if a.to_agent == k
    ):
        pts.append(state.values[i - 1, j])
    return PointSet(np.array(pts))


def decision_hull(spec: HullSpec, received: PointSet) -> Hull:
    """Hull of the received points; legal updates are its relative interior
    (or the point itself when the received set is a singleton)."""
    return build_hull(spec, received)


def _sample_core_uniform(core, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from a hull core, in warp coordinates."""
    if isinstance(core, BoxCore):
        c = rng.random(core.lo.size)
        return core.to_world(core.lo + c * (core.hi - core.lo))
    if core.dim == 0:
        return core.vertices[0].copy()
    if core.dim == 1:
        a, b = core.vertices
        return a + rng.random() * (b - a)
    v = core.vertices
    fans = [(v[0], v[i], v[i + 1]) for i in range(1, v.shape[0] - 1)]
    areas = np.array([abs(geometry._cross(a, b, c)) / 2.0 for (a, b, c) in fans])
    total = areas.sum()
    weights = areas / total if total > 0 else np.full(len(fans), 1.0 / len(fans))
    idx = rng.choice(len(fans), p=weights)
    a, b, c = fans[idx]
    r1, r2 = rng.random(2)
    s1 = np.sqrt(r1)
    return a * (1 - s1) + b * (s1 * (1 - r2)) + c * (s1 * r2)


def select_update(policy: UpdatePolicy, hull: Hull, received: PointSet,
                  self_point: np.ndarray, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Pick the agent's next position from the decision hull.

    Returns ``self_point`` bit-exactly when the received set is a
    singleton. Otherwise the result lies in the hull's relative interior
    with a positive margin.
    """
    self_point = geometry.as_point(self_point)
    if received.is_singleton():
        return self_point.copy()
    core = hull.core
    centroid = _core_centroid(core)
    centroid_margin = _core_margin(core, centroid)
    u_self = hull.warp.forward(self_point)
    if policy.kind == "shrink_to_centroid":
        target = hull.warp.forward(received.points).mean(axis=0)
        candidate = u_self + policy.step_fraction * (target - u_self)
        if _core_margin(core, candidate) < RI_SHRINK * centroid_margin:
            # received centroid sits on (or too close to) the relative
            # boundary; step toward the core centroid instead, which is
            # always strictly interior
            candidate = u_self + policy.step_fraction * (centroid - u_self)
        return hull.warp.inverse(candidate)
    if rng is None:
        raise ValueError("random_interior policy needs an rng")
    draw = _sample_core_uniform(core, rng)
    candidate = centroid + (1.0 - RI_SHRINK) * (draw - centroid)
    return hull.warp.inverse(candidate)


@dataclass
class StepRecord:
    """Per-agent bookkeeping for one step."""

    received: list[PointSet]
    updates: np.ndarray


def step(state: SystemState, graph: DelayGraph, spec: HullSpec,
         policy: UpdatePolicy, rng: Optional[np.random.Generator] = None
         ) -> tuple[SystemState, StepRecord]:
    """Advance all agents one step, synchronously, from the same pre-step state."""
    if graph.n != state.n or graph.h != state.h:
        raise ValueError("graph shape does not match state shape")
    if policy.self_delay >= state.h:
        raise ValueError("policy self_delay must be < h")
    new_values = np.empty_like(state.values)
    received_all: list[PointSet] = []
    updates = np.empty((state.n, state.p))
    for k in range(1, state.n + 1):
        received = received_set(state, graph, k, policy.self_delay)
        self_point = state.values[k - 1, policy.self_delay]
        if received.is_singleton():
            update = self_point.copy()
        else:
            hull = decision_hull(spec, received)
            update = select_update(policy, hull, received, self_point, rng)
        received_all.append(received)
        updates[k - 1] = update
        new_values[k - 1, 0] = update
        new_values[k - 1, 1:] = state.values[k - 1, :-1]
    return SystemState(new_values), StepRecord(received_all, updates)


@dataclass
class Trace:
    """One solution of the inclusion plus per-step records.

    ``states[t]`` has shape (n, h, p); consecutive states satisfy the shift
    rule values[k, j](t+1) = values[k, j-1](t) bit-exactly for j >= 1.
    """

    spec: HullSpec
    policy: UpdatePolicy
    schedule: Schedule
    seed: int
    states: np.ndarray
    records: list[StepRecord] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def h(self) -> int:
        return self.states.shape[2]

    @property
    def p(self) -> int:
        return self.states.shape[3]

    def state_at(self, t: int) -> SystemState:
        return SystemState(self.states[t])


def simulate(initial: SystemState, schedule: Schedule, spec: HullSpec,
             policy: UpdatePolicy, horizon: int, seed: int = 0,
             record: bool = True) -> Trace:
    """Run the inclusion for ``horizon`` steps; deterministic given the seed."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if (schedule.n, schedule.h) != (initial.n, initial.h):
        raise ValueError("schedule shape does not match initial state")
    rng = np.random.default_rng(seed)
    states = np.empty((horizon + 1,) + initial.values.shape)
    states[0] = initial.values
    records: list[StepRecord] = []
    current = initial
    for t in range(horizon):
        current, rec = step(current, schedule.graph_at(t), spec, policy, rng)
        states[t + 1] = current.values
        if record:
            records.append(rec)
    states.setflags(write=False)
    return Trace(spec, policy, schedule, seed, states, records)
