"""Canned experiment constructions with machine-checkable expected outcomes.

Three families:

* ``example4_counterexample`` — the three-agent periodic schedule where
  agent 2 alternately talks to agents 1 and 3. With ``delayed_self`` the
  agents anchor updates on their previous position instead of the present
  one, and agent 2's even- and odd-time positions settle on two different
  values; with the compliant anchor the same schedule reaches consensus.
* ``split_groups`` — two groups that never receive outside information
  hold their initial positions forever, so the spread can never fall
  below the group separation (the converse direction of the connectivity
  condition).
* ``jointly_connected_random`` — seeded random schedules that guarantee a
  root node in every window; expected to reach consensus within the
  default horizon of 50 decrease windows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .diagnostics import decrease_window_length, spread
from .dynamics import SystemState, Trace, UpdatePolicy, simulate
from .graphs import (
    DelayGraph,
    PeriodicSchedule,
    RandomJointSchedule,
    Schedule,
    empty_graph,
)
from .hulls import ConvexSpec, HullSpec


@dataclass(frozen=True)
class ConsensusExpected:
    outcome = "consensus"
    tol: float = 1e-3


@dataclass(frozen=True)
class PersistentSplitExpected:
    outcome = "persistent_split"
    min_spread: float = 0.0
    groups: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class OscillationExpected:
    """Even/odd subsequences of one agent settle on two distinct values.

    Detected when, over the last ``window`` even and odd indices, each
    subsequence has spread below ``settle_tol`` while the two means differ
    by more than ``gap``.
    """

    outcome = "oscillation"
    agent: int = 2
    gap: float = 0.01
    window: int = 200
    settle_tol: float = 1e-6


Expected = Union[ConsensusExpected, PersistentSplitExpected, OscillationExpected]


@dataclass
class Scenario:
    name: str
    initial: SystemState
    schedule: Schedule
    spec: HullSpec
    policy: UpdatePolicy
    horizon: int
    seed: int
    expected: Expected

    def run(self, record: bool = True) -> Trace:
        return simulate(
            self.initial, self.schedule, self.spec, self.policy,
            self.horizon, self.seed, record,
        )


EXAMPLE4_EVEN_ARCS = ((2, 1, 1), (1, 0, 2))
EXAMPLE4_ODD_ARCS = ((2, 1, 3), (3, 0, 2))


def example4_schedule() -> PeriodicSchedule:
    return PeriodicSchedule(
        (
            DelayGraph.from_triples(3, 2, EXAMPLE4_EVEN_ARCS),
            DelayGraph.from_triples(3, 2, EXAMPLE4_ODD_ARCS),
        )
    )


def example4_counterexample(delayed_self: bool,
                            positions=((0.0, 0.0), (2.0, 0.0), (4.0, 0.0)),
                            horizon: int = 2000) -> Scenario:
    """Three agents on a line under the alternating two-graph schedule.

    The middle agent always hears from one neighbor; agents 1 and 3 hear
    from the middle agent on alternating steps only. The schedule has a
    root node across every window of two steps, so with the compliant
    self-anchor consensus follows; anchoring on the previous own position
    instead produces a persistent even/odd split. Initial positions are a
    fixture choice (the construction does not pin them).
    """
    initial = SystemState.from_positions(np.asarray(positions, dtype=np.float64), h=2)
    policy = UpdatePolicy("shrink_to_centroid", 0.5, self_delay=1 if delayed_self else 0)
    expected: Expected
    if delayed_self:
        expected = OscillationExpected(agent=2, gap=0.01)
    else:
        expected = ConsensusExpected(tol=1e-3)
    return Scenario(
        name="example4-delayed" if delayed_self else "example4-current",
        initial=initial,
        schedule=example4_schedule(),
        spec=ConvexSpec(),
        policy=policy,
        horizon=horizon,
        seed=0,
        expected=expected,
    )


def split_groups(group_a: tuple[int, ...], group_b: tuple[int, ...],
                 y, ybar, horizon: int = 1000, n: Optional[int] = None,
                 spec: HullSpec | None = None,
                 free_agent_positions: Optional[dict[int, tuple[float, float]]] = None,
                 ) -> Scenario:
    """Two isolated groups pinned at y and ybar; spread never drops below |y - ybar|.

    Group members receive only from their own group (complete undelayed
    arcs within each group), so their received sets stay singletons and
    they never move. Agents outside both groups receive from everyone and
    start at given positions inside the hull of {y, ybar} (default: the
    midpoint).
    """
    group_a = tuple(sorted(group_a))
    group_b = tuple(sorted(group_b))
    if not group_a or not group_b:
        raise ValueError("both groups must be nonempty")
    if set(group_a) & set(group_b):
        raise ValueError("groups must be disjoint")
    y = np.asarray(y, dtype=np.float64)
    ybar = np.asarray(ybar, dtype=np.float64)
    if np.array_equal(y, ybar):
        raise ValueError("group anchors must differ")
    members = set(group_a) | set(group_b)
    count = n if n is not None else max(members)
    if members - set(range(1, count + 1)):
        raise ValueError("group members out of agent range")
    free = [k for k in range(1, count + 1) if k not in members]
    free_agent_positions = free_agent_positions or {}
    midpoint = 0.5 * (y + ybar)
    positions = np.empty((count, y.size))
    for k in range(1, count + 1):
        if k in group_a:
            positions[k - 1] = y
        elif k in group_b:
            positions[k - 1] = ybar
        else:
            positions[k - 1] = np.asarray(free_agent_positions.get(k, midpoint))
    arcs = []
    for group in (group_a, group_b):
        for src in group:
            for dst in group:
                if src != dst:
                    arcs.append((src, 0, dst))
    for dst in free:
        for src in range(1, count + 1):
            if src != dst:
                arcs.append((src, 0, dst))
    graph = DelayGraph.from_triples(count, 1, arcs) if arcs else empty_graph(count, 1)
    return Scenario(
        name="split-groups",
        initial=SystemState.from_positions(positions, h=1),
        schedule=PeriodicSchedule((graph,)),
        spec=spec or ConvexSpec(),
        policy=UpdatePolicy("shrink_to_centroid", 0.5, 0),
        horizon=horizon,
        seed=0,
        expected=PersistentSplitExpected(
            min_spread=float(np.linalg.norm(y - ybar)),
            groups=(group_a, group_b),
        ),
    )


def jointly_connected_random(n: int, h: int, T: int, p: int, spec: HullSpec,
                             seed: int, horizon: Optional[int] = None,
                             policy: Optional[UpdatePolicy] = None) -> Scenario:
    """Seeded random scenario whose schedule has a root in every T-window.

    Initial positions are uniform in [-5, 5]^p. The default horizon is 50
    decrease windows, which the convergence batch shows is enough to bring
    the spread below the consensus tolerance for all tested seeds.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    if T < 0:
        raise ValueError("T must be >= 0")
    schedule = RandomJointSchedule(n, h, T, seed)
    rng = np.random.default_rng([seed, 0xC0FFEE])
    positions = rng.uniform(-5.0, 5.0, size=(n, p))
    if horizon is None:
        horizon = 50 * decrease_window_length(n, h, T)
    return Scenario(
        name=f"jointly-connected-{spec.kind}-n{n}h{h}T{T}-seed{seed}",
        initial=SystemState.from_positions(positions, h=h),
        schedule=schedule,
        spec=spec,
        policy=policy or UpdatePolicy("shrink_to_centroid", 0.5, 0),
        horizon=horizon,
        seed=seed,
        expected=ConsensusExpected(tol=1e-3),
    )


@dataclass
class OutcomeResult:
    expected: str
    detected: str
    passed: bool
    details: dict = field(default_factory=dict)


def evaluate_outcome(trace: Trace, expected: Expected) -> OutcomeResult:
    """Check a finished trace against the scenario's expected outcome."""
    if isinstance(expected, ConsensusExpected):
        final = spread(trace.state_at(trace.horizon))
        passed = final < expected.tol
        return OutcomeResult(
            "consensus",
            "consensus" if passed else "no consensus",
            passed,
            {"final_spread": final, "tol": expected.tol},
        )
    if isinstance(expected, PersistentSplitExpected):
        spreads = np.array([spread(trace.state_at(t)) for t in range(trace.horizon + 1)])
        floor = expected.min_spread - 1e-12
        ok = bool((spreads >= floor).all())
        details: dict = {"min_spread_seen": float(spreads.min()), "floor": floor}
        groups_constant = True
        for group in expected.groups:
            for k in group:
                series = trace.states[:, k - 1, :, :]
                if not (series == series[0]).all():
                    groups_constant = False
        details["groups_bit_constant"] = groups_constant
        passed = ok and groups_constant
        return OutcomeResult(
            "persistent_split",
            "persistent_split" if passed else "split lost",
            passed,
            details,
        )
    if isinstance(expected, OscillationExpected):
        series = trace.states[:, expected.agent - 1, 0, :]
        even = series[::2][-expected.window:]
        odd = series[1::2][-expected.window:]
        even_spread = float(np.linalg.norm(even - even.mean(axis=0), axis=1).max())
        odd_spread = float(np.linalg.norm(odd - odd.mean(axis=0), axis=1).max())
        gap = float(np.linalg.norm(even.mean(axis=0) - odd.mean(axis=0)))
        passed = (
            even_spread < expected.settle_tol
            and odd_spread < expected.settle_tol
            and gap > expected.gap
        )
        return OutcomeResult(
            "oscillation",
            "oscillation" if passed else "no oscillation",
            passed,
            {"even_spread": even_spread, "odd_spread": odd_spread, "gap": gap},
        )
    raise TypeError(f"unknown expected outcome {type(expected).__name__}")


def _builtin_two_agent_contraction() -> Scenario:
    """Two agents, complete undelayed graph: the spread halves every step."""
    graph = DelayGraph.from_triples(2, 1, [(1, 0, 2), (2, 0, 1)])
    return Scenario(
        name="two-agent-contraction",
        initial=SystemState.from_positions([(0.0, 0.0), (2.0, 0.0)], h=1),
        schedule=PeriodicSchedule((graph,)),
        spec=ConvexSpec(),
        policy=UpdatePolicy("shrink_to_centroid", 0.5, 0),
        horizon=50,
        seed=0,
        expected=ConsensusExpected(tol=1e-3),
    )


BUILTIN_SCENARIOS = {
    "example4-delayed": lambda: example4_counterexample(True),
    "example4-current": lambda: example4_counterexample(False),
    "split-pair": lambda: split_groups((1,), (2,), (0.0, 0.0), (1.0, 1.0), n=3),
    "two-agent-contraction": _builtin_two_agent_contraction,
    "jointly-connected-convex": lambda: jointly_connected_random(
        3, 2, 2, 2, ConvexSpec(), seed=7
    ),
    "jointly-connected-warped": lambda: jointly_connected_random(
        3, 2, 2, 2, _warped_default(), seed=11
    ),
}

BUILTIN_SUMMARIES = {
    "example4-delayed": "three agents, alternating graphs, delayed self anchor: persistent even/odd split",
    "example4-current": "same schedule with the compliant present-position anchor: consensus",
    "split-pair": "two isolated agents plus an observer: spread never drops below the separation",
    "two-agent-contraction": "complete two-agent graph, centroid policy: spread halves per step",
    "jointly-connected-convex": "seeded random jointly connected schedule, convex hulls: consensus",
    "jointly-connected-warped": "seeded random jointly connected schedule, warped hulls: consensus",
}


def _warped_default() -> HullSpec:
    from .hulls import WarpedSpec
    from .warps import norm_rotation

    return WarpedSpec(ConvexSpec(), norm_rotation(0.04))


def builtin_scenario(name: str) -> Scenario:
    try:
        factory = BUILTIN_SCENARIOS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin {name!r}; known: {', '.join(sorted(BUILTIN_SCENARIOS))}"
        ) from None
    return factory()
