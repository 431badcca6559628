"""Directed graphs with delays, schedules over time, and joint connectivity.

An arc ``(k, j, l)`` means agent ``l`` receives agent ``k``'s position
delayed by ``j`` steps. Agent labels are 1-based; delays are 0-based and
bounded by the delay horizon ``h``. The arc ``(k, 0, k)`` is excluded: an
agent does not "receive" its own present position, it always has it.

Connectivity is computed on the delay-projected digraph (arcs collapse to
``k -> l``): delays matter for the dynamics, not for reachability. A node
counts as connected to itself only through an actual cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np


@dataclass(frozen=True, order=True)
class DelayArc:
    from_agent: int
    delay: int
    to_agent: int


@dataclass(frozen=True)
class DelayGraph:
    n: int
    h: int
    arcs: frozenset[DelayArc]

    def __post_init__(self):
        for arc in self.arcs:
            if not (1 <= arc.from_agent <= self.n and 1 <= arc.to_agent <= self.n):
                raise ValueError(f"arc {arc} out of agent range 1..{self.n}")
            if not (0 <= arc.delay < self.h):
                raise ValueError(f"arc {arc} delay out of range 0..{self.h - 1}")
            if arc.from_agent == arc.to_agent and arc.delay == 0:
                raise ValueError(f"arc {arc}: undelayed self-arcs are excluded")

    @classmethod
    def from_triples(cls, n: int, h: int, triples: Iterable[tuple[int, int, int]]) -> "DelayGraph":
        return cls(n, h, frozenset(DelayArc(k, j, l) for (k, j, l) in triples))

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted((a.from_agent, a.delay, a.to_agent) for a in self.arcs)

    def projected_edges(self) -> set[tuple[int, int]]:
        return {(a.from_agent, a.to_agent) for a in self.arcs}


def empty_graph(n: int, h: int) -> DelayGraph:
    return DelayGraph(n, h, frozenset())


def union_graphs(graphs: Iterable[DelayGraph]) -> DelayGraph:
    graphs = list(graphs)
    if not graphs:
        raise ValueError("union of no graphs")
    n, h = graphs[0].n, graphs[0].h
    arcs: set[DelayArc] = set()
    for g in graphs:
        if (g.n, g.h) != (n, h):
            raise ValueError("graphs in a union must share n and h")
        arcs |= g.arcs
    return DelayGraph(n, h, frozenset(arcs))


def in_neighborhood(targets: set[int], graph: DelayGraph) -> set[int]:
    """Nodes outside ``targets`` with at least one arc into ``targets``."""
    if not targets:
        raise ValueError("target set must be nonempty")
    if not targets <= set(range(1, graph.n + 1)):
        raise ValueError("target set out of node range")
    return {
        a.from_agent
        for a in graph.arcs
        if a.to_agent in targets and a.from_agent not in targets
    }


def is_connected(graph: DelayGraph, k: int, l: int) -> bool:
    """Reachability k -> l along arc orientation in the projected digraph.

    ``k == l`` holds only when k sits on a cycle (reachable from itself via
    at least one arc).
    """
    succ: dict[int, set[int]] = {}
    for (a, b) in graph.projected_edges():
        succ.setdefault(a, set()).add(b)
    frontier = list(succ.get(k, ()))
    seen = set(frontier)
    while frontier:
        node = frontier.pop()
        if node == l:
            return True
        for nxt in succ.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


class Schedule:
    """Time-indexed sequence of delay graphs sharing (n, h)."""

    n: int
    h: int

    def graph_at(self, t: int) -> DelayGraph:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class PeriodicSchedule(Schedule):
    graphs: tuple[DelayGraph, ...]

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("periodic schedule needs at least one graph")
        n, h = self.graphs[0].n, self.graphs[0].h
        if any((g.n, g.h) != (n, h) for g in self.graphs):
            raise ValueError("schedule graphs must share n and h")

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def h(self) -> int:
        return self.graphs[0].h

    def graph_at(self, t: int) -> DelayGraph:
        return self.graphs[t % len(self.graphs)]


@dataclass(frozen=True)
class ExplicitSchedule(Schedule):
    graphs: tuple[DelayGraph, ...]
    tail: DelayGraph

    def __post_init__(self):
        n, h = self.tail.n, self.tail.h
        if any((g.n, g.h) != (n, h) for g in self.graphs):
            raise ValueError("schedule graphs must share n and h")

    @property
    def n(self) -> int:
        return self.tail.n

    @property
    def h(self) -> int:
        return self.tail.h

    def graph_at(self, t: int) -> DelayGraph:
        return self.graphs[t] if t < len(self.graphs) else self.tail


@dataclass(frozen=True)
class RandomJointSchedule(Schedule):
    """Seeded random schedule guaranteed jointly connected on every window.

    Every ``window + 1`` steps a random spanning arborescence (random root,
    random delays) is injected, so any interval of length ``window``
    contains one and some node is connected to all others across it. The
    remaining steps carry independent random arcs with rate ``arc_rate``.
    The graph at time t depends only on (seed, t), so regeneration is
    order-independent and reproducible.
    """

    n: int
    h: int
    window: int
    seed: int
    arc_rate: float = 0.25

    def graph_at(self, t: int) -> DelayGraph:
        rng = np.random.default_rng([self.seed, t])
        arcs: set[DelayArc] = set()
        if t % (self.window + 1) == 0:
            order = list(rng.permutation(self.n) + 1)
            for idx in range(1, self.n):
                child = int(order[idx])
                parent = int(order[rng.integers(0, idx)])
                delay = int(rng.integers(0, self.h))
                arcs.add(DelayArc(parent, delay, child))
        for src in range(1, self.n + 1):
            for dst in range(1, self.n + 1):
                if rng.random() < self.arc_rate:
                    delay = int(rng.integers(0, self.h))
                    if src == dst and delay == 0:
                        continue
                    arcs.add(DelayArc(src, delay, dst))
        return DelayGraph(self.n, self.h, frozenset(arcs))


def union_over(schedule: Schedule, t0: int, t1: int) -> DelayGraph:
    """Arc-set union of the schedule's graphs over [t0, t1]."""
    if t0 > t1:
        raise ValueError("t0 must be <= t1")
    return union_graphs(schedule.graph_at(t) for t in range(t0, t1 + 1))


def root_across(schedule: Schedule, t0: int, T: int) -> Optional[int]:
    """Lowest-index node connected to all other nodes across [t0, t0 + T]."""
    if T < 0:
        raise ValueError("T must be >= 0")
    union = union_over(schedule, t0, t0 + T)
    for k in range(1, union.n + 1):
        if all(is_connected(union, k, l) for l in range(1, union.n + 1) if l != k):
            return k
    return None


def verify_uniform_connectivity(schedule: Schedule, horizon: int, T: int) -> bool:
    """True iff every window [t0, t0 + T] with t0 <= horizon - T has a root node."""
    if horizon < T:
        raise ValueError("horizon must be >= T")
    return all(root_across(schedule, t0, T) is not None for t0 in range(0, horizon - T + 1))
