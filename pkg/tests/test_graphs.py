import itertools

import numpy as np
import pytest

from consensus_hulls.graphs import (
    DelayArc,
    DelayGraph,
    ExplicitSchedule,
    PeriodicSchedule,
    RandomJointSchedule,
    empty_graph,
    in_neighborhood,
    is_connected,
    root_across,
    union_over,
    verify_uniform_connectivity,
)

# the alternating two-graph schedule of the delayed-self counterexample
EVEN = DelayGraph.from_triples(3, 2, [(2, 1, 1), (1, 0, 2)])
ODD = DelayGraph.from_triples(3, 2, [(2, 1, 3), (3, 0, 2)])
ALT = PeriodicSchedule((EVEN, ODD))


class TestDelayGraph:
    def test_undelayed_self_arc_rejected(self):
        with pytest.raises(ValueError):
            DelayGraph.from_triples(2, 2, [(1, 0, 1)])

    def test_delayed_self_arc_allowed(self):
        g = DelayGraph.from_triples(2, 2, [(1, 1, 1)])
        assert (1, 1) in g.projected_edges()

    def test_bounds_checked(self):
        with pytest.raises(ValueError):
            DelayGraph.from_triples(2, 2, [(3, 0, 1)])
        with pytest.raises(ValueError):
            DelayGraph.from_triples(2, 2, [(1, 2, 2)])


class TestInNeighborhood:
    def test_counterexample_even_graph(self):
        assert in_neighborhood({1}, EVEN) == {2}

    def test_empty_graph(self):
        assert in_neighborhood({1}, empty_graph(3, 2)) == set()
        assert in_neighborhood({1, 2, 3}, EVEN) == set()

    def test_arc_into_group(self):
        g = DelayGraph.from_triples(3, 1, [(3, 0, 2)])
        assert in_neighborhood({1, 2}, g) == {3}

    def test_empty_target_rejected(self):
        with pytest.raises(ValueError):
            in_neighborhood(set(), EVEN)

    def test_disjoint_from_targets(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            arcs = [
                (int(rng.integers(1, n + 1)), 0, int(rng.integers(1, n + 1)))
                for _ in range(rng.integers(0, 8))
            ]
            arcs = [(k, j, l) for (k, j, l) in arcs if not (k == l)]
            g = DelayGraph.from_triples(n, 1, arcs)
            targets = {int(x) for x in rng.choice(n, rng.integers(1, n + 1), replace=False) + 1}
            assert in_neighborhood(targets, g).isdisjoint(targets)


def brute_force_connected(graph: DelayGraph, k: int, l: int) -> bool:
    edges = graph.projected_edges()
    for length in range(1, graph.n + 1):
        for path in itertools.product(range(1, graph.n + 1), repeat=length + 1):
            if path[0] != k or path[-1] != l:
                continue
            if all((path[i], path[i + 1]) in edges for i in range(length)):
                return True
    return False


class TestConnectivity:
    def test_union_of_counterexample_graphs(self):
        union = union_over(ALT, 0, 1)
        assert is_connected(union, 2, 1)
        assert is_connected(union, 2, 3)
        assert is_connected(union, 1, 3)

    def test_described_asymmetric_graph(self):
        # three agents: 1 and 2 mutually connected, 3 connected to both,
        # nothing connected to 3 (arcs reconstructed from the description)
        g = DelayGraph.from_triples(3, 2, [(1, 1, 2), (2, 0, 1), (3, 1, 1)])
        assert is_connected(g, 1, 2) and is_connected(g, 2, 1)
        assert is_connected(g, 3, 1) and is_connected(g, 3, 2)
        assert not is_connected(g, 1, 3) and not is_connected(g, 2, 3)

    def test_single_arc(self):
        g = DelayGraph.from_triples(2, 2, [(1, 1, 2)])
        assert is_connected(g, 1, 2)
        assert not is_connected(g, 2, 1)

    def test_self_connection_needs_cycle(self):
        g = DelayGraph.from_triples(2, 1, [(1, 0, 2)])
        assert not is_connected(g, 1, 1)
        g2 = DelayGraph.from_triples(2, 1, [(1, 0, 2), (2, 0, 1)])
        assert is_connected(g2, 1, 1)

    def test_against_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(120):
            n = int(rng.integers(2, 7))
            arcs = []
            for src in range(1, n + 1):
                for dst in range(1, n + 1):
                    if rng.random() < 0.25:
                        j = int(rng.integers(0, 2))
                        if src == dst and j == 0:
                            continue
                        arcs.append((src, j, dst))
            g = DelayGraph.from_triples(n, 2, arcs)
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    assert is_connected(g, k, l) == brute_force_connected(g, k, l)

    def test_monotone_under_arc_addition(self):
        rng = np.random.default_rng(2)
        for _ in range(60):
            n = int(rng.integers(2, 6))
            arcs = [
                (int(a), 0, int(b))
                for a in range(1, n + 1)
                for b in range(1, n + 1)
                if a != b and rng.random() < 0.3
            ]
            g_small = DelayGraph.from_triples(n, 1, arcs[: len(arcs) // 2])
            g_big = DelayGraph.from_triples(n, 1, arcs)
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    if is_connected(g_small, k, l):
                        assert is_connected(g_big, k, l)


class TestUnionOver:
    def test_counterexample_window(self):
        union = union_over(ALT, 0, 1)
        assert set(union.triples()) == {(2, 1, 1), (1, 0, 2), (2, 1, 3), (3, 0, 2)}

    def test_single_instant(self):
        assert union_over(ALT, 4, 4).arcs == EVEN.arcs
        assert union_over(ALT, 5, 5).arcs == ODD.arcs

    def test_empty_schedule(self):
        sched = PeriodicSchedule((empty_graph(3, 1),))
        assert union_over(sched, 0, 9).arcs == frozenset()


class TestRootAcross:
    def test_counterexample_every_node_qualifies(self):
        # all three nodes reach the others on the two-step union; the
        # lowest-index tie-break picks node 1
        assert root_across(ALT, 0, 1) == 1
        union = union_over(ALT, 0, 1)
        for k in (1, 2, 3):
            assert all(is_connected(union, k, l) for l in (1, 2, 3) if l != k)

    def test_empty_schedule_has_no_root(self):
        sched = PeriodicSchedule((empty_graph(3, 1),))
        assert root_across(sched, 0, 5) is None

    def test_two_cliques_have_no_root(self):
        arcs = [(1, 0, 2), (2, 0, 1), (3, 0, 4), (4, 0, 3)]
        sched = PeriodicSchedule((DelayGraph.from_triples(4, 1, arcs),))
        assert root_across(sched, 0, 3) is None

    def test_window_growth_preserves_root(self):
        rng = np.random.default_rng(3)
        sched = RandomJointSchedule(4, 2, window=2, seed=5)
        for t0 in range(10):
            if root_across(sched, t0, 2) is not None:
                for bigger in (3, 5):
                    assert root_across(sched, t0, bigger) is not None


class TestUniformConnectivity:
    def test_counterexample_uniform(self):
        assert verify_uniform_connectivity(ALT, 100, 1)

    def test_gap_breaks_it(self):
        graphs = tuple(
            EVEN if not (50 <= t <= 80) else empty_graph(3, 2) for t in range(100)
        )
        sched = ExplicitSchedule(graphs, tail=EVEN)
        assert not verify_uniform_connectivity(sched, 95, 10)

    def test_single_agent_trivially_connected(self):
        sched = PeriodicSchedule((empty_graph(1, 1),))
        assert verify_uniform_connectivity(sched, 10, 0)

    def test_random_schedule_guarantee(self):
        for seed in range(5):
            for T in (0, 1, 3):
                sched = RandomJointSchedule(4, 3, window=T, seed=seed)
                assert verify_uniform_connectivity(sched, 40, T)

    def test_random_schedule_reproducible(self):
        a = RandomJointSchedule(4, 2, window=2, seed=9)
        b = RandomJointSchedule(4, 2, window=2, seed=9)
        for t in (0, 3, 17):
            assert a.graph_at(t).arcs == b.graph_at(t).arcs
        assert a.graph_at(0).arcs != RandomJointSchedule(4, 2, 2, seed=10).graph_at(0).arcs
