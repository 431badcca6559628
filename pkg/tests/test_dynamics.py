import numpy as np
import pytest

from consensus_hulls.dynamics import (
    SystemState,
    UpdatePolicy,
    decision_hull,
    received_set,
    select_update,
    simulate,
    step,
)
from consensus_hulls.graphs import DelayGraph, PeriodicSchedule, empty_graph
from consensus_hulls.hulls import (
    BoxSpec,
    ConvexSpec,
    DirectionalSpec,
    IntersectionSpec,
    WarpedSpec,
    build_hull,
)
from consensus_hulls.warps import norm_rotation

CENTROID = UpdatePolicy("shrink_to_centroid", 0.5, 0)
RANDOM = UpdatePolicy("random_interior", 0.5, 0)

ALL_SPECS = [
    ConvexSpec(),
    BoxSpec(),
    DirectionalSpec(),
    WarpedSpec(ConvexSpec(), norm_rotation(0.04)),
    IntersectionSpec(BoxSpec(), DirectionalSpec()),
]

COMPLETE_2 = DelayGraph.from_triples(2, 1, [(1, 0, 2), (2, 0, 1)])


class TestSystemState:
    def test_from_positions_fills_slots(self):
        st = SystemState.from_positions([(1, 2), (3, 4)], h=3)
        assert st.values.shape == (2, 3, 2)
        assert (st.values[0] == [1, 2]).all()

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SystemState(np.full((1, 1, 2), np.nan))

    def test_immutable(self):
        st = SystemState.from_positions([(1, 2)], h=1)
        with pytest.raises(ValueError):
            st.values[0, 0, 0] = 9.0


class TestReceivedSet:
    def test_no_neighbors(self):
        st = SystemState.from_positions([(0, 0), (5, 5)], h=1)
        r = received_set(st, empty_graph(2, 1), 1)
        assert r.points.tolist() == [[0.0, 0.0]]

    def test_delayed_neighbor(self):
        st = SystemState(np.array([
            [[0.0, 0.0], [1.0, 1.0]],
            [[9.0, 9.0], [5.0, 5.0]],
        ]))
        g = DelayGraph.from_triples(2, 2, [(2, 1, 1)])
        r = received_set(st, g, 1, self_delay=0)
        assert r.points.tolist() == [[0.0, 0.0], [5.0, 5.0]]

    def test_all_equal_collapses(self):
        st = SystemState.from_positions([(1, 1), (1, 1)], h=1)
        r = received_set(st, COMPLETE_2, 1)
        assert r.is_singleton()

    def test_self_delay_selects_slot(self):
        st = SystemState(np.array([[[0.0, 0.0], [7.0, 7.0]]]))
        r = received_set(st, empty_graph(1, 2), 1, self_delay=1)
        assert r.points.tolist() == [[7.0, 7.0]]


class TestDecisionHull:
    def test_singleton_forces_stay(self):
        hull = decision_hull(ConvexSpec(), received_set(
            SystemState.from_positions([(2, 3)], h=1), empty_graph(1, 1), 1))
        assert hull.is_singleton

    def test_segment(self):
        st = SystemState.from_positions([(0, 0), (2, 0)], h=1)
        r = received_set(st, COMPLETE_2, 1)
        hull = decision_hull(ConvexSpec(), r)
        assert hull.in_relative_interior((1.0, 0.0), 0.0)
        assert not hull.in_relative_interior((0.0, 0.0), 0.0)


class TestSelectUpdate:
    def test_singleton_returns_self(self):
        st = SystemState.from_positions([(1, 1)], h=1)
        r = received_set(st, empty_graph(1, 1), 1)
        hull = decision_hull(ConvexSpec(), r)
        out = select_update(CENTROID, hull, r, np.array([1.0, 1.0]))
        assert out.tolist() == [1.0, 1.0]

    def test_centroid_step_segment(self):
        r = decision = None
        st = SystemState.from_positions([(0, 0), (2, 0)], h=1)
        r = received_set(st, COMPLETE_2, 1)
        hull = decision_hull(ConvexSpec(), r)
        out = select_update(CENTROID, hull, r, np.array([0.0, 0.0]))
        assert np.allclose(out, [0.5, 0.0], atol=1e-15)
        assert hull.in_relative_interior(out, 0.0)

    def test_centroid_step_triangle(self):
        pts = np.array([(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)])
        from consensus_hulls.geometry import PointSet

        r = PointSet(pts)
        hull = decision_hull(ConvexSpec(), r)
        out = select_update(CENTROID, hull, r, np.array([0.0, 0.0]))
        assert np.allclose(out, [1.0 / 3.0, 1.0 / 3.0], atol=1e-12)
        assert hull.in_relative_interior(out, 0.0)

    def test_boundary_centroid_falls_back_to_interior(self):
        # directional hull of a horizontal pair: the received centroid lies
        # exactly on the hull boundary, so the fallback must kick in
        from consensus_hulls.geometry import PointSet

        r = PointSet([(0.0, 0.0), (1.0, 0.0)])
        hull = decision_hull(DirectionalSpec(), r)
        out = select_update(CENTROID, hull, r, np.array([0.0, 0.0]))
        assert hull.in_relative_interior(out, 0.0)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind)
    def test_updates_strictly_interior(self, spec):
        from consensus_hulls.geometry import PointSet

        rng = np.random.default_rng(17)
        for _ in range(40):
            pts = rng.uniform(-5, 5, size=(rng.integers(2, 7), 2))
            r = PointSet(pts)
            hull = decision_hull(spec, r)
            self_point = r.points[rng.integers(0, len(r))]
            for policy in (CENTROID, RANDOM):
                out = select_update(policy, hull, r, self_point, rng)
                assert hull.contains(out, 1e-9)
                assert hull.in_relative_interior(out, 0.0)


class TestStep:
    def test_empty_graph_shifts_only(self):
        st = SystemState(np.array([[[1.0, 2.0], [3.0, 4.0]]]))
        new, rec = step(st, empty_graph(1, 2), ConvexSpec(), CENTROID)
        assert new.values[0, 0].tolist() == [1.0, 2.0]
        assert new.values[0, 1].tolist() == [1.0, 2.0]

    def test_two_agent_symmetric(self):
        st = SystemState.from_positions([(0, 0), (2, 0)], h=1)
        new, rec = step(st, COMPLETE_2, ConvexSpec(), CENTROID)
        assert np.allclose(new.values[0, 0], [0.5, 0.0], atol=1e-15)
        assert np.allclose(new.values[1, 0], [1.5, 0.0], atol=1e-15)

    def test_consensus_is_fixed_point(self):
        st = SystemState.from_positions([(3, 3), (3, 3), (3, 3)], h=2)
        g = DelayGraph.from_triples(3, 2, [(1, 0, 2), (2, 1, 3), (3, 0, 1)])
        new, _ = step(st, g, ConvexSpec(), CENTROID)
        assert (new.values == st.values).all()

    def test_shift_rule_bit_exact(self):
        rng = np.random.default_rng(3)
        st = SystemState(rng.uniform(-5, 5, size=(3, 3, 2)))
        g = DelayGraph.from_triples(3, 3, [(1, 2, 2), (2, 0, 1), (3, 1, 1)])
        new, _ = step(st, g, ConvexSpec(), CENTROID)
        assert (new.values[:, 1:, :] == st.values[:, :-1, :]).all()


class TestSimulate:
    def _schedule(self):
        return PeriodicSchedule((COMPLETE_2,))

    def test_horizon_zero(self):
        init = SystemState.from_positions([(0, 0), (2, 0)], h=1)
        tr = simulate(init, self._schedule(), ConvexSpec(), CENTROID, 0)
        assert tr.horizon == 0
        assert (tr.states[0] == init.values).all()

    def test_consensus_initial_constant(self):
        init = SystemState.from_positions([(1, 1), (1, 1)], h=1)
        tr = simulate(init, self._schedule(), ConvexSpec(), CENTROID, 20)
        assert (tr.states == tr.states[0]).all()

    def test_spread_halves_per_step(self):
        # closed form for the symmetric two-agent run: each agent moves
        # halfway to the midpoint, so the spread halves every step
        init = SystemState.from_positions([(0, 0), (2, 0)], h=1)
        tr = simulate(init, self._schedule(), ConvexSpec(), CENTROID, 30)
        gaps = np.linalg.norm(tr.states[:, 0, 0, :] - tr.states[:, 1, 0, :], axis=1)
        expect = 2.0 * 0.5 ** np.arange(31)
        assert np.allclose(gaps, expect, rtol=1e-12)

    def test_shift_invariant_along_trace(self):
        init = SystemState.from_positions([(0, 0), (2, 0), (1, 4)], h=2)
        g = DelayGraph.from_triples(3, 2, [(1, 1, 2), (2, 0, 3), (3, 1, 1)])
        tr = simulate(init, PeriodicSchedule((g,)), ConvexSpec(), CENTROID, 40)
        for t in range(40):
            assert (tr.states[t + 1][:, 1:, :] == tr.states[t][:, :-1, :]).all()

    @pytest.mark.parametrize("policy", [CENTROID, RANDOM], ids=lambda p: p.kind)
    def test_deterministic_given_seed(self, policy):
        init = SystemState.from_positions([(0, 0), (2, 0), (1, 4)], h=2)
        g = DelayGraph.from_triples(3, 2, [(1, 1, 2), (2, 0, 3), (3, 1, 1)])
        sched = PeriodicSchedule((g,))
        a = simulate(init, sched, ConvexSpec(), policy, 50, seed=42)
        b = simulate(init, sched, ConvexSpec(), policy, 50, seed=42)
        assert (a.states == b.states).all()

    def test_decision_containment_recorded(self):
        init = SystemState.from_positions([(0, 0), (2, 0), (1, 4)], h=2)
        g = DelayGraph.from_triples(3, 2, [(1, 1, 2), (2, 0, 3), (3, 1, 1)])
        tr = simulate(init, PeriodicSchedule((g,)), ConvexSpec(), CENTROID, 30)
        for t, rec in enumerate(tr.records):
            for k in range(3):
                received = rec.received[k]
                update = rec.updates[k]
                hull = build_hull(ConvexSpec(), received)
                assert hull.contains(update, 1e-9)
                if not received.is_singleton():
                    assert hull.in_relative_interior(update, 0.0)
