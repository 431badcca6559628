import numpy as np
import pytest

from consensus_hulls import diagnostics as diag
from consensus_hulls.graphs import root_across, verify_uniform_connectivity
from consensus_hulls.hulls import ConvexSpec, WarpedSpec
from consensus_hulls.scenarios import (
    BUILTIN_SCENARIOS,
    builtin_scenario,
    evaluate_outcome,
    example4_counterexample,
    example4_schedule,
    jointly_connected_random,
    split_groups,
)
from consensus_hulls.warps import norm_rotation


class TestExample4:
    def test_schedule_arcs_verbatim(self):
        sched = example4_schedule()
        assert set(sched.graphs[0].triples()) == {(2, 1, 1), (1, 0, 2)}
        assert set(sched.graphs[1].triples()) == {(2, 1, 3), (3, 0, 2)}
        assert sched.n == 3 and sched.h == 2

    def test_root_in_every_two_step_window(self):
        sched = example4_schedule()
        for t in range(20):
            assert root_across(sched, t, 1) is not None

    def test_delayed_self_oscillates(self):
        scenario = example4_counterexample(True)
        assert scenario.policy.self_delay == 1
        trace = scenario.run(record=False)
        result = evaluate_outcome(trace, scenario.expected)
        assert result.passed
        assert result.details["gap"] > 0.01

    def test_compliant_anchor_reaches_consensus(self):
        scenario = example4_counterexample(False)
        assert scenario.policy.self_delay == 0
        trace = scenario.run(record=False)
        result = evaluate_outcome(trace, scenario.expected)
        assert result.passed
        assert result.details["final_spread"] < 1e-3

    def test_serialization_roundtrip_bit_exact(self):
        from consensus_hulls.config import scenario_from_dict, scenario_to_dict
        import yaml

        scenario = example4_counterexample(True)
        payload = yaml.safe_load(yaml.safe_dump(scenario_to_dict(scenario)))
        rebuilt = scenario_from_dict(payload)
        assert set(rebuilt.schedule.graphs[0].triples()) == {(2, 1, 1), (1, 0, 2)}
        a = scenario.run(record=False)
        b = rebuilt.run(record=False)
        assert (a.states == b.states).all()


class TestSplitGroups:
    def test_pair_never_moves(self):
        scenario = split_groups((1,), (2,), (0.0, 0.0), (1.0, 1.0), horizon=50)
        trace = scenario.run(record=False)
        assert (trace.states[:, 0, :, :] == [0.0, 0.0]).all()
        assert (trace.states[:, 1, :, :] == [1.0, 1.0]).all()
        result = evaluate_outcome(trace, scenario.expected)
        assert result.passed
        assert result.details["min_spread_seen"] >= np.sqrt(2) - 1e-12

    def test_observer_moves_while_groups_hold(self):
        # the observer starts off-center (the exact midpoint is a fixed
        # point of the centroid policy)
        scenario = split_groups(
            (1,), (2,), (0.0, 0.0), (1.0, 1.0), horizon=50, n=3,
            free_agent_positions={3: (0.25, 0.25)},
        )
        trace = scenario.run(record=False)
        assert (trace.states[:, 0, :, :] == [0.0, 0.0]).all()
        assert (trace.states[:, 1, :, :] == [1.0, 1.0]).all()
        observer = trace.states[:, 2, 0, :]
        assert not (observer == observer[0]).all()
        spreads = [diag.spread(trace.state_at(t)) for t in range(trace.horizon + 1)]
        assert min(spreads) >= np.sqrt(2) - 1e-12

    def test_internally_complete_group_stays_exactly(self):
        scenario = split_groups((1, 2), (3,), (0.0, 0.0), (3.0, 0.0), horizon=30, n=4)
        trace = scenario.run(record=False)
        for k in (1, 2):
            assert (trace.states[:, k - 1, :, :] == [0.0, 0.0]).all()

    def test_no_outside_information(self):
        from consensus_hulls.graphs import in_neighborhood

        scenario = split_groups((1, 2), (3,), (0.0, 0.0), (1.0, 0.0), n=5)
        graph = scenario.schedule.graph_at(0)
        assert in_neighborhood({1, 2}, graph) == set()
        assert in_neighborhood({3}, graph) == set()

    def test_overlapping_groups_rejected(self):
        with pytest.raises(ValueError):
            split_groups((1, 2), (2, 3), (0.0, 0.0), (1.0, 1.0))


class TestJointlyConnectedRandom:
    def test_schedule_satisfies_hypothesis(self):
        scenario = jointly_connected_random(4, 2, 3, 2, ConvexSpec(), seed=1)
        assert verify_uniform_connectivity(scenario.schedule, 60, 3)

    def test_consensus_convex_seed7(self):
        scenario = jointly_connected_random(3, 2, 2, 2, ConvexSpec(), seed=7)
        trace = scenario.run(record=False)
        result = evaluate_outcome(trace, scenario.expected)
        assert result.passed

    def test_consensus_warped(self):
        spec = WarpedSpec(ConvexSpec(), norm_rotation(0.04))
        scenario = jointly_connected_random(5, 3, 4, 2, spec, seed=2, horizon=2000)
        trace = scenario.run(record=False)
        result = evaluate_outcome(trace, scenario.expected)
        assert result.passed

    def test_default_horizon_is_fifty_windows(self):
        scenario = jointly_connected_random(3, 2, 2, 2, ConvexSpec(), seed=0)
        assert scenario.horizon == 50 * diag.decrease_window_length(3, 2, 2)


class TestBuiltins:
    @pytest.mark.parametrize("name", sorted(BUILTIN_SCENARIOS))
    def test_builtins_construct(self, name):
        scenario = builtin_scenario(name)
        assert scenario.initial.values.ndim == 3

    def test_unknown_builtin(self):
        with pytest.raises(ValueError):
            builtin_scenario("definitely-not-a-builtin")

    def test_two_agent_contraction_expected(self):
        scenario = builtin_scenario("two-agent-contraction")
        trace = scenario.run(record=False)
        assert evaluate_outcome(trace, scenario.expected).passed
