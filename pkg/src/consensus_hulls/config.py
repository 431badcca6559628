"""Declarative run configs: YAML parsing, validation and round-tripping.

A run config is a nested mapping with a ``scenario`` (inline or a builtin
name), top-level ``horizon``/``seed`` overrides, diagnostics toggles and
output options. ``validate_config`` returns a list of problems instead of
raising so the CLI can report them all at once; ``parse_config`` assumes a
valid mapping. ``scenario_to_dict(parse(...))`` is idempotent after the
first normalization, and serialized floats round-trip exactly (shortest
repr), so exported library fixtures rerun bit-identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .diagnostics import decrease_window_length
from .dynamics import SystemState, UpdatePolicy
from .graphs import (
    DelayGraph,
    ExplicitSchedule,
    PeriodicSchedule,
    RandomJointSchedule,
    Schedule,
)
from .hulls import (
    BoxSpec,
    ConvexSpec,
    DirectionalSpec,
    HullSpec,
    IntersectionSpec,
    WarpedSpec,
    validate_spec,
)
from .scenarios import (
    ConsensusExpected,
    Expected,
    OscillationExpected,
    PersistentSplitExpected,
    Scenario,
)
from .warps import WarpMap

# ---------------------------------------------------------------------------
# hull specs
# ---------------------------------------------------------------------------


def spec_to_dict(spec: HullSpec) -> dict:
    if isinstance(spec, ConvexSpec):
        return {"kind": "convex"}
    if isinstance(spec, BoxSpec):
        out: dict[str, Any] = {"kind": "box"}
        if spec.basis is not None:
            out["basis"] = [list(row) for row in spec.basis]
        return out
    if isinstance(spec, DirectionalSpec):
        return {
            "kind": "directional",
            "normals": [list(row) for row in spec.normals],
            "mode": spec.mode,
        }
    if isinstance(spec, WarpedSpec):
        return {
            "kind": "warped",
            "inner": spec_to_dict(spec.inner),
            "warp": {"name": spec.warp.name, "rate": spec.warp.rate},
        }
    if isinstance(spec, IntersectionSpec):
        return {
            "kind": "intersection",
            "left": spec_to_dict(spec.left),
            "right": spec_to_dict(spec.right),
        }
    raise TypeError(f"unknown spec {type(spec).__name__}")


def spec_from_dict(data: dict) -> HullSpec:
    kind = data.get("kind")
    if kind == "convex":
        return ConvexSpec()
    if kind == "box":
        basis = data.get("basis")
        return BoxSpec(tuple(tuple(row) for row in basis) if basis is not None else None)
    if kind == "directional":
        normals = data.get("normals")
        spec_kwargs = {"mode": data.get("mode", "max")}
        if normals is not None:
            spec_kwargs["normals"] = tuple(tuple(row) for row in normals)
        return DirectionalSpec(**spec_kwargs)
    if kind == "warped":
        warp = data.get("warp", {})
        return WarpedSpec(
            inner=spec_from_dict(data.get("inner", {"kind": "convex"})),
            warp=WarpMap(warp.get("name", "identity"), float(warp.get("rate", 0.0))),
        )
    if kind == "intersection":
        return IntersectionSpec(
            left=spec_from_dict(data["left"]),
            right=spec_from_dict(data["right"]),
        )
    raise ValueError(f"unknown hull kind {kind!r}")


# ---------------------------------------------------------------------------
# policies, schedules, expected outcomes
# ---------------------------------------------------------------------------


def policy_to_dict(policy: UpdatePolicy) -> dict:
    return {
        "type": policy.kind,
        "step_fraction": policy.step_fraction,
        "self_delay": policy.self_delay,
    }


def policy_from_dict(data: dict) -> UpdatePolicy:
    return UpdatePolicy(
        kind=data.get("type", "shrink_to_centroid"),
        step_fraction=float(data.get("step_fraction", 0.5)),
        self_delay=int(data.get("self_delay", 0)),
    )


def _graph_to_triples(graph: DelayGraph) -> list[list[int]]:
    return [list(t) for t in graph.triples()]


def schedule_to_dict(schedule: Schedule) -> dict:
    if isinstance(schedule, PeriodicSchedule):
        return {
            "type": "periodic",
            "graphs": [_graph_to_triples(g) for g in schedule.graphs],
        }
    if isinstance(schedule, ExplicitSchedule):
        return {
            "type": "explicit",
            "graphs": [_graph_to_triples(g) for g in schedule.graphs],
            "tail": _graph_to_triples(schedule.tail),
        }
    if isinstance(schedule, RandomJointSchedule):
        return {
            "type": "jointly_connected_random",
            "window": schedule.window,
            "seed": schedule.seed,
            "arc_rate": schedule.arc_rate,
        }
    raise TypeError(f"unknown schedule {type(schedule).__name__}")


def schedule_from_dict(data: dict, n: int, h: int) -> Schedule:
    kind = data.get("type", "periodic")
    if kind == "periodic":
        graphs = tuple(
            DelayGraph.from_triples(n, h, [tuple(a) for a in arcs])
            for arcs in data.get("graphs", [[]])
        )
        return PeriodicSchedule(graphs)
    if kind == "explicit":
        graphs = tuple(
            DelayGraph.from_triples(n, h, [tuple(a) for a in arcs])
            for arcs in data.get("graphs", [])
        )
        tail = DelayGraph.from_triples(n, h, [tuple(a) for a in data.get("tail", [])])
        return ExplicitSchedule(graphs, tail)
    if kind == "jointly_connected_random":
        return RandomJointSchedule(
            n, h,
            window=int(data.get("window", 0)),
            seed=int(data.get("seed", 0)),
            arc_rate=float(data.get("arc_rate", 0.25)),
        )
    raise ValueError(f"unknown schedule type {kind!r}")


def expected_to_dict(expected: Expected) -> dict:
    if isinstance(expected, ConsensusExpected):
        return {"outcome": "consensus", "tol": expected.tol}
    if isinstance(expected, PersistentSplitExpected):
        return {
            "outcome": "persistent_split",
            "min_spread": expected.min_spread,
            "groups": [list(g) for g in expected.groups],
        }
    if isinstance(expected, OscillationExpected):
        return {
            "outcome": "oscillation",
            "agent": expected.agent,
            "gap": expected.gap,
            "window": expected.window,
            "settle_tol": expected.settle_tol,
        }
    raise TypeError(f"unknown expected outcome {type(expected).__name__}")


def expected_from_dict(data: dict) -> Expected:
    outcome = data.get("outcome")
    if outcome == "consensus":
        return ConsensusExpected(tol=float(data.get("tol", 1e-3)))
    if outcome == "persistent_split":
        return PersistentSplitExpected(
            min_spread=float(data.get("min_spread", 0.0)),
            groups=tuple(tuple(int(k) for k in g) for g in data.get("groups", [])),
        )
    if outcome == "oscillation":
        return OscillationExpected(
            agent=int(data.get("agent", 2)),
            gap=float(data.get("gap", 0.01)),
            window=int(data.get("window", 200)),
            settle_tol=float(data.get("settle_tol", 1e-6)),
        )
    raise ValueError(f"unknown expected outcome {outcome!r}")


# ---------------------------------------------------------------------------
# scenarios and run configs
# ---------------------------------------------------------------------------


def _initial_to_list(state: SystemState) -> list:
    return state.values.tolist()


def _initial_from_list(data: list, h: int) -> SystemState:
    agents = []
    for entry in data:
        arr = np.asarray(entry, dtype=np.float64)
        if arr.ndim == 1:
            arr = np.repeat(arr[None, :], h, axis=0)
        agents.append(arr)
    return SystemState(np.stack(agents))


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "agents": scenario.initial.n,
        "delay_horizon": scenario.initial.h,
        "space_dim": scenario.initial.p,
        "initial": _initial_to_list(scenario.initial),
        "schedule": schedule_to_dict(scenario.schedule),
        "hull": spec_to_dict(scenario.spec),
        "policy": policy_to_dict(scenario.policy),
        "expected": expected_to_dict(scenario.expected),
        "horizon": scenario.horizon,
        "seed": scenario.seed,
    }


def scenario_from_dict(data: dict) -> Scenario:
    if "builtin" in data:
        from .scenarios import builtin_scenario

        scenario = builtin_scenario(data["builtin"])
    else:
        h = int(data["delay_horizon"])
        initial = _initial_from_list(data["initial"], h)
        scenario = Scenario(
            name=str(data.get("name", "scenario")),
            initial=initial,
            schedule=schedule_from_dict(data.get("schedule", {}), initial.n, h),
            spec=spec_from_dict(data.get("hull", {"kind": "convex"})),
            policy=policy_from_dict(data.get("policy", {})),
            horizon=int(data.get("horizon", 100)),
            seed=int(data.get("seed", 0)),
            expected=expected_from_dict(data.get("expected", {"outcome": "consensus"})),
        )
    return scenario


@dataclass
class DiagnosticsConfig:
    monotone: bool = True
    window_decrease: bool = False
    window_T: int = 0
    exit_counts: bool = False
    exit_t0: tuple[int, ...] = (0,)
    stability: bool = False

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "window_decrease": self.window_decrease,
            "window_T": self.window_T,
            "exit_counts": self.exit_counts,
            "exit_t0": list(self.exit_t0),
            "stability": self.stability,
        }


@dataclass
class RunConfig:
    scenario: Scenario
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    output_dir: str = "out"
    plot: bool = False

    def to_dict(self) -> dict:
        return {
            "scenario": scenario_to_dict(self.scenario),
            "horizon": self.scenario.horizon,
            "seed": self.scenario.seed,
            "diagnostics": self.diagnostics.to_dict(),
            "output": {"directory": self.output_dir, "plot": self.plot},
        }


def parse_config(data: dict) -> RunConfig:
    """Build a RunConfig from a validated mapping."""
    scenario = scenario_from_dict(data.get("scenario", {}))
    if "horizon" in data:
        scenario.horizon = int(data["horizon"])
    if "seed" in data:
        scenario.seed = int(data["seed"])
    diag_data = data.get("diagnostics", {})
    diagnostics = DiagnosticsConfig(
        monotone=bool(diag_data.get("monotone", True)),
        window_decrease=bool(diag_data.get("window_decrease", False)),
        window_T=int(diag_data.get("window_T", 0)),
        exit_counts=bool(diag_data.get("exit_counts", False)),
        exit_t0=tuple(int(t) for t in diag_data.get("exit_t0", [0])),
        stability=bool(diag_data.get("stability", False)),
    )
    output = data.get("output", {})
    return RunConfig(
        scenario=scenario,
        diagnostics=diagnostics,
        output_dir=str(output.get("directory", "out")),
        plot=bool(output.get("plot", False)),
    )


def validate_config(data: Any) -> list[str]:
    """Schema and cross-field checks; empty list means valid."""
    errors: list[str] = []
    if not isinstance(data, dict):
        return ["config must be a mapping"]
    scen = data.get("scenario")
    if not isinstance(scen, dict):
        return ["config needs a 'scenario' mapping"]
    if "builtin" in scen:
        from .scenarios import BUILTIN_SCENARIOS

        if scen["builtin"] not in BUILTIN_SCENARIOS:
            errors.append(
                f"unknown builtin {scen['builtin']!r}; "
                f"known: {', '.join(sorted(BUILTIN_SCENARIOS))}"
            )
            return errors
        scenario = scenario_from_dict(scen)
        n, h, p = scenario.initial.n, scenario.initial.h, scenario.initial.p
        spec = scenario.spec
        policy = scenario.policy
    else:
        for key in ("agents", "delay_horizon", "initial"):
            if key not in scen:
                errors.append(f"scenario is missing {key!r}")
        if errors:
            return errors
        n = int(scen["agents"])
        h = int(scen["delay_horizon"])
        p = int(scen.get("space_dim", 2))
        if n < 1:
            errors.append("agents must be >= 1")
        if h < 1:
            errors.append("delay_horizon must be >= 1")
        try:
            initial = _initial_from_list(scen["initial"], h)
            if initial.n != n or initial.h != h or initial.p != p:
                errors.append(
                    f"initial state has shape {initial.values.shape}, "
                    f"expected ({n}, {h}, {p})"
                )
        except (ValueError, TypeError) as exc:
            errors.append(f"bad initial state: {exc}")
        try:
            spec = spec_from_dict(scen.get("hull", {"kind": "convex"}))
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(f"bad hull spec: {exc}")
            spec = None
        try:
            policy = policy_from_dict(scen.get("policy", {}))
        except ValueError as exc:
            errors.append(f"bad policy: {exc}")
            policy = None
        try:
            schedule_from_dict(scen.get("schedule", {}), n, h)
        except (ValueError, TypeError) as exc:
            errors.append(f"bad schedule: {exc}")
        try:
            expected_from_dict(scen.get("expected", {"outcome": "consensus"}))
        except ValueError as exc:
            errors.append(f"bad expected outcome: {exc}")
    if spec is not None:
        for problem in validate_spec(spec, p):
            errors.append(f"hull spec: {problem}")
        if isinstance(spec, WarpedSpec) and not math.isfinite(spec.warp.rate):
            errors.append("warp rate must be finite")
    if policy is not None and policy.self_delay >= h:
        errors.append(
            f"policy self_delay {policy.self_delay} must be < delay_horizon {h}"
        )
    horizon = data.get("horizon", scen.get("horizon", 100))
    try:
        horizon = int(horizon)
        if horizon < 0:
            errors.append("horizon must be >= 0")
    except (TypeError, ValueError):
        errors.append("horizon must be an integer")
        horizon = None
    diag = data.get("diagnostics", {})
    if isinstance(diag, dict) and diag.get("window_decrease"):
        T = int(diag.get("window_T", 0))
        window = decrease_window_length(n, h, T)
        if horizon is not None and horizon < window:
            errors.append(
                f"window_decrease needs horizon >= {window} "
                f"(= (n-1)^2 (h + T) with n={n}, h={h}, T={T}), got {horizon}"
            )
    return errors


def load_config_file(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    return data if data is not None else {}


def dump_config(data: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(data, fh, sort_keys=False)
