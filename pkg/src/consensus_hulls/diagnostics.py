"""Trace diagnostics: the set-valued Lyapunov hull and its decrease properties.

The Lyapunov hull at time t is the hull (under the run's spec) of every
slot value in the delayed state — present and past positions of all
agents, deduplicated. Along any compliant solution it can only shrink
under inclusion; with joint connectivity its geodesic diameter must
strictly decrease over windows of length ``(n-1)^2 (h + T)``.

Numeric conventions: hull-inclusion checks run at the caller's tolerance
(default 1e-9); a state counts as "spread out" when its point diameter
exceeds ``SPREAD_TOL``; exit-set membership uses ``EXIT_TOL``. Diameter
comparisons for warped kinds allow ``WARPED_MU_SLACK`` on strict
inequalities, because their diameter is a sampling approximation; exact
kinds get no slack.

All checks are read-only over immutable traces; window checks for
distinct start times are independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SystemState, Trace
from .geometry import PointSet, euclidean_diameter
from .hulls import Hull, HullSpec, WarpedSpec, build_hull, hull_subset

SPREAD_TOL = 1e-7
EXIT_TOL = 1e-9
WARPED_MU_SLACK = 1e-6

# trace-scale sampling resolution for warped diameters; coarser than the
# one-off defaults because a trace needs one evaluation per step
TRACE_EDGE_SAMPLES = 8
TRACE_PATH_SAMPLES = 128


def project_state(state: SystemState) -> PointSet:
    """All n*h slot values of the delayed state, exact duplicates removed.

    Projection keeps sub-tolerance extent (dedup tolerance 0) so that
    Lyapunov hulls of near-consensus states are not flattened; collapsing
    them would manufacture inclusion failures at the 1e-9 check tolerance.
    """
    return PointSet(state.values.reshape(-1, state.p), tol=0.0)


def lyapunov_hull(state: SystemState, spec: HullSpec) -> Hull:
    return build_hull(spec, project_state(state))


def spread(state: SystemState) -> float:
    """Euclidean diameter of the projected state."""
    return euclidean_diameter(project_state(state))


def mu_slack(spec: HullSpec) -> float:
    return WARPED_MU_SLACK if isinstance(spec, WarpedSpec) else 0.0


def decrease_window_length(n: int, h: int, T: int) -> int:
    """Window after which the Lyapunov diameter must strictly decrease:
    (n - 1)^2 * (h + T)."""
    return (n - 1) ** 2 * (h + T)


@dataclass
class DecreaseReport:
    windows_checked: int = 0
    violations: list = field(default_factory=list)
    min_drop: float | None = None
    beta_estimate: float | None = None

    @property
    def passed(self) -> bool:
        return not self.violations


def check_monotone(trace: Trace, spec: HullSpec | None = None,
                   tol: float = 1e-9) -> DecreaseReport:
    """Verify the Lyapunov hull never grows: hull(t+1) contained in hull(t)."""
    spec = spec or trace.spec
    report = DecreaseReport()
    prev = lyapunov_hull(trace.state_at(0), spec)
    for t in range(1, trace.horizon + 1):
        cur = lyapunov_hull(trace.state_at(t), spec)
        report.windows_checked += 1
        if not hull_subset(cur, prev, tol):
            report.violations.append((t, "hull at t not contained in hull at t-1"))
        prev = cur
    return report


def diameter_trace(trace: Trace, spec: HullSpec | None = None,
                   edge_samples: int = TRACE_EDGE_SAMPLES,
                   path_samples: int = TRACE_PATH_SAMPLES) -> np.ndarray:
    """Geodesic diameter of the Lyapunov hull at every step."""
    spec = spec or trace.spec
    out = np.empty(trace.horizon + 1)
    for t in range(trace.horizon + 1):
        state = trace.state_at(t)
        points = project_state(state)
        if points.is_singleton():
            out[t] = 0.0
        else:
            out[t] = build_hull(spec, points).geodesic_diameter(edge_samples, path_samples)
    return out


def check_window_decrease(trace: Trace, T: int, spec: HullSpec | None = None,
                          diameters: np.ndarray | None = None,
                          spread_tol: float = SPREAD_TOL) -> DecreaseReport:
    """Strict diameter decrease over every full window of length (n-1)^2 (h+T).

    Windows whose starting state has spread at most ``spread_tol`` are
    vacuous (the state is already at consensus scale) and skipped. Warped
    kinds get a small additive slack on the strict inequality to absorb
    sampling noise in the diameter approximation.
    """
    spec = spec or trace.spec
    window = decrease_window_length(trace.n, trace.h, T)
    if trace.horizon < window:
        raise ValueError(
            f"trace horizon {trace.horizon} shorter than the decrease window {window}"
        )
    if diameters is None:
        diameters = diameter_trace(trace, spec)
    slack = mu_slack(spec)
    report = DecreaseReport()
    drops = []
    for t0 in range(0, trace.horizon - window + 1):
        if spread(trace.state_at(t0)) <= spread_tol:
            continue
        report.windows_checked += 1
        drop = diameters[t0] - diameters[t0 + window]
        drops.append(drop)
        if not (diameters[t0 + window] < diameters[t0] + slack):
            report.violations.append(
                (t0, f"diameter {diameters[t0 + window]:.6g} did not drop from "
                     f"{diameters[t0]:.6g} over window {window}")
            )
    if drops:
        report.min_drop = float(min(drops))
        report.beta_estimate = report.min_drop
    return report


def exit_counts(trace: Trace, t0: int, spec: HullSpec | None = None,
                tol: float = EXIT_TOL) -> np.ndarray:
    """Per-agent counts of agents still on the critical boundary seen from t0.

    Entry [s, k-1] counts the agents whose position at time t0 + s lies in
    the exit set of agent k's position at t0, relative to the hull of the
    projected state at t0. Each count starts at most n - 1: an agent's own
    anchor point never belongs to its exit set.
    """
    spec = spec or trace.spec
    state0 = trace.state_at(t0)
    if spread(state0) <= SPREAD_TOL:
        raise ValueError("exit counts need a non-singleton state at t0")
    hull0 = lyapunov_hull(state0, spec)
    anchors = state0.current()
    steps = trace.horizon - t0 + 1
    out = np.zeros((steps, trace.n), dtype=np.int64)
    for s in range(steps):
        positions = trace.state_at(t0 + s).current()
        for k in range(trace.n):
            count = 0
            for j in range(trace.n):
                if hull0.exit_set_contains(anchors[k], positions[j], tol):
                    count += 1
            out[s, k] = count
    return out


def check_exit_counts_monotone(trace: Trace, t0: int,
                               spec: HullSpec | None = None) -> bool:
    """True iff every agent's exit count is nonincreasing from t0 on."""
    counts = exit_counts(trace, t0, spec)
    return bool((np.diff(counts, axis=0) <= 0).all())


@dataclass
class StabilityReport:
    """Trace-level verification of the set-valued Lyapunov conditions.

    ``positions_ok`` — every current position lies in its own Lyapunov
    hull; ``nesting`` — the one-step inclusion report; ``window`` — the
    strict-decrease report whose minimum drop doubles as the empirical
    decrease-rate estimate (positive iff every checked window dropped).
    """

    positions_ok: bool
    position_violations: list
    nesting: DecreaseReport
    window: DecreaseReport | None

    @property
    def passed(self) -> bool:
        window_ok = self.window is None or self.window.passed
        return self.positions_ok and self.nesting.passed and window_ok


def check_stability_conditions(trace: Trace, T: int | None = None,
                               spec: HullSpec | None = None,
                               tol: float = 1e-9) -> StabilityReport:
    spec = spec or trace.spec
    position_violations = []
    for t in range(trace.horizon + 1):
        state = trace.state_at(t)
        hull = lyapunov_hull(state, spec)
        for k in range(1, trace.n + 1):
            if not hull.contains(state.position(k), tol):
                position_violations.append((t, k))
    nesting = check_monotone(trace, spec, tol)
    window = None
    if T is not None:
        window = check_window_decrease(trace, T, spec)
    return StabilityReport(
        positions_ok=not position_violations,
        position_violations=position_violations,
        nesting=nesting,
        window=window,
    )
