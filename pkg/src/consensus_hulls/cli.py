"""Command-line harness: run scenarios from config files, emit traces and reports.

Subcommands: ``run``, ``validate``, ``batch``, ``list-builtins``.

Exit codes: 0 expected outcome met and no diagnostic violations; 1 the
expected outcome was not met; 2 config or validation error; 3 a diagnostic
check (hull inclusion, window decrease, exit-count monotonicity) reported a
violation. ``CONSENSUS_HULLS_OUTPUT_ROOT`` prefixes relative output
directories.

Artifacts per run: ``trace.csv`` with one row per (t, agent, slot) at 17
significant digits (bit-stable across repeated runs with the same config
and seed), ``report.json`` with the diameter series and all diagnostic
results, and optionally ``plot.svg``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .config import (
    RunConfig,
    load_config_file,
    parse_config,
    validate_config,
)
from .dynamics import Trace
from .scenarios import BUILTIN_SCENARIOS, BUILTIN_SUMMARIES, evaluate_outcome

OUTPUT_ROOT_ENV = "CONSENSUS_HULLS_OUTPUT_ROOT"


def _resolve_output_dir(directory: str) -> Path:
    path = Path(directory)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


def write_trace_csv(trace: Trace, path: Path) -> None:
    p = trace.p
    header = "t,agent,slot," + ",".join(f"x{i}" for i in range(p))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for t in range(trace.horizon + 1):
            for agent in range(1, trace.n + 1):
                for slot in range(trace.h):
                    coords = trace.states[t, agent - 1, slot]
                    cells = ",".join(f"{c:.17g}" for c in coords)
                    fh.write(f"{t},{agent},{slot},{cells}\n")


def write_plot(trace: Trace, diameters: np.ndarray, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_traj, ax_mu) = plt.subplots(1, 2, figsize=(10, 4.5))
    for agent in range(1, trace.n + 1):
        xy = trace.states[:, agent - 1, 0, :]
        if trace.p == 2:
            ax_traj.plot(xy[:, 0], xy[:, 1], label=f"agent {agent}", lw=0.8)
            ax_traj.scatter([xy[0, 0]], [xy[0, 1]], marker="o", s=18)
            ax_traj.scatter([xy[-1, 0]], [xy[-1, 1]], marker="x", s=24)
        else:
            ax_traj.plot(xy[:, 0], label=f"agent {agent}", lw=0.8)
    ax_traj.set_title("trajectories")
    ax_traj.legend(fontsize=7)
    ax_mu.plot(diameters)
    ax_mu.set_title("Lyapunov hull diameter")
    ax_mu.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def execute_run(cfg: RunConfig) -> tuple[int, dict]:
    """Run one scenario with its diagnostics. Returns (exit_code, report)."""
    scenario = cfg.scenario
    trace = scenario.run()
    outcome = evaluate_outcome(trace, scenario.expected)
    report: dict = {
        "name": scenario.name,
        "horizon": scenario.horizon,
        "seed": scenario.seed,
        "config": cfg.to_dict(),
        "final_spread": diag.spread(trace.state_at(trace.horizon)),
        "outcome": {
            "expected": outcome.expected,
            "detected": outcome.detected,
            "passed": outcome.passed,
            "details": outcome.details,
        },
    }
    diameters = diag.diameter_trace(trace)
    report["diameters"] = [float(v) for v in diameters]
    violations = False
    if cfg.diagnostics.monotone:
        mono = diag.check_monotone(trace)
        report["monotone"] = {
            "steps_checked": mono.windows_checked,
            "violations": [[t, msg] for (t, msg) in mono.violations],
        }
        violations = violations or not mono.passed
    if cfg.diagnostics.window_decrease:
        wd = diag.check_window_decrease(trace, cfg.diagnostics.window_T,
                                        diameters=diameters)
        report["window_decrease"] = {
            "windows_checked": wd.windows_checked,
            "violations": [[t, msg] for (t, msg) in wd.violations],
            "min_drop": wd.min_drop,
            "beta_estimate": wd.beta_estimate,
        }
        violations = violations or not wd.passed
    if cfg.diagnostics.exit_counts:
        counts_report = {}
        monotone_report = {}
        for t0 in cfg.diagnostics.exit_t0:
            counts = diag.exit_counts(trace, t0)
            counts_report[str(t0)] = counts.tolist()
            monotone_report[str(t0)] = bool((np.diff(counts, axis=0) <= 0).all())
        report["exit_counts"] = counts_report
        report["exit_counts_monotone"] = monotone_report
        violations = violations or not all(monotone_report.values())
    if cfg.diagnostics.stability:
        stab = diag.check_stability_conditions(
            trace,
            cfg.diagnostics.window_T if cfg.diagnostics.window_decrease else None,
        )
        report["stability"] = {
            "positions_ok": stab.positions_ok,
            "nesting_ok": stab.nesting.passed,
            "window_ok": stab.window.passed if stab.window is not None else None,
            "beta_estimate": stab.window.beta_estimate if stab.window is not None else None,
        }
        violations = violations or not stab.passed

    if not outcome.passed:
        code = 1
    elif violations:
        code = 3
    else:
        code = 0
    report["diagnostic_violations"] = violations
    report["exit_code"] = code

    out_dir = _resolve_output_dir(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out_dir / "trace.csv")
    if cfg.plot:
        write_plot(trace, diameters, out_dir / "plot.svg")
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return code, report


def _error_record(problems: list[str]) -> str:
    return json.dumps({"error": "config validation failed", "diagnostics": problems})


def _load_and_validate(path: str) -> tuple[RunConfig | None, list[str]]:
    try:
        data = load_config_file(path)
    except (OSError, ValueError) as exc:
        return None, [f"cannot read config {path}: {exc}"]
    problems = validate_config(data)
    if problems:
        return None, problems
    return parse_config(data), []


def _cmd_run(args) -> int:
    cfg, problems = _load_and_validate(args.config)
    if cfg is None:
        print(_error_record(problems), file=sys.stderr)
        return 2
    if args.output:
        cfg.output_dir = args.output
    if args.plot:
        cfg.plot = True
    code, report = execute_run(cfg)
    print(
        f"{report['name']}: outcome={report['outcome']['detected']} "
        f"expected={report['outcome']['expected']} "
        f"final_spread={report['final_spread']:.3g} exit={code}"
    )
    return code


def _cmd_validate(args) -> int:
    try:
        data = load_config_file(args.config)
    except (OSError, ValueError) as exc:
        print(_error_record([f"cannot read config: {exc}"]), file=sys.stderr)
        return 2
    problems = validate_config(data)
    if problems:
        print(_error_record(problems), file=sys.stderr)
        return 2
    print("ok")
    return 0


def _batch_worker(item: tuple[str, str]) -> tuple[str, int]:
    path, out_dir = item
    cfg, problems = _load_and_validate(path)
    if cfg is None:
        sys.stderr.write(_error_record(problems) + "\n")
        return path, 2
    cfg.output_dir = out_dir
    code, _ = execute_run(cfg)
    return path, code


def _cmd_batch(args) -> int:
    root = Path(args.output_root)
    items = []
    for path in args.configs:
        stem = Path(path).stem
        items.append((path, str(root / stem)))
    results: dict[str, int] = {}
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        for path, code in pool.map(_batch_worker, items):
            results[path] = code
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "batch_summary.json", "w", encoding="utf-8") as fh:
        json.dump(results, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for path, code in sorted(results.items()):
        print(f"{path}: exit {code}")
    return max(results.values(), default=0)


def _cmd_list_builtins(_args) -> int:
    for name in sorted(BUILTIN_SCENARIOS):
        print(f"{name:<26} {BUILTIN_SUMMARIES.get(name, '')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="consensus-hulls",
        description="Simulate hull-constrained multi-agent consensus under delays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config", help="YAML config file")
    p_run.add_argument("--output", help="override the output directory")
    p_run.add_argument("--plot", action="store_true", help="also write plot.svg")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_batch = sub.add_parser("batch", help="run several configs concurrently")
    p_batch.add_argument("configs", nargs="+")
    p_batch.add_argument("--output-root", default="batch-out")
    p_batch.add_argument("--workers", type=int, default=None)
    p_batch.set_defaults(func=_cmd_batch)

    p_list = sub.add_parser("list-builtins", help="list builtin scenarios")
    p_list.set_defaults(func=_cmd_list_builtins)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # internal invariant violation
        print(json.dumps({"error": "internal failure", "detail": str(exc)}), file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
