"""Method-comparison benchmark: seeded uniform targets, per-method reports,
and a Table-style summary of errors and success rates."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ddp import SolverConfig
from .demos import DemoLibrary
from .dynamics import PhysicalParams, SliderPose
from .planner import CostWeights, PlanMethod, PlanRequest, TASK_SPACE_XY, plan

DEFAULT_BENCHMARK_SEED = 20260115

CSV_COLUMNS = [
    "target_x",
    "target_y",
    "target_theta",
    "method",
    "x_err",
    "y_err",
    "theta_err",
    "success",
    "cost",
    "iters",
    "wall_time_s",
]


@dataclass
class BenchmarkSpec:
    n_targets: int = 50
    seed: int = DEFAULT_BENCHMARK_SEED
    methods: list[PlanMethod] = field(
        default_factory=lambda: [PlanMethod.ZS, PlanMethod.DS, PlanMethod.DP, PlanMethod.WS]
    )
    horizon: int = 200
    params: PhysicalParams = field(default_factory=PhysicalParams)
    weights: CostWeights = field(default_factory=CostWeights.default)
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(max_iterations=150))
    include_timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.n_targets < 1:
            raise ValueError("benchmark needs at least one target")
        self.methods = [PlanMethod(m) if isinstance(m, str) else m for m in self.methods]


def sample_targets(n: int, seed: int) -> list[SliderPose]:
    """Uniform targets over the task space (|x|,|y| <= 0.25 m, theta in [-pi, pi])."""
    rng = np.random.default_rng(seed)
    return [
        SliderPose(
            float(rng.uniform(-TASK_SPACE_XY, TASK_SPACE_XY)),
            float(rng.uniform(-TASK_SPACE_XY, TASK_SPACE_XY)),
            float(rng.uniform(-math.pi, math.pi)),
        )
        for _ in range(n)
    ]


def _run_one(args):
    spec, library, target, method = args
    report = plan(
        PlanRequest(
            target=target,
            method=method,
            library=library,
            horizon=spec.horizon,
            params=spec.params,
            weights=spec.weights,
            solver=spec.solver,
        )
    )
    histories = [report.solution.cost_history]
    if report.warm_start is not None:
        histories.append(report.warm_start.solution.cost_history)
    return {
        "target_x": target.x,
        "target_y": target.y,
        "target_theta": target.theta,
        "method": method.value,
        "x_err": report.x_err,
        "y_err": report.y_err,
        "theta_err": report.theta_err,
        "success": int(report.success),
        "cost": report.solution.cost,
        "iters": report.solution.iterations,
        "wall_time_s": report.wall_time_s if spec.include_timing else 0.0,
        "cost_histories": histories,
    }


def run_benchmark(spec: BenchmarkSpec, library: DemoLibrary) -> list[dict]:
    """Plan every (target, method) pair; rows ordered by target then method."""
    targets = sample_targets(spec.n_targets, spec.seed)
    tasks = [(spec, library, tgt, m) for tgt in targets for m in spec.methods]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_run_one, tasks, chunksize=1))
    else:
        rows = [_run_one(t) for t in tasks]
    return rows


def summarize(rows: list[dict]) -> dict[str, dict]:
    """Per-method mean/std errors (cm for positions) and success rate."""
    summary: dict[str, dict] = {}
    for method in dict.fromkeys(r["method"] for r in rows):
        sel = [r for r in rows if r["method"] == method]
        xerr = np.array([r["x_err"] for r in sel])
        yerr = np.array([r["y_err"] for r in sel])
        terr = np.array([r["theta_err"] for r in sel])
        summary[method] = {
            "n": len(sel),
            "x_err_cm_mean": float(xerr.mean() * 100),
            "x_err_cm_std": float(xerr.std() * 100),
            "y_err_cm_mean": float(yerr.mean() * 100),
            "y_err_cm_std": float(yerr.std() * 100),
            "theta_err_rad_mean": float(terr.mean()),
            "theta_err_rad_std": float(terr.std()),
            "success_rate": float(np.mean([r["success"] for r in sel])),
        }
    return summary


def format_summary(summary: dict[str, dict]) -> str:
    out = io.StringIO()
    out.write(f"{'Method':<8} {'x_err (cm)':>16} {'y_err (cm)':>16} {'theta_err (rad)':>18} {'succ_rate':>10}\n")
    for method, s in summary.items():
        out.write(
            f"{method.upper() + '-DDP':<8} "
            f"{s['x_err_cm_mean']:>7.2f} ± {s['x_err_cm_std']:<6.2f} "
            f"{s['y_err_cm_mean']:>7.2f} ± {s['y_err_cm_std']:<6.2f} "
            f"{s['theta_err_rad_mean']:>8.2f} ± {s['theta_err_rad_std']:<7.2f} "
            f"{s['success_rate'] * 100:>8.0f}%\n"
        )
    return out.getvalue()


def write_rows_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            out = dict(row)
            for key in ("target_x", "target_y", "target_theta", "x_err", "y_err", "theta_err", "cost", "wall_time_s"):
                out[key] = repr(float(out[key]))
            writer.writerow(out)
