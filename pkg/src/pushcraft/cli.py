"""Command-line entry points: planning, tracking, benchmarking, demo
management, and the recorder service."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .benchmark import (
    BenchmarkSpec,
    DEFAULT_BENCHMARK_SEED,
    format_summary,
    run_benchmark,
    summarize,
    write_rows_csv,
)
from .ddp import NonFiniteRollout, NotPositiveDefinite, Solution, SolverConfig
from .demos import (
    DemoLibrary,
    EmptyLibrary,
    MalformedFile,
    SchemaMismatch,
    build_canonical_library,
    canonical_scripts,
    run_push_script,
    save_demo,
)
from .dynamics import PhysicalParams, SliderPose
from .planner import PlanMethod, PlanRequest, plan
from .tracking import DisturbanceModel, TrackingConfig, track

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _demo_dir(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("PUSHCRAFT_DEMO_DIR")
    return Path(env) if env else Path("demos")


def _load_library(directory: Path) -> DemoLibrary:
    if not directory.is_dir():
        raise EmptyLibrary(f"demo directory {directory} does not exist")
    library = DemoLibrary.load_dir(directory)
    if library.n_d == 0:
        raise EmptyLibrary(f"demo directory {directory} holds no demos")
    return library


def cmd_plan(args) -> int:
    target = SliderPose(args.target[0], args.target[1], args.target[2])
    method = PlanMethod(args.method)
    library = None
    if method != PlanMethod.ZS:
        library = _load_library(_demo_dir(args.demos))
    request = PlanRequest(
        target=target,
        method=method,
        library=library,
        horizon=args.horizon,
        solver=SolverConfig(max_iterations=args.max_iterations),
    )
    report = plan(request)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.solution.save(out / "solution.json")
    report.save(out / "report.json")
    print(
        f"{method.value}: errors x={report.x_err * 100:.2f}cm y={report.y_err * 100:.2f}cm "
        f"theta={report.theta_err:.4f}rad success={report.success} "
        f"cost={report.solution.cost:.3f} iters={report.solution.iterations}"
    )
    return 0 if report.success else EXIT_FAIL


def cmd_track(args) -> int:
    try:
        solution = Solution.load(args.solution)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"cannot read solution file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    disturbance = DisturbanceModel(
        args.disturbance[0], args.disturbance[1], args.disturbance[2], seed=args.seed
    )
    config = TrackingConfig(trust_radius=args.trust_radius)
    trace = track(solution, disturbance, config)
    if args.out:
        trace.write_csv(args.out)
    ex, ey, eth = trace.final_errors
    print(
        f"final errors x={ex * 100:.2f}cm y={ey * 100:.2f}cm theta={eth:.4f}rad "
        f"within_tolerance={trace.within_tolerance}"
    )
    return 0 if trace.within_tolerance else EXIT_FAIL


def cmd_benchmark(args) -> int:
    methods = [PlanMethod(m.strip()) for m in args.methods.split(",") if m.strip()]
    if args.demos:
        library = _load_library(Path(args.demos))
    else:
        print("no --demos given; synthesizing the canonical library", file=sys.stderr)
        library = build_canonical_library(PhysicalParams())
    spec = BenchmarkSpec(
        n_targets=args.n,
        seed=args.seed,
        methods=methods,
        solver=SolverConfig(max_iterations=args.max_iterations),
        include_timing=not args.no_timing,
        workers=args.workers,
    )
    rows = run_benchmark(spec, library)
    if args.out:
        write_rows_csv(rows, args.out)
    summary = summarize(rows)
    text = format_summary(summary)
    print(text, end="")
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2))
    return 0


def cmd_demos_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = PhysicalParams()
    for i, (target, legs, horizon) in enumerate(canonical_scripts(params)):
        demo, stats = run_push_script(target, params, legs, horizon, label=f"canonical-{i}")
        path = out / f"{i:03d}-canonical.json"
        save_demo(demo, path)
        print(
            f"{path.name}: reached=({demo.reached.x:+.3f},{demo.reached.y:+.3f},"
            f"{demo.reached.theta:+.3f}) switches={demo.n_switches} "
            f"miss={stats.position_error * 100:.1f}cm/{stats.heading_error:.2f}rad"
        )
    return 0


def cmd_demos_list(args) -> int:
    directory = _demo_dir(args.dir)
    library = _load_library(directory)
    for path, demo in zip(sorted(directory.glob("*.json")), library.demos):
        print(
            f"{path.stem}: label={demo.label!r} reached=({demo.reached.x:+.3f},"
            f"{demo.reached.y:+.3f},{demo.reached.theta:+.3f}) "
            f"switches={demo.n_switches} steps={demo.horizon}"
        )
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    static = args.static
    if static is None:
        default_static = Path("frontend") / "dist"
        static = default_static if default_static.is_dir() else None
    serve(args.port, _demo_dir(args.demo_dir), static_dir=static, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pushcraft", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a push to a target pose")
    p.add_argument("--target", nargs=3, type=float, required=True, metavar=("X", "Y", "THETA"))
    p.add_argument("--method", choices=[m.value for m in PlanMethod], default="ws")
    p.add_argument("--demos", help="demo directory (default: $PUSHCRAFT_DEMO_DIR or ./demos)")
    p.add_argument("--out", default=".", help="output directory for solution/report JSON")
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--max-iterations", type=int, default=150)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("track", help="track a planned solution under disturbance")
    p.add_argument("--solution", required=True)
    p.add_argument(
        "--disturbance", nargs=3, type=float, default=[0.0, 0.0, 0.0], metavar=("XM", "YM", "THETAM")
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--trust-radius", type=float, default=TrackingConfig().trust_radius)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("benchmark", help="run the method-comparison benchmark")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=DEFAULT_BENCHMARK_SEED)
    p.add_argument("--methods", default="zs,ds,dp,ws")
    p.add_argument("--demos", help="demo directory (default: synthesize canonical demos)")
    p.add_argument("--out", help="per-target CSV path")
    p.add_argument("--summary", help="summary JSON path")
    p.add_argument("--no-timing", action="store_true", help="write 0.0 wall times for byte-stable output")
    p.add_argument("--max-iterations", type=int, default=150)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("demos", help="demo management")
    demos_sub = p.add_subparsers(dest="demos_command", required=True)
    ps = demos_sub.add_parser("synth", help="synthesize the three canonical demos")
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_demos_synth)
    pl = demos_sub.add_parser("list", help="list demos in a directory")
    pl.add_argument("--dir")
    pl.set_defaults(func=cmd_demos_list)

    p = sub.add_parser("serve", help="run the recorder HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--demo-dir")
    p.add_argument("--static", help="static frontend directory (default: ./frontend/dist if present)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, EmptyLibrary, MalformedFile, SchemaMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonFiniteRollout, NotPositiveDefinite) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
