"""Command-line front end: validate, graph, lint, explore, bench, gen.

Exit codes form a closed set: 0 = success, 1 = input/usage error,
2 = lint findings.  Session success is independent of coverage level —
an exploration that covers 60% of flows still exits 0; coverage is data.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .benchgen import generate_scene, spec_from_dict, truth_to_json
from .errors import EngineError, SceneError
from .explorer import DEFAULT_FLOW_TIMEOUT, GreedyExplorer
from .ifg import (
    DEFAULT_BROKER_EDGE_THRESHOLD,
    Category,
    build_ifg,
    detect_smells,
    ifg_to_json,
)
from .metrics import report_to_json, timeline_to_csv
from .random_baseline import RandomParams, drive_random_session
from .scene_parser import parse_scene_file, scene_to_json, validate_scene
from .sim import SimConfig, event_to_dict

STRATEGIES = ("greedy", "random")


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems with exit code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_scene(path: str):
    result = parse_scene_file(path)
    for diag in result.diagnostics:
        print(diag, file=sys.stderr)
    return result.scene


def cmd_validate(args) -> int:
    result = parse_scene_file(args.scene)
    for diag in result.diagnostics:
        print(diag, file=sys.stderr)
    if not result.ok:
        return 1
    for warning in validate_scene(result.scene):
        print(warning, file=sys.stderr)
    scene = result.scene
    print(f"{scene.scene_id}: {len(scene.objects)} objects, {len(scene.spawn_points)} spawn points")
    return 0


def cmd_graph(args) -> int:
    scene = _load_scene(args.scene)
    if scene is None:
        return 1
    graph = build_ifg(scene)
    text = ifg_to_json(graph)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    counts = graph.category_counts()
    summary = ", ".join(f"{cat.value}={counts[cat]}" for cat in counts)
    print(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges ({summary})", file=sys.stderr)
    return 0


def cmd_lint(args) -> int:
    scene = _load_scene(args.scene)
    if scene is None:
        return 1
    for warning in validate_scene(scene):
        print(warning, file=sys.stderr)
    graph = build_ifg(scene)
    smells = detect_smells(scene, graph, args.smell_threshold)
    for smell in smells:
        print(f"{smell.kind} {smell.socket_id} brokerEdges={smell.broker_edge_count}: {smell.details}")
    return 2 if smells else 0


def cmd_explore(args) -> int:
    random_only = {
        "--action-interval": args.action_interval,
        "--hold-min": args.hold_min,
        "--hold-max": args.hold_max,
        "--reset-probability": args.reset_probability,
    }
    greedy_only = {"--spawn-index": args.spawn_index, "--flow-timeout": args.flow_timeout}
    if args.strategy != "random":
        bad = [flag for flag, value in random_only.items() if value is not None]
        if bad:
            print(f"error: {', '.join(bad)} only apply to --strategy random", file=sys.stderr)
            return 1
    else:
        bad = [flag for flag, value in greedy_only.items() if value is not None]
        if bad:
            print(f"error: {', '.join(bad)} only apply to --strategy greedy", file=sys.stderr)
            return 1

    scene = _load_scene(args.scene)
    if scene is None:
        return 1
    graph = build_ifg(scene)
    config = SimConfig(budget_seconds=args.budget)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    if args.strategy == "greedy":
        explorer = GreedyExplorer(
            scene,
            graph,
            config,
            seed=args.seed,
            spawn_index=args.spawn_index or 0,
            flow_timeout=args.flow_timeout if args.flow_timeout is not None else DEFAULT_FLOW_TIMEOUT,
        )
        explorer.run()
        session = explorer.session
    else:
        params = RandomParams(
            action_interval=args.action_interval if args.action_interval is not None else 0.1,
            hold_min=args.hold_min if args.hold_min is not None else 0.1,
            hold_max=args.hold_max if args.hold_max is not None else 0.5,
            reset_probability=args.reset_probability if args.reset_probability is not None else 0.02,
            seed=args.seed,
        )
        session = drive_random_session(scene, graph, config, params)
    report = session.build_report(
        args.strategy, time.perf_counter() - started, args.smell_threshold
    )

    (outdir / "report.json").write_text(
        report_to_json(report, args.reproducible), encoding="utf-8"
    )
    (outdir / "timeline.csv").write_text(timeline_to_csv(session.rows), encoding="utf-8")
    with open(outdir / "trace.jsonl", "w", encoding="utf-8") as fh:
        for ev in session.world.events:
            fh.write(json.dumps(event_to_dict(ev)) + "\n")
    prevalent = report.coverage.prevalent
    print(
        f"{scene.scene_id} [{args.strategy} seed={args.seed}]: "
        f"prevalent IFC {prevalent.activated}/{prevalent.total}, "
        f"{len(report.unresponsive)} unresponsive finding(s)"
    )
    return 0


# ---------------------------------------------------------------------------
# bench

def _env_workers() -> int:
    raw = os.environ.get("IFG_EXPLORER_THREADS", "").strip()
    if raw:
        count = int(raw)
        if count < 1:
            raise ValueError("IFG_EXPLORER_THREADS must be >= 1")
        return count
    return os.cpu_count() or 1


def _bench_task(task) -> dict:
    scene_path, strategy, seed, budget, outdir, reproducible, threshold = task
    result = parse_scene_file(scene_path)
    if not result.ok:
        raise SceneError(result.diagnostics)
    scene = result.scene
    graph = build_ifg(scene)
    config = SimConfig(budget_seconds=budget)
    started = time.perf_counter()
    if strategy == "greedy":
        explorer = GreedyExplorer(scene, graph, config, seed=seed)
        explorer.run()
        session = explorer.session
    else:
        session = drive_random_session(scene, graph, config, RandomParams(seed=seed))
    report = session.build_report(strategy, time.perf_counter() - started, threshold)

    session_dir = Path(outdir) / scene.scene_id / f"{strategy}-seed{seed}"
    session_dir.mkdir(parents=True, exist_ok=True)
    (session_dir / "report.json").write_text(
        report_to_json(report, reproducible), encoding="utf-8"
    )
    (session_dir / "timeline.csv").write_text(
        timeline_to_csv(session.rows), encoding="utf-8"
    )
    cov = report.coverage
    return {
        "sceneId": scene.scene_id,
        "strategy": strategy,
        "seed": seed,
        "fire": cov.per_category[Category.FIRE].ratio,
        "manipulate": cov.per_category[Category.MANIPULATE].ratio,
        "socket": cov.per_category[Category.SOCKET].ratio,
        "total": cov.prevalent.ratio,
        "unresponsive": [f.interaction_id for f in report.unresponsive],
        "reportPath": str(session_dir / "report.json"),
        "timelinePath": str(session_dir / "timeline.csv"),
    }


def run_bench(
    scene_paths,
    seeds,
    outdir,
    budget: float = 600.0,
    reproducible: bool = True,
    smell_threshold: int = DEFAULT_BROKER_EDGE_THRESHOLD,
    workers=None,
):
    """Run both strategies over scenes x seeds; writes per-session files and
    aggregate.csv under outdir, returns the per-session result rows."""
    tasks = [
        (str(path), strategy, seed, budget, str(outdir), reproducible, smell_threshold)
        for path in scene_paths
        for strategy in STRATEGIES
        for seed in seeds
    ]
    if workers is None:
        workers = _env_workers()
    workers = max(1, min(workers, len(tasks)))
    if workers == 1:
        results = [_bench_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_task, tasks))
    results.sort(key=lambda r: (r["sceneId"], r["strategy"], r["seed"]))
    Path(outdir).mkdir(parents=True, exist_ok=True)
    (Path(outdir) / "aggregate.csv").write_text(_aggregate_csv(results), encoding="utf-8")
    return results


def _aggregate_csv(results) -> str:
    def mean(values):
        present = [v for v in values if v is not None]
        return None if not present else sum(present) / len(present)

    def cell(value) -> str:
        return "" if value is None else "%.6f" % value

    groups: dict = {}
    for row in results:
        groups.setdefault((row["sceneId"], row["strategy"]), []).append(row)
    lines = ["scene,strategy,fire,manipulate,socket,total"]
    columns = ("fire", "manipulate", "socket", "total")
    for scene_id, strategy in sorted(groups):
        rows = groups[(scene_id, strategy)]
        cells = [cell(mean([r[c] for r in rows])) for c in columns]
        lines.append(f"{scene_id},{strategy}," + ",".join(cells))
    for strategy in STRATEGIES:
        rows = [r for r in results if r["strategy"] == strategy]
        if rows:
            cells = [cell(mean([r[c] for r in rows])) for c in columns]
            lines.append(f"ALL,{strategy}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    suite = Path(args.suite)
    scene_paths = sorted(
        p for p in suite.glob("*.json") if not p.name.endswith(".truth.json")
    )
    if not scene_paths:
        print(f"error: no scene files found in {suite}", file=sys.stderr)
        return 1
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        print("error: --seeds must list at least one integer", file=sys.stderr)
        return 1
    results = run_bench(
        scene_paths,
        seeds,
        args.output,
        budget=args.budget,
        reproducible=args.reproducible,
        smell_threshold=args.smell_threshold,
    )
    print(
        f"ran {len(results)} sessions over {len(scene_paths)} scenes; "
        f"aggregate at {Path(args.output) / 'aggregate.csv'}"
    )
    return 0


def cmd_gen(args) -> int:
    doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec = spec_from_dict(doc)
    scene, truth = generate_scene(spec)
    out = Path(args.output)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(scene_to_json(scene), encoding="utf-8")
    truth_path = out.with_name(out.stem + ".truth.json")
    truth_path.write_text(truth_to_json(truth), encoding="utf-8")
    print(f"wrote {out} and {truth_path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifg-explorer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a scene and report diagnostics")
    p.add_argument("scene")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("graph", help="build the interaction flow graph as JSON")
    p.add_argument("scene")
    p.add_argument("-o", "--output", help="write graph JSON here (default stdout)")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("lint", help="detect interaction design smells (exit 2 if any)")
    p.add_argument("scene")
    p.add_argument("--smell-threshold", type=int, default=DEFAULT_BROKER_EDGE_THRESHOLD)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("explore", help="run one test session over a scene")
    p.add_argument("scene")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=float, default=600.0, help="simulated seconds")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--reproducible", action="store_true", help="omit wall-clock timing")
    p.add_argument("--smell-threshold", type=int, default=DEFAULT_BROKER_EDGE_THRESHOLD)
    p.add_argument("--spawn-index", type=int, help="greedy only: spawn point index")
    p.add_argument("--flow-timeout", type=float, help="greedy only: per-flow seconds")
    p.add_argument("--action-interval", type=float, help="random only: decision period")
    p.add_argument("--hold-min", type=float, help="random only: min hold seconds")
    p.add_argument("--hold-max", type=float, help="random only: max hold seconds")
    p.add_argument("--reset-probability", type=float, help="random only: teleport weight")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("bench", help="run both strategies over a scene suite")
    p.add_argument("--suite", required=True, help="directory of scene JSON files")
    p.add_argument("--seeds", required=True, help="comma-separated seed list")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--budget", type=float, default=600.0)
    p.add_argument("--reproducible", action="store_true")
    p.add_argument("--smell-threshold", type=int, default=DEFAULT_BROKER_EDGE_THRESHOLD)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate a benchmark scene and ground truth")
    p.add_argument("--spec", required=True, help="bench spec JSON file")
    p.add_argument("-o", "--output", required=True, help="scene JSON path")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
