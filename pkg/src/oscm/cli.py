"""Command line front end: ``oscm solve``, ``oscm verify`` and ``oscm bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .bnb import SearchError, SolveReport, solve_exact, solve_heuristic
from .config import SolverConfig
from .crossings import count_crossings
from .model import InvalidOrdering, ParseError, check_permutation, parse_instance, parse_solution, write_solution
from .reduction import RULES, FixConflict
from .simplex import NumericalError

log = logging.getLogger("oscm")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


@dataclass
class RunStats:
    mode: str
    instance: str
    n0: int
    n1: int
    m: int
    heuristic_cost: int
    lower_bound: int
    final_cost: int
    proven_optimal: bool
    nodes: int
    cuts: int
    lp_solves: int
    wall_time_ms: float
    reductions_isolated: int = 0
    reductions_split: int = 0
    reductions_zero_pairs: int = 0
    reductions_dominance: int = 0
    reductions_bound: int = 0
    reductions_closure: int = 0

    @classmethod
    def from_report(cls, mode: str, name: str, instance, report: SolveReport) -> "RunStats":
        stats = cls(
            mode=mode,
            instance=name,
            n0=instance.n0,
            n1=instance.n1,
            m=instance.m,
            heuristic_cost=report.heuristic_cost,
            lower_bound=report.lower_bound,
            final_cost=report.best.crossings,
            proven_optimal=report.proven_optimal,
            nodes=report.nodes_explored,
            cuts=report.cuts_added,
            lp_solves=report.lp_solves,
            wall_time_ms=round(report.wall_time * 1000, 3),
        )
        for rule in RULES:
            setattr(stats, f"reductions_{rule}", report.reductions.get(rule, 0))
        return stats

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _config(args) -> SolverConfig:
    return SolverConfig(
        seed=args.seed,
        time_limit=args.time_limit,
        window=args.window,
        restarts=args.restarts,
    )


def run(text: str, mode: str, config: SolverConfig, name: str = "<stdin>"):
    instance = parse_instance(text)
    if mode == "exact":
        report = solve_exact(instance, config)
    else:
        report = solve_heuristic(instance, config)
    return instance, report, RunStats.from_report(mode, name, instance, report)


def cmd_solve(args) -> int:
    try:
        if args.input is None:
            text, name = sys.stdin.read(), "<stdin>"
        else:
            text, name = Path(args.input).read_text(), str(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        instance, report, stats = run(text, args.mode, _config(args), name)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SearchError, FixConflict, NumericalError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(write_solution(instance, report.best.ordering))
    sys.stdout.flush()
    if args.stats:
        Path(args.stats).write_text(stats.to_json() + "\n")
    if not report.proven_optimal and args.mode == "exact":
        log.warning("time limit reached; lower bound %d, cost %d", report.lower_bound, report.best.crossings)
    log.info("crossings %d (lower bound %d)", report.best.crossings, report.lower_bound)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        instance = parse_instance(Path(args.instance).read_text())
        perm = parse_solution(instance, Path(args.ordering).read_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        check_permutation(perm, instance.n1)
    except InvalidOrdering as exc:
        print(f"invalid ordering: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(count_crossings(instance, perm))
    return EXIT_OK


def _bench_one(path: str, mode: str, config: SolverConfig) -> dict:
    try:
        _, _, stats = run(Path(path).read_text(), mode, config, Path(path).name)
        return asdict(stats)
    except Exception as exc:  # one bad file must not abort the batch
        return {"instance": Path(path).name, "mode": mode, "error": f"{type(exc).__name__}: {exc}"}


def cmd_bench(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: not a readable directory: {directory}", file=sys.stderr)
        return EXIT_PARSE
    files = sorted(str(p) for p in directory.glob("*.gr"))
    config = _config(args)
    start = time.monotonic()
    if args.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = pool.map(_bench_one, files, [args.mode] * len(files), [config] * len(files))
            rows = list(rows)
    else:
        rows = (_bench_one(f, args.mode, config) for f in files)
    summary = {"summary": True, "mode": args.mode, "instances": 0, "errors": 0, "proven_optimal": 0, "total_final_cost": 0}
    for row in rows:
        print(json.dumps(row), flush=True)
        summary["instances"] += 1
        if "error" in row:
            summary["errors"] += 1
        else:
            summary["proven_optimal"] += int(row["proven_optimal"])
            summary["total_final_cost"] += row["final_cost"]
    summary["wall_time_ms"] = round((time.monotonic() - start) * 1000, 3)
    print(json.dumps(summary))
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "heuristic"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=None, help="seconds (default: unlimited)")
    p.add_argument("--window", type=int, default=20, help="local search window width")
    p.add_argument("--restarts", type=int, default=64, help="probabilistic median draws")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscm", description="One-sided crossing minimization solver")
    parser.add_argument("--quiet", action="store_true", help="only report errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one PACE instance (file or stdin)")
    p.add_argument("input", nargs="?", default=None)
    _add_solver_flags(p)
    p.add_argument("--stats", default=None, help="write run statistics as JSON to this path")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="count crossings of an ordering file")
    p.add_argument("instance")
    p.add_argument("ordering")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="solve every .gr file in a directory, JSON lines out")
    p.add_argument("directory")
    _add_solver_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
