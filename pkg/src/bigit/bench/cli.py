"""Command-line entry point for the benchmark harness."""
from __future__ import annotations

import argparse
import math
import sys

from ..anytime import PlannerConfig
from ..errors import BigitError, UsageError
from .domains import ALL_DOMAINS, build_domain
from .harness import PLANNERS, run_benchmark
from .report import emit_outputs


def _point(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigit-bench",
                                description="Benchmark BIGIT* against BIT* on built-in or map domains.")
    p.add_argument("--domain", choices=ALL_DOMAINS, required=True)
    p.add_argument("--map-file", help="PGM occupancy image (required for --domain map)")
    p.add_argument("--meters-per-pixel", type=float, default=1.0)
    p.add_argument("--footprint-radius", type=float, default=0.25,
                   help="robot radius in meters; the map is dilated by it")
    p.add_argument("--occupied-below", type=int, default=128,
                   help="gray values below this are obstacles")
    p.add_argument("--start", type=_point, help="map start as x,y in meters")
    p.add_argument("--goal", type=_point, help="map goal as x,y in meters")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--planner", action="append", choices=sorted(PLANNERS),
                   help="repeatable; default runs both")
    p.add_argument("--batch-size", type=_positive_int, help="default 100, or 6000 for map")
    p.add_argument("--eta", type=float, default=1.001)
    p.add_argument("--connection", choices=("knn", "rdisc"), help="default knn, rdisc for map")
    p.add_argument("--segments", type=_positive_int, default=200)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--budget", type=float, help="seconds per trial; default 100, or 2 for map")
    p.add_argument("--max-batches", type=_positive_int,
                   help="stop each trial after this many batches (deterministic runs)")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", default="bench_out")
    p.add_argument("--normalize-keys", choices=("on", "off"), default="off")
    p.add_argument("--lazy-refresh", choices=("first", "every"), default="first")
    return p


def parse_cli(argv):
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        raise SystemExit(2)
    args = parser.parse_args(argv)
    if args.domain == "map":
        if not args.map_file:
            parser.error("--domain map requires --map-file")
        if args.dim != 2:
            parser.error("--domain map is planar; drop --dim")
    elif args.map_file or args.start or args.goal:
        parser.error("--map-file/--start/--goal only apply to --domain map")
    if args.dim < 2:
        parser.error("--dim must be at least 2")
    if args.seed_base < 0 or args.seed_base >= 2 ** 64:
        parser.error("--seed-base must be an unsigned 64-bit integer")
    if args.budget is not None and not args.budget >= 0:
        parser.error("--budget must be non-negative")
    if args.meters_per_pixel <= 0:
        parser.error("--meters-per-pixel must be positive")
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = parse_cli(argv)
    map_args = {}
    if args.domain == "map":
        try:
            with open(args.map_file, "rb") as fh:
                pgm = fh.read()
        except OSError as exc:
            print(f"bigit-bench: cannot read {args.map_file}: {exc}", file=sys.stderr)
            return 2
        map_args = dict(pgm=pgm, meters_per_pixel=args.meters_per_pixel, start=args.start,
                        goal=args.goal, footprint_radius=args.footprint_radius,
                        occupied_below=args.occupied_below)
    try:
        domain = build_domain(args.domain, args.dim, args.segments, **map_args)
        config = PlannerConfig(
            batch_size=args.batch_size or domain.batch_size,
            connection=args.connection or domain.connection,
            eta=args.eta,
            normalize_keys=args.normalize_keys == "on",
            lazy_refresh=args.lazy_refresh,
            max_batches=args.max_batches,
        )
    except (UsageError, ValueError) as exc:
        print(f"bigit-bench: {exc}", file=sys.stderr)
        return 2
    budget = args.budget
    if budget is None:
        budget = math.inf if args.max_batches else domain.budget_s
    planners = args.planner or sorted(PLANNERS)
    try:
        report, results = run_benchmark([domain], planners, args.trials, budget, args.jobs,
                                        args.seed_base, config)
        written = emit_outputs(report, results, args.out)
    except BigitError as exc:
        print(f"bigit-bench: {exc}", file=sys.stderr)
        return 1
    for (label, planner), c in report.curves.items():
        print(f"{label} {planner}: success {c.final_success_rate:.2f}, "
              f"median first solution {c.median_first_solution_time_s:.4g} s, "
              f"median final cost {c.median_final_cost:.6g}, failures {c.failures}")
    print(f"wrote {len(written)} files under {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
