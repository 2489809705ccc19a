"""``selfstab`` command line: run, batch, verify, gen.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .engine import Daemon, Strategy, default_max_moves, mix64
from .problems import PROBLEMS, get_problem, simulate
from .tree import TreeError, parse_tree, random_tree, serialize
from .verify import verify_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_HEADER = "run_id,n,k,problem,daemon,seed,moves_total,stabilized,valid,optimal,optimum,achieved"


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"list entries must be positive: {text!r}")
    return values


def _strategy(text: str) -> Strategy:
    try:
        return Strategy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _strategy_list(text: str) -> list[Strategy]:
    return [_strategy(x) for x in text.split(",") if x]


def run_seed(base: int, n: int, r: int) -> int:
    """Per-run seed for batch row ``r`` at size ``n``; replay with ``run --random n --seed``."""
    return mix64(base, n * 1_000_003 + r) % (1 << 31)


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_run(args) -> int:
    problem = get_problem(args.problem)
    try:
        if args.tree is not None:
            tree = parse_tree(Path(args.tree).read_text())
        else:
            tree = random_tree(args.random, args.seed)
    except (OSError, TreeError) as exc:
        raise UsageError(str(exc))
    K = args.k
    if args.init == "random":
        initial = problem.random_configuration(tree, K, args.seed)
    elif args.init == "legit":
        initial = problem.silent_configuration(tree, K)
    else:
        try:
            initial = problem.load_labels(tree, Path(args.init).read_text(), K)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc))
    max_moves = default_max_moves(tree.n) if args.max_moves is None else args.max_moves
    daemon = Daemon(args.daemon, args.seed)
    outcome = simulate(problem, tree, K, daemon, initial, max_moves, trace=args.trace is not None)
    report = outcome.report
    if args.trace is not None:
        Path(args.trace).write_text(report.trace_jsonl())
    per_rule = " ".join(f"{k}={v}" for k, v in report.moves_by_rule.items())
    lines = [
        f"tree: n={tree.n} root={tree.root}",
        f"problem: {problem.name} K={K} daemon={daemon.strategy.name} seed={args.seed} init={args.init}",
        f"moves: {report.moves_total} ({per_rule}) limit={max_moves}",
        f"stabilized: {_yn(report.stabilized)}",
        f"blacks: {' '.join(map(str, outcome.blacks)) or '-'}",
        f"valid: {_yn(outcome.valid)}",
        f"optimum: {outcome.optimum} ({outcome.oracle})",
        f"achieved: {outcome.achieved}",
        f"optimal: {_yn(outcome.optimal)}",
    ]
    print("\n".join(lines))
    return EXIT_OK if outcome.ok else EXIT_FAIL


def _batch_row(job) -> str:
    run_id, n, K, problem_name, strategy, seed = job
    problem = PROBLEMS[problem_name]
    tree = random_tree(n, seed)
    initial = problem.random_configuration(tree, K, seed)
    o = simulate(problem, tree, K, Daemon(strategy, seed), initial)
    return ",".join(
        str(x)
        for x in (
            run_id, n, K, problem_name, strategy.name, seed, o.report.moves_total,
            int(o.report.stabilized), int(o.valid), int(o.optimal), o.optimum, o.achieved,
        )
    )


def batch_jobs(sizes, K, problem, daemons, runs, seed):
    jobs = []
    for n in sizes:
        for r in range(runs):
            s = run_seed(seed, n, r)
            for strategy in daemons:
                jobs.append((len(jobs), n, K, problem, strategy, s))
    return jobs


def cmd_batch(args) -> int:
    get_problem(args.problem)
    jobs = batch_jobs(args.sizes, args.k, args.problem, args.daemons, args.runs_per_config, args.seed)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_batch_row, jobs, chunksize=8))
    else:
        rows = [_batch_row(j) for j in jobs]
    out = sys.stdout
    out.write(CSV_HEADER + "\n")
    worst: dict[int, int] = {}
    failed = False
    for job, row in zip(jobs, rows):
        out.write(row + "\n")
        fields = row.split(",")
        worst[job[1]] = max(worst.get(job[1], 0), int(fields[6]))
        failed |= fields[9] != "1"
    out.flush()
    print("max moves per n: " + " ".join(f"{n}={m}" for n, m in worst.items()), file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    if args.max_n > 12:
        raise UsageError("--max-n must be at most 12")
    problems = [PROBLEMS[p] for p in (("pack", "dom") if args.problem == "both" else (args.problem,))]
    sweep = verify_sweep(problems, args.max_n, args.k_list, args.trees, args.states, args.seed)
    for failure in sweep.failures:
        print(f"FAIL {failure}")
    print(f"checked {sweep.checked} properties, {len(sweep.failures)} failures")
    return EXIT_FAIL if sweep.failures else EXIT_OK


def cmd_gen(args) -> int:
    sys.stdout.write(serialize(random_tree(args.n, args.seed)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfstab",
        description="Simulate self-stabilizing K-packing and K-domination on trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one simulation with an optimality verdict")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tree", metavar="FILE")
    src.add_argument("--random", type=_positive, metavar="N")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--problem", choices=sorted(PROBLEMS), default="pack")
    p.add_argument("--daemon", type=_strategy, default=Strategy.RANDOM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="random", metavar="random|legit|FILE")
    p.add_argument("--max-moves", type=_nonneg, default=None)
    p.add_argument("--trace", metavar="FILE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="CSV of many runs")
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--problem", choices=sorted(PROBLEMS), default="pack")
    p.add_argument("--daemons", type=_strategy_list, default=list(Strategy))
    p.add_argument("--runs-per-config", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("verify", help="exhaustive invariant sweep on small trees")
    p.add_argument("--max-n", type=_positive, default=8)
    p.add_argument("--k-list", type=_int_list, default=[1, 2])
    p.add_argument("--problem", choices=["both", "pack", "dom"], default="both")
    p.add_argument("--trees", type=_positive, default=3, help="random trees per size")
    p.add_argument("--states", type=_positive, default=2, help="random initial states per tree")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="print a uniform random tree")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"selfstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
