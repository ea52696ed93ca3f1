"""Command line: ``solve``, ``bench``, ``gen`` and ``oracle``.

Exit status: 0 success, 2 bad flags, 3 unreadable/malformed input,
4 failure while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .budget import Budget
from .formula import DimacsError, read_dimacs, write_dimacs
from .montecarlo import METHODS
from .records import RESULT_HEADER
from .rollout import KINDS
from .sls import FlipBudget

EXIT_FLAGS, EXIT_PARSE, EXIT_RUNTIME = 2, 3, 4


class _InputError(Exception):
    pass


def _budget(text: str) -> Budget:
    try:
        return Budget.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _flips(text: str) -> FlipBudget:
    try:
        return FlipBudget.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _prob(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1]: {text}")
    return p


class _Once(argparse.Action):
    """Store action that rejects a repeated flag (``--flips`` is one choice)."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, "_seen_" + self.dest, False):
            parser.error(f"{option_string} given more than once")
        setattr(namespace, "_seen_" + self.dest, True)
        setattr(namespace, self.dest, values)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcmaxsat", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one solver on one instance, print a results-CSV row")
    s.add_argument("--instance", required=True, help="DIMACS .cnf file")
    s.add_argument("--method", required=True, choices=METHODS)
    s.add_argument("--rollout", required=True, choices=KINDS)
    s.add_argument("--level", type=int, default=1, choices=(1, 2), help="nesting level for nmcs/znmcs")
    s.add_argument("--budget", type=_budget, default=Budget("seconds", 300),
                   help="<secs>s wall clock, <count>r rollouts or <count>f flips (default 300s)")
    s.add_argument("--flips", type=_flips, action=_Once, default=FlipBudget.dynamic(2.0),
                   help="SLS flip limit: fixed:<F> or dynamic:<W>[:<E>] (default dynamic:2)")
    s.add_argument("--eps-init", type=_prob, default=0.1, help="epsilon-greedy init (default 0.1)")
    s.add_argument("--eps1", type=_prob, default=0.1, help="WalkSat noise (default 0.1)")
    s.add_argument("--eps2", type=_prob, default=0.5, help="Novelty noise (default 0.5)")
    s.add_argument("--sims", type=int, default=100, help="MCTS simulations per step (default 100)")
    s.add_argument("--t", type=int, default=10, help="ZNMCS samples per step (default 10)")
    s.add_argument("--c", type=float, default=1.0, help="UCT exploration constant (default 1.0)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--no-global-init", action="store_true",
                   help="initialise SLS uniformly at random instead of from the global best")
    s.add_argument("--final-not-best", action="store_true",
                   help="score SLS by its final state rather than the best visited")
    s.add_argument("--invert-h-polarity", action="store_true",
                   help="H1-H3 set a variable true when its positive literal is more frequent")
    s.add_argument("--header", action="store_true", help="print the CSV header first")

    b = sub.add_parser("bench", help="run an experiment grid over a suite of instances")
    b.add_argument("--suite", required=True, help="directory of .cnf files")
    b.add_argument("--grid", required=True, help="JSON grid file")
    b.add_argument("--out", required=True, help="output directory for results.csv/checkpoints.csv")
    b.add_argument("--workers", type=int, default=None, help="worker processes (overrides grid)")

    g = sub.add_parser("gen", help="write random k-CNF instances")
    g.add_argument("--vars", type=int, required=True)
    g.add_argument("--clauses", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")

    o = sub.add_parser("oracle", help="exact optimum of a small instance by enumeration")
    o.add_argument("--instance", required=True)
    return p


def _read(path: str):
    try:
        return read_dimacs(path)
    except (OSError, DimacsError, UnicodeDecodeError) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def cmd_solve(args) -> int:
    from .bench import ExperimentSpec
    from .montecarlo import run_method

    f = _read(args.instance)
    spec = ExperimentSpec(
        instances=[], methods=(args.method,), rollouts=(args.rollout,), budget=args.budget,
        flips=args.flips, eps_init=args.eps_init, eps1=args.eps1, eps2=args.eps2,
        simulations=args.sims, samples=args.t, c=args.c, global_init=not args.no_global_init,
        best_ever=not args.final_not_best, invert_polarity=args.invert_h_polarity)
    level = args.level if args.method in ("nmcs", "znmcs") else 1
    rec = run_method(args.method, f, spec.config(args.rollout, level), rng=args.seed,
                     instance_id=Path(args.instance).stem)
    if args.header:
        print(RESULT_HEADER)
    print(rec.csv_row())
    return 0


def cmd_bench(args) -> int:
    from .bench import ExperimentSpec, aggregate, format_summary, load_grid, load_suite, run_experiment

    suite = Path(args.suite)
    if not suite.is_dir():
        raise _InputError(f"{suite}: not a directory")
    try:
        grid = load_grid(args.grid)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"{args.grid}: {exc}") from exc
    try:
        instances = load_suite(suite)
    except DimacsError as exc:
        raise _InputError(str(exc)) from exc
    if args.workers is not None:
        grid["workers"] = args.workers
    try:
        spec = ExperimentSpec.from_grid(grid, instances)
    except (TypeError, ValueError) as exc:
        raise _InputError(f"{args.grid}: {exc}") from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment(spec, out / "results.csv", out / "checkpoints.csv")
    ok = [r for r in records if not r.error]
    if ok:
        sys.stdout.write(format_summary(aggregate(ok)))
    return 0


def cmd_gen(args) -> int:
    from .bench import generate_instance

    if min(args.vars, args.clauses, args.k, args.count) < 0 or args.k < 1:
        raise ValueError("counts must be non-negative and k >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        f = generate_instance(args.vars, args.clauses, args.k, [args.seed, i])
        path = out / f"rnd_v{args.vars}_m{args.clauses}_{args.k}_{i}.cnf"
        write_dimacs(f, path)
        print(path)
    return 0


def cmd_oracle(args) -> int:
    from .bench import exact_oracle

    f = _read(args.instance)
    opt, witness = exact_oracle(f)
    print(f"optimum_unsat={opt}")
    print(" ".join(map(str, witness.to_literals() + [0])))
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "gen": cmd_gen, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on flag errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _InputError as exc:
        print(f"mcmaxsat: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:
        print(f"mcmaxsat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
