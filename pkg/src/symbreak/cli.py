"""Command line: ``symbreak solve | bench | robustness | verify``.

Exit codes: 0 solution (or proved optimum, or all checks passed), 1
exhausted / infeasible / a check failed, 2 budget or time limit reached,
64 invalid flags.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import statistics
import sys
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .models import (ModelBundle, coloring_bundle, efpa, from_dimacs, graph_coloring,
                     magic_square, most_perfect_magic_square)
from .oracle import check_generators, verify
from .perm import GroupTooLarge, Permutation, Symmetry, SymmetryGroup
from .search import BranchSpec, Outcome
from .strategies import RestartConfig, StrategyResult, run_model_restarts, run_sbds, run_static

log = logging.getLogger("symbreak")

EXIT_OK, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64
MODELS = ("most-perfect", "magic", "coloring", "efpa")
STRATEGIES = ("static", "model-restarts", "sbds")
CSV_COLUMNS = ("instance", "strategy", "valueOrder", "seed", "opt", "provedOptimal",
               "backtracks", "seconds")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- model specs --------------------------------------------------------------

def _ints(text: str | None, what: str) -> list:
    if not text:
        raise UsageError(f"{what} needs --params")
    try:
        return [int(x) for x in text.replace("-", ",").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"bad parameter list {text!r}") from None


def _keywords(text: str, names: tuple) -> dict:
    out = {}
    for part in text.split(","):
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in names:
            raise UsageError(f"unknown parameter {key!r}; expected {', '.join(names)}")
        try:
            out[key] = int(value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    missing = [k for k in names if k not in out]
    if missing:
        raise UsageError(f"missing parameters: {', '.join(missing)}")
    return out


def build_model(model: str, n: int | None = None, params: str | None = None,
                group: str = "dihedral", dimacs: str | None = None,
                colors: int | None = None) -> ModelBundle:
    """Build a bundle from command-line style arguments.

    EFPA parameters are given as ``q,lambda,d,v``, the order of the usual
    instance names such as ``4-3-3-3``, or by keyword as
    ``v=2,q=2,lambda=1,d=2``.  Colouring parameters are
    ``vertices,maxBlock,seed[,colors]``.
    """
    try:
        if model == "most-perfect":
            return most_perfect_magic_square(4 if n is None else n)
        if model == "magic":
            return magic_square(5 if n is None else n, group)
        if model == "coloring":
            if dimacs is not None:
                with open(dimacs) as fh:
                    vertices, edges = from_dimacs(fh.read())
                return coloring_bundle(vertices, edges, None, colors,
                                       os.path.splitext(os.path.basename(dimacs))[0])
            p = _ints(params, "coloring")
            if len(p) not in (3, 4):
                raise UsageError("coloring needs vertices,maxBlock,seed[,colors]")
            k = p[3] if len(p) == 4 else colors
            return graph_coloring(p[0], p[1], p[2], k)
        if model == "efpa":
            if params and "=" in params:
                kw = _keywords(params, ("v", "q", "lambda", "d"))
                return efpa(kw["v"], kw["q"], kw["lambda"], kw["d"])
            p = _ints(params, "efpa")
            if len(p) != 4:
                raise UsageError("efpa needs q,lambda,d,v")
            q, lam, d, v = p
            return efpa(v, q, lam, d)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown model {model!r}")


def parse_instance(spec: str) -> ModelBundle:
    """``model:params`` as used by ``bench``, e.g. ``efpa:3-3-4-5`` or ``magic:5``."""
    model, _, rest = spec.partition(":")
    if model in ("most-perfect", "magic"):
        parts = rest.split(":") if rest else []
        n = int(parts[0]) if parts else None
        return build_model(model, n=n, group=parts[1] if len(parts) > 1 else "dihedral")
    return build_model(model, params=rest)


def default_var_order(bundle: ModelBundle) -> str:
    return "fixed" if bundle.name.startswith(("magic", "most-perfect")) else "min-domain"


@dataclass(frozen=True)
class RunSpec:
    strategy: str = "static"
    value_order: str = "lex"
    var_order: str | None = None
    seed: int = 0
    cutoff: int = 1000
    max_restarts: int = 10_000
    budget: int | None = None
    timeout: float | None = None


def run_strategy(bundle: ModelBundle, spec: RunSpec) -> StrategyResult:
    branch = BranchSpec(spec.var_order or default_var_order(bundle), spec.value_order, spec.seed)
    if spec.strategy == "static":
        return run_static(bundle.csp, bundle.sbc, branch, spec.budget, spec.timeout)
    if spec.strategy == "sbds":
        return run_sbds(bundle.csp, bundle.group.generators, branch, spec.budget, spec.timeout)
    if spec.strategy == "model-restarts":
        cfg = RestartConfig(spec.cutoff, spec.max_restarts, spec.seed)
        return run_model_restarts(bundle.csp, bundle.sbc, bundle.group, branch, cfg, spec.timeout)
    raise UsageError(f"unknown strategy {spec.strategy!r}")


def exit_code(bundle: ModelBundle, r: StrategyResult) -> int:
    if r.outcome is Outcome.EXHAUSTED:
        return EXIT_INFEASIBLE
    if bundle.csp.objective is not None:
        return EXIT_OK if r.proved_optimal else EXIT_BUDGET
    return EXIT_OK if r.outcome is Outcome.SOLUTION else EXIT_BUDGET


def opt_text(bundle: ModelBundle, r: StrategyResult) -> str:
    if bundle.csp.objective is not None:
        if r.objective is None:
            return "unsat" if r.outcome is Outcome.EXHAUSTED else "-"
        return f"{r.objective}" + ("" if r.proved_optimal else "*")
    return {Outcome.SOLUTION: "sat", Outcome.EXHAUSTED: "unsat"}.get(r.outcome, "-")


# -- commands -------------------------------------------------------------------

def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SYMBREAK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SYMBREAK_SEED must be an integer, got {env!r}") from None


def _spec(args, strategy=None, value_order=None, seed=None) -> RunSpec:
    if args.cutoff < 1:
        raise UsageError("--cutoff must be at least 1")
    if args.budget is not None and args.budget < 1:
        raise UsageError("--budget must be at least 1")
    return RunSpec(strategy or args.strategy, value_order or args.value_order, args.var_order,
                   _seed(args) if seed is None else seed, args.cutoff, args.max_restarts,
                   args.budget, args.timeout)


def cmd_solve(args) -> int:
    bundle = build_model(args.model, args.n, args.params, args.group, args.dimacs, args.colors)
    spec = _spec(args)
    r = run_strategy(bundle, spec)
    out = sys.stdout
    print(f"instance: {bundle.name}", file=out)
    print(f"strategy: {spec.strategy} (values {spec.value_order}, seed {spec.seed}, "
          f"cutoff {spec.cutoff})", file=out)
    print(f"outcome: {r.outcome.value}", file=out)
    if r.solution is not None:
        print(bundle.render(r.solution), file=out)
        ok = bundle.csp.is_solution(r.solution)
        print(f"check: {'ok' if ok else 'VIOLATED'}", file=out)
    print(f"opt: {opt_text(bundle, r)}", file=out)
    print(f"backtracks: {r.stats.backtracks}", file=out)
    print(f"nodes: {r.stats.nodes}", file=out)
    if spec.strategy == "model-restarts":
        print(f"restarts: {r.stats.restarts}", file=out)
        if args.show_restarts:
            print(r.log_text(), file=out)
    print(f"time: {r.stats.wall_time:.3f}s", file=sys.stderr)
    return exit_code(bundle, r)


def _bench_cell(cell):
    instance, spec = cell
    bundle = parse_instance(instance)
    start = time.perf_counter()
    r = run_strategy(bundle, spec)
    seconds = time.perf_counter() - start
    proved = r.proved_optimal if bundle.csp.objective is not None else r.outcome in (
        Outcome.SOLUTION, Outcome.EXHAUSTED)
    return {"instance": instance, "strategy": spec.strategy, "valueOrder": spec.value_order,
            "seed": spec.seed, "opt": opt_text(bundle, r), "provedOptimal": str(proved).lower(),
            "backtracks": r.stats.backtracks, "seconds": f"{seconds:.3f}"}


def bench_cells(instances, strategies, value_orders, seeds, base: RunSpec) -> list:
    cells = []
    for inst in instances:
        for strat in strategies:
            for val in value_orders:
                for seed in seeds:
                    cells.append((inst, RunSpec(strat, val, base.var_order, seed, base.cutoff,
                                                base.max_restarts, base.budget, base.timeout)))
    return cells


def run_bench(cells, jobs: int = 1):
    """Rows in cell order; cells may run in parallel, results are written by one writer."""
    if jobs <= 1:
        for cell in cells:
            log.info("bench cell %s %s", cell[0], cell[1])
            yield _bench_cell(cell)
        return
    with ProcessPoolExecutor(jobs) as pool:
        yield from pool.map(_bench_cell, cells)


def cmd_bench(args) -> int:
    for s in args.strategies:
        if s not in STRATEGIES:
            raise UsageError(f"unknown strategy {s!r}")
    for v in args.value_orders:
        if v not in ("lex", "random"):
            raise UsageError(f"unknown value order {v!r}")
    for inst in args.instances:
        parse_instance(inst)  # validate before running anything
    seeds = args.seeds if args.seeds else [_seed(args)]
    cells = bench_cells(args.instances, args.strategies, args.value_orders, seeds, _spec(args))
    if args.out and args.out != "-":
        fresh = not os.path.exists(args.out) or os.path.getsize(args.out) == 0
        fh = open(args.out, "a", newline="")
    else:
        fresh, fh = True, sys.stdout
    try:
        writer = csv.DictWriter(fh, CSV_COLUMNS)
        if fresh:
            writer.writeheader()
        for row in run_bench(cells, args.jobs):
            writer.writerow(row)
            fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def robustness(rows) -> dict:
    """Per (instance, strategy): max/min of mean backtracks under lex and random values."""
    acc = defaultdict(lambda: {"lex": [], "random": []})
    for row in rows:
        acc[(row["instance"], row["strategy"])][row["valueOrder"]].append(int(row["backtracks"]))
    out = {}
    for key, by in acc.items():
        if not by["lex"] or not by["random"]:
            continue
        a = max(statistics.mean(by["lex"]), 1)
        b = max(statistics.mean(by["random"]), 1)
        out[key] = max(a, b) / min(a, b)
    return out


def robustness_summary(ratios: dict, better: str = "model-restarts",
                       worse: str = "static") -> tuple[int, int]:
    """Instances where ``better`` has the smaller ratio, out of those with both."""
    instances = sorted({i for i, _ in ratios})
    both = [i for i in instances if (i, better) in ratios and (i, worse) in ratios]
    wins = sum(ratios[(i, better)] < ratios[(i, worse)] for i in both)
    return wins, len(both)


def cmd_robustness(args) -> int:
    with open(args.csv, newline="") as fh:
        ratios = robustness(csv.DictReader(fh))
    for (inst, strat), ratio in sorted(ratios.items()):
        print(f"{inst}\t{strat}\t{ratio:.2f}")
    wins, total = robustness_summary(ratios)
    print(f"model-restarts more robust than static on {wins}/{total} instances")
    return EXIT_OK if total and wins * 2 > total else EXIT_INFEASIBLE


def _inject(bundle: ModelBundle, pair: str) -> ModelBundle:
    i, j = _ints(pair, "--inject-swap")[:2]
    n = bundle.csp.n_vars
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise UsageError("--inject-swap needs two distinct variable indices")
    g = Symmetry(Permutation.from_cycles(n, (i, j)), Permutation.identity(bundle.csp.n_vals),
                 f"swap({i},{j})")
    grp = SymmetryGroup(bundle.group.n_vars, bundle.group.n_vals,
                        bundle.group.generators + (g,), None)
    return ModelBundle(bundle.csp, grp, bundle.sbc, bundle.name, bundle.meta, bundle.oracle_order)


def cmd_verify(args) -> int:
    bundle = build_model(args.model, args.n, args.params, args.group, args.dimacs, args.colors)
    if args.inject_swap:
        bundle = _inject(bundle, args.inject_swap)
    gen = check_generators(bundle.csp, bundle.group, order=bundle.oracle_order,
                           instance=bundle.name)
    print(gen.line())
    if not gen.passed:
        return EXIT_INFEASIBLE
    try:
        results = verify(bundle, bound=args.group_bound)
    except GroupTooLarge as exc:
        print(f"symbreak: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_INFEASIBLE


# -- argument parsing -------------------------------------------------------------

def _model_flags(p):
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--n", type=int, help="square order (magic, most-perfect)")
    p.add_argument("--params", help="coloring: vertices,maxBlock,seed[,colors]; "
                   "efpa: q,lambda,d,v or v=..,q=..,lambda=..,d=..")
    p.add_argument("--group", default="dihedral", choices=("rotations", "dihedral", "full"),
                   help="magic-square symmetry group")
    p.add_argument("--dimacs", help="graph file in DIMACS edge format (coloring)")
    p.add_argument("--colors", type=int, help="number of colours (coloring)")


def _run_flags(p, single=True):
    if single:
        p.add_argument("--strategy", default="static", choices=STRATEGIES)
        p.add_argument("--value-order", default="lex", choices=("lex", "random"))
    p.add_argument("--var-order", choices=("fixed", "min-domain"))
    p.add_argument("--cutoff", type=int, default=1000, help="backtracks per restart")
    p.add_argument("--max-restarts", type=int, default=10_000)
    p.add_argument("--budget", type=int, help="backtrack budget (static, sbds)")
    p.add_argument("--seed", type=int, help="master seed (default $SYMBREAK_SEED or 0)")
    p.add_argument("--timeout", type=float, help="seconds per run")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symbreak", description="Symmetry breaking with model restarts.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one instance")
    _model_flags(p)
    _run_flags(p)
    p.add_argument("--show-restarts", action="store_true", help="print the per-restart log")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a strategy matrix and write CSV")
    p.add_argument("--instances", nargs="+", required=True,
                   help="e.g. efpa:3-3-4-5 coloring:20,8,0 magic:5:rotations")
    p.add_argument("--strategies", nargs="+", default=list(STRATEGIES))
    p.add_argument("--value-orders", nargs="+", default=["lex", "random"])
    p.add_argument("--seeds", nargs="+", type=int)
    p.add_argument("--out", help="CSV file (appended; default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    _run_flags(p, single=False)
    p.set_defaults(func=cmd_bench, strategy=None, value_order=None)

    p = sub.add_parser("robustness", help="lex/random backtrack ratios from a bench CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("verify", help="run every oracle proposition check")
    _model_flags(p)
    p.add_argument("--inject-swap", help="add the variable swap i,j as an extra generator")
    p.add_argument("--group-bound", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("flags: %s", {k: v for k, v in vars(args).items() if k != "func"})
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"symbreak: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
