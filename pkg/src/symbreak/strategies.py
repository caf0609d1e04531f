"""Symmetry handling strategies: static posting, model restarts and SBDS.

Model restarts repeatedly pick a random group element ``g``, post
``g(S)`` fresh and search with a backtrack cutoff.  Restarts are
independent, so with per-symmetry backtrack counts ``b_1..b_k`` and a
cutoff ``c`` the expected total cost ``t`` solves
``t = (1/k) * sum_{b<=c} b + (1/k) * sum_{b>c} (c + t)``.
"""
from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .csp import Csp
from .perm import Symmetry, SymmetryGroup, random_element
from .search import BranchSpec, Outcome, SearchResult, SearchStats, optimize, solve
from .transform import SymBreakSet, apply_symmetry

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RestartConfig:
    cutoff: int = 1000
    max_restarts: int = 10_000
    master_seed: int = 0

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if self.max_restarts < 1:
            raise ValueError("max_restarts must be at least 1")


@dataclass(frozen=True)
class RestartRecord:
    index: int
    label: str
    backtracks: int
    outcome: Outcome

    def line(self) -> str:
        return f"{self.index}\t{self.label}\t{self.backtracks}\t{self.outcome.value}"


@dataclass
class StrategyResult:
    strategy: str
    outcome: Outcome
    solution: tuple | None
    stats: SearchStats
    objective: int | None = None
    proved_optimal: bool = False
    restarts: list = field(default_factory=list)
    final_symmetry: Symmetry | None = None

    def log_text(self) -> str:
        return "\n".join(r.line() for r in self.restarts)


def _from_search(strategy: str, r: SearchResult) -> StrategyResult:
    return StrategyResult(strategy, r.outcome, r.solution, r.stats, r.objective, r.proved_optimal)


def _run(csp, extra, branch, cutoff, sbds=(), time_limit=None, incumbent=None) -> SearchResult:
    if csp.objective is not None:
        return optimize(csp, extra, branch, cutoff, sbds, time_limit, incumbent)
    return solve(csp, extra, branch, cutoff, sbds, time_limit)


def run_static(csp: Csp, s: SymBreakSet | Iterable = (), branch: BranchSpec = BranchSpec(),
               budget: int | None = None, time_limit: float | None = None) -> StrategyResult:
    """Post the breaking constraints once and search (or optimise)."""
    return _from_search("static", _run(csp, tuple(s), branch, budget, time_limit=time_limit))


def run_sbds(csp: Csp, generators: Sequence[Symmetry], branch: BranchSpec = BranchSpec(),
             budget: int | None = None, time_limit: float | None = None) -> StrategyResult:
    """Symmetry breaking during search using only the given generators."""
    return _from_search("sbds", _run(csp, (), branch, budget, tuple(generators), time_limit))


def restart_seed(master_seed: int, index: int) -> int:
    """Value-ordering seed of restart ``index``; a fixed function of the master seed."""
    return (master_seed * 1_000_003 + index) & 0xFFFFFFFF


def run_model_restarts(csp: Csp, s: SymBreakSet, group: SymmetryGroup,
                       branch: BranchSpec = BranchSpec(), cfg: RestartConfig = RestartConfig(),
                       time_limit: float | None = None,
                       cache: dict | None = None) -> StrategyResult:
    """Restart with a freshly sampled ``g(S)`` every ``cfg.cutoff`` backtracks.

    For optimisation problems the best objective found so far is kept as a
    bound across restarts, and optimality is proved by the first restart
    that exhausts its (sound) search space.

    ``cache`` memoises restarts by symmetry when the search is deterministic
    (lexicographic values, no time limit).  A restart is then a pure
    function of ``g`` and the incumbent, so reusing it changes nothing but
    the running time.
    """
    rng = random.Random(cfg.master_seed)
    total = SearchStats()
    records = []
    best, best_value = None, None
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    use_cache = cache is not None and branch.val == "lex" and time_limit is None
    g = None
    for k in range(cfg.max_restarts):
        g = random_element(group, rng)
        b = branch.reseeded(restart_seed(cfg.master_seed, k)) if branch.val == "random" else branch
        remaining = None if deadline is None else max(deadline - time.perf_counter(), 0.0)
        key = (g.key(), b, cfg.cutoff, best_value)
        if use_cache and key in cache:
            r = cache[key]
        else:
            r = _run(csp, apply_symmetry(g, s).constraints, b, cfg.cutoff,
                     time_limit=remaining, incumbent=best_value)
            if use_cache:
                cache[key] = r
        total.add(r.stats)
        total.restarts = k + 1
        records.append(RestartRecord(k, g.label or "g", r.stats.backtracks, r.outcome))
        log.debug("restart %s", records[-1].line())
        if csp.objective is None:
            if r.outcome in (Outcome.SOLUTION, Outcome.EXHAUSTED, Outcome.TIMEOUT):
                return StrategyResult("model-restarts", r.outcome, r.solution, total,
                                      restarts=records, final_symmetry=g)
            continue
        if r.solution is not None and (best_value is None or r.objective < best_value):
            best, best_value = r.solution, r.objective
        if r.outcome in (Outcome.SOLUTION, Outcome.EXHAUSTED):
            # this restart ran to completion: the incumbent is optimal
            outcome = Outcome.SOLUTION if best is not None else Outcome.EXHAUSTED
            return StrategyResult("model-restarts", outcome, best, total, best_value,
                                  best is not None, records, g)
        if r.outcome is Outcome.TIMEOUT:
            break
    outcome = Outcome.TIMEOUT if deadline is not None and time.perf_counter() >= deadline \
        else Outcome.CUTOFF
    return StrategyResult("model-restarts", outcome, best, total, best_value, False, records, g)


# -- expected cost ----------------------------------------------------------

def expected_restart_cost(counts: Sequence[float], cutoff: int) -> float:
    """Expected total backtracks when each restart picks a count uniformly.

    With ``m`` of the ``k`` counts above the cutoff and the others summing
    to ``s`` the fixed point is ``(s + m*cutoff) / (k - m)``.
    """
    if not counts:
        raise ValueError("no symmetry counts given")
    ok = [Fraction(b) for b in counts if b <= cutoff]
    if not ok:
        raise ValueError("every count exceeds the cutoff: no finite expectation")
    m = len(counts) - len(ok)
    return float((sum(ok) + m * cutoff) / len(ok))


def simulate_restart_cost(counts: Sequence[float], cutoff: int, trials: int,
                          seed: int = 0) -> float:
    """Monte-Carlo mean of the restart process over per-symmetry counts."""
    if all(b > cutoff for b in counts):
        raise ValueError("every count exceeds the cutoff: no finite expectation")
    rng = random.Random(seed)
    k = len(counts)
    total = 0
    for _ in range(trials):
        while True:
            b = counts[rng.randrange(k)]
            if b <= cutoff:
                total += b
                break
            total += cutoff
    return total / trials


def symmetry_counts(csp: Csp, s: SymBreakSet, elements: Sequence[Symmetry],
                    branch: BranchSpec = BranchSpec(), cap: int | None = None) -> list:
    """Backtracks needed to solve with each ``g(S)``; ``math.inf`` past ``cap``."""
    out = []
    for g in elements:
        r = solve(csp, apply_symmetry(g, s).constraints, branch, cap)
        out.append(math.inf if r.outcome is Outcome.CUTOFF else r.stats.backtracks)
    return out
