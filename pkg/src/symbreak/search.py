"""Depth-first search with propagation, binary branching and a backtrack cutoff.

Every node is propagated to a fixpoint.  Branching is ``X = v`` (left)
versus ``X != v`` (right).  A backtrack is one domain wipeout.  With a
cutoff ``c`` a run that needs at most ``c`` backtracks finishes normally;
otherwise it stops with :attr:`Outcome.CUTOFF` after exactly ``c``.
"""
from __future__ import annotations

import enum
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constraints import (Constraint, Inconsistent, Nogood, View, bits, check_value_ranges,
                          is_single, low)
from .csp import Csp
from .perm import Symmetry


class Outcome(enum.Enum):
    SOLUTION = "solution"
    EXHAUSTED = "exhausted"
    CUTOFF = "cutoff"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class BranchSpec:
    """``var`` is ``"fixed"`` or ``"min-domain"``; ``val`` is ``"lex"`` or ``"random"``."""
    var: str = "fixed"
    val: str = "lex"
    seed: int = 0
    order: tuple | None = None

    def __post_init__(self):
        if self.var not in ("fixed", "min-domain"):
            raise ValueError(f"unknown variable heuristic {self.var!r}")
        if self.val not in ("lex", "random"):
            raise ValueError(f"unknown value heuristic {self.val!r}")

    def reseeded(self, seed: int) -> BranchSpec:
        return BranchSpec(self.var, self.val, seed, self.order)


@dataclass
class SearchStats:
    backtracks: int = 0
    nodes: int = 0
    restarts: int = 0
    solutions: int = 0
    wall_time: float = 0.0

    def add(self, other: SearchStats):
        self.backtracks += other.backtracks
        self.nodes += other.nodes
        self.solutions += other.solutions
        self.wall_time += other.wall_time


@dataclass
class SearchResult:
    outcome: Outcome
    solution: tuple | None
    stats: SearchStats
    objective: int | None = None
    proved_optimal: bool = False
    solutions: list = field(default_factory=list)


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


class Engine:
    """One search over ``csp`` plus extra constraints.

    ``mode`` is ``"first"``, ``"all"`` or ``"optimize"``.  ``sbds`` is a
    sequence of symmetries whose images of refuted decisions are posted as
    nogoods on right branches.
    """

    def __init__(self, csp: Csp, extra: Iterable[Constraint] = (), branch: BranchSpec = BranchSpec(),
                 cutoff: int | None = None, mode: str = "first", sbds: Sequence[Symmetry] = (),
                 time_limit: float | None = None, incumbent: int | None = None):
        if cutoff is not None and cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if mode == "optimize" and csp.objective is None:
            raise ValueError("optimisation needs an objective")
        self.csp = csp
        extra = list(extra)
        check_value_ranges(extra, csp.domains, csp.n_vals)
        self.cons = list(csp.constraints) + extra
        self.branch = branch
        self.cutoff = cutoff
        self.mode = mode
        self.sbds = [g for g in sbds if not g.is_identity()]
        self.time_limit = time_limit
        self.rng = random.Random(branch.seed)
        self.stats = SearchStats()
        self.best = None
        self.best_value = incumbent
        self.found = []
        n = csp.n_vars
        self.order = list(branch.order) if branch.order is not None else list(range(n))
        self.bound_slot = None
        if mode == "optimize":
            self.bound_slot = len(self.cons)
            self.cons.append(None)
        self.watch = [[] for _ in range(n)]
        for k, c in enumerate(self.cons):
            if c is not None:
                self._watch(k, c)
        if self.bound_slot is not None:
            self._set_bound(incumbent)
        self.bound_version = 0

    def _watch(self, k, c):
        for var in c.variables():
            if k not in self.watch[var]:
                self.watch[var].append(k)

    def _set_bound(self, value):
        if value is None:
            self.cons[self.bound_slot] = None
            return
        c = self.csp.objective.below(value)
        self.cons[self.bound_slot] = c
        self._watch(self.bound_slot, c)

    # -- propagation --

    def _propagate(self, doms, dyn, seeds):
        cons, watch = self.cons, self.watch
        dyn_watch = {}
        for i, c in enumerate(dyn):
            for var in c.variables():
                dyn_watch.setdefault(var, []).append(-1 - i)
        queue = deque()
        queued = set()
        for k in seeds:
            if k not in queued:
                queued.add(k)
                queue.append(k)
        changed = set()
        while queue:
            k = queue.popleft()
            queued.discard(k)
            c = cons[k] if k >= 0 else dyn[-1 - k]
            if c is None:
                continue
            changed.clear()
            c.propagate(doms, changed)
            for var in changed:
                for k2 in watch[var]:
                    if k2 not in queued:
                        queued.add(k2)
                        queue.append(k2)
                for k2 in dyn_watch.get(var, ()):
                    if k2 not in queued:
                        queued.add(k2)
                        queue.append(k2)

    # -- branching --

    def _select(self, doms):
        if self.branch.var == "fixed":
            for v in self.order:
                if not is_single(doms[v]):
                    return v
            return None
        best, best_size = None, None
        for v in self.order:
            d = doms[v]
            if is_single(d):
                continue
            size = d.bit_count()
            if best is None or size < best_size:
                best, best_size = v, size
        return best

    def _value(self, d):
        if self.branch.val == "lex":
            return low(d)
        return self.rng.choice(list(bits(d)))

    def _symmetric_nogoods(self, doms, decisions, var, val):
        out = []
        for g in self.sbds:
            sigma, theta = g.var_perm.image, g.val_perm.image
            lits = []
            for x, a in decisions + ((var, val),):
                y, b = sigma[x], theta[a]
                if not (doms[y] >> b) & 1:
                    lits = None
                    break
                lits.append((View(y), b))
            if lits is not None:
                out.append(Nogood(tuple(lits)))
        return out

    # -- main loop --

    def _fail(self):
        if self.cutoff is not None and self.stats.backtracks >= self.cutoff:
            raise _Stop(Outcome.CUTOFF)
        self.stats.backtracks += 1

    def _on_solution(self, doms):
        a = tuple(low(d) for d in doms)
        self.stats.solutions += 1
        if self.mode == "first":
            self.best = a
            raise _Stop(Outcome.SOLUTION)
        if self.mode == "all":
            self.found.append(a)
            return
        value = self.csp.objective.value(a)
        if self.best_value is None or value < self.best_value:
            self.best, self.best_value = a, value
            self._set_bound(value)
            self.bound_version += 1

    def run(self) -> SearchResult:
        start = time.perf_counter()
        outcome = Outcome.EXHAUSTED
        try:
            self._dfs()
        except _Stop as stop:
            outcome = stop.outcome
        self.stats.wall_time = time.perf_counter() - start
        return self._result(outcome)

    def _result(self, outcome):
        s = self.stats
        if self.mode == "first":
            return SearchResult(outcome, self.best, s)
        if self.mode == "all":
            return SearchResult(outcome, self.found[0] if self.found else None, s,
                                solutions=list(self.found))
        proved = outcome is Outcome.EXHAUSTED
        if self.best is not None and outcome is Outcome.EXHAUSTED:
            outcome = Outcome.SOLUTION
        return SearchResult(outcome, self.best, s,
                            objective=self.best_value if self.best is not None else None,
                            proved_optimal=proved and self.best is not None)

    def _dfs(self):
        root = list(self.csp.domains)
        everything = list(range(len(self.cons)))
        # node: (doms, dyn, decisions, seeds, bound_version)
        stack = [(root, (), (), everything, self.bound_version)]
        deadline = None if self.time_limit is None else time.perf_counter() + self.time_limit
        while stack:
            doms, dyn, decisions, seeds, version = stack.pop()
            self.stats.nodes += 1
            if deadline is not None and self.stats.nodes % 256 == 0 \
                    and time.perf_counter() > deadline:
                raise _Stop(Outcome.TIMEOUT)
            if version != self.bound_version:
                seeds = list(seeds) + [self.bound_slot]
            try:
                self._propagate(doms, dyn, seeds)
            except Inconsistent:
                self._fail()
                continue
            var = self._select(doms)
            if var is None:
                self._on_solution(doms)
                continue
            val = self._value(doms[var])
            right = list(doms)
            right[var] &= ~(1 << val)
            new = self._symmetric_nogoods(doms, decisions, var, val) if self.sbds else []
            right_dyn = dyn + tuple(new)
            right_seeds = self.watch[var] + [-1 - i for i in range(len(dyn), len(right_dyn))]
            right_seeds += [-1 - i for i, c in enumerate(dyn) if var in c.variables()]
            stack.append((right, right_dyn, decisions, right_seeds, self.bound_version))
            left = list(doms)
            left[var] = 1 << val
            left_seeds = self.watch[var] + [-1 - i for i, c in enumerate(dyn) if var in c.variables()]
            stack.append((left, dyn, decisions + ((var, val),), left_seeds, self.bound_version))


def solve(csp: Csp, extra: Iterable[Constraint] = (), branch: BranchSpec = BranchSpec(),
          cutoff: int | None = None, sbds: Sequence[Symmetry] = (),
          time_limit: float | None = None) -> SearchResult:
    """First solution of ``csp`` plus ``extra``, or exhaustion, or the cutoff."""
    return Engine(csp, extra, branch, cutoff, "first", sbds, time_limit).run()


def solve_all(csp: Csp, extra: Iterable[Constraint] = (), branch: BranchSpec = BranchSpec(),
              sbds: Sequence[Symmetry] = (), cutoff: int | None = None) -> SearchResult:
    return Engine(csp, extra, branch, cutoff, "all", sbds).run()


def optimize(csp: Csp, extra: Iterable[Constraint] = (), branch: BranchSpec = BranchSpec(),
             budget: int | None = None, sbds: Sequence[Symmetry] = (),
             time_limit: float | None = None, incumbent: int | None = None) -> SearchResult:
    """Branch and bound: after each solution require a strictly better objective."""
    return Engine(csp, extra, branch, budget, "optimize", sbds, time_limit, incumbent).run()
