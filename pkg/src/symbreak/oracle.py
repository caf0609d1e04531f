"""Brute-force verification that shares no code with the propagators.

``enumerate_solutions`` is nested-loop generate-and-test.  The only pruning
is checking a constraint once all of its variables are assigned, plus the
pairwise part of all-different on the assigned prefix.  The proposition
checks quantify exhaustively over an enumerated group and solution set.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constraints import (AllDifferent, Constraint, HammingEq, LinearEq, Occurrence, _Linear,
                          bits)
from .csp import Csp
from .perm import (DEFAULT_GROUP_BOUND, Symmetry, SymmetryGroup, apply_assignment,
                   enumerate_group)
from .transform import Classification, SymBreakSet, apply_symmetry, apply_to_constraints

log = logging.getLogger(__name__)

DEFAULT_LEAF_BOUND = 10**8


class SearchSpaceTooLarge(Exception):
    pass


def static_order(csp: Csp) -> list:
    """Greedy static order: prefer variables that complete many constraints."""
    scopes = [c.variables() for c in csp.constraints]
    order, done = [], set()
    while len(order) < csp.n_vars:
        best = None
        for v in range(csp.n_vars):
            if v in done:
                continue
            closing = linked = 0
            for s in scopes:
                if v in s and len(s) < csp.n_vars:
                    linked += len(s & done)
                    closing += len(s - done) == 1
            score = (closing, linked)
            if best is None or score > best[0]:
                best = (score, v)
        order.append(best[1])
        done.add(best[1])
    return order


def _plan(csp: Csp, order: Sequence[int]):
    """Per depth: constraints completed there and all-different memberships."""
    depth_of = {v: d for d, v in enumerate(order)}
    complete = [[] for _ in order]
    distinct = [[] for _ in order]
    n_alldiff = 0
    for c in csp.constraints:
        if isinstance(c, AllDifferent):
            for v in c.items:
                distinct[depth_of[v.var]].append((v, n_alldiff))
            n_alldiff += 1
            continue
        last = max(depth_of[v.var] for v in c.views())
        complete[last].append(c)
    return complete, distinct, n_alldiff


def enumerate_solutions(csp: Csp, bound: int = DEFAULT_LEAF_BOUND,
                        order: Sequence[int] | None = None) -> set:
    """Every total assignment (internal values) satisfying all constraints.

    ``bound`` caps the number of value trials; exceeding it raises
    :class:`SearchSpaceTooLarge`.
    """
    n = csp.n_vars
    order = static_order(csp) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must list every variable once")
    complete, distinct, n_alldiff = _plan(csp, order)
    values = [list(bits(csp.domains[v])) for v in order]
    a = [None] * n
    used = [[] for _ in range(n_alldiff)]
    found = set()
    trials = 0

    def ok(depth) -> bool:
        for c in complete[depth]:
            if not c.eval(a):
                return False
        return True

    def walk(depth):
        nonlocal trials
        if depth == n:
            found.add(tuple(a))
            return
        var = order[depth]
        members = distinct[depth]
        for val in values[depth]:
            trials += 1
            if trials > bound:
                raise SearchSpaceTooLarge(f"more than {bound} trials")
            a[var] = val
            pushed = []
            clash = False
            for v, k in members:
                x = v.value(val)
                if x in used[k]:
                    clash = True
                    break
                used[k].append(x)
                pushed.append(k)
            if not clash and ok(depth):
                walk(depth + 1)
            for k in pushed:
                used[k].pop()
        a[var] = None

    walk(0)
    return found


# -- orbits -----------------------------------------------------------------

def orbit_partition(solutions, group: SymmetryGroup) -> list:
    """Partition ``solutions`` into orbits of the group generated by ``group``.

    Each orbit is explored by closure under the generators, so the result
    is exact whether or not the solution set is closed.
    """
    remaining = set(solutions)
    orbits = []
    for a in sorted(remaining):
        if a not in remaining:
            continue
        seen = {a}
        frontier = [a]
        while frontier:
            b = frontier.pop()
            for g in group.generators:
                c = apply_assignment(g, b)
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        orbit = frozenset(seen & remaining)
        remaining -= orbit
        orbits.append(orbit)
    return orbits


# -- vectorised group action -------------------------------------------------

class _Action:
    """Group elements as arrays so images of many assignments are cheap."""

    def __init__(self, elements: Sequence[Symmetry], n_vars: int, n_vals: int):
        self.elements = list(elements)
        self.var = np.array([g.var_perm.image for g in elements], dtype=np.int64).reshape(-1, n_vars)
        self.var_src = np.array([g.var_perm.inverse().image for g in elements],
                                dtype=np.int64).reshape(-1, n_vars)
        self.val = np.array([g.val_perm.image for g in elements], dtype=np.int64).reshape(-1, n_vals)
        self.n_vars, self.n_vals = n_vars, n_vals
        self.fits = n_vals ** max(n_vars, 1) < 2**62
        self.weights = (np.array([n_vals**i for i in range(n_vars)], dtype=np.int64)
                        if self.fits else None)

    def images(self, k: int, arr: np.ndarray) -> np.ndarray:
        """Images of the rows of ``arr`` under element ``k``."""
        return self.val[k][arr[:, self.var_src[k]]]

    def codes(self, arr: np.ndarray):
        if self.fits:
            return arr @ self.weights
        return [tuple(int(x) for x in row) for row in arr]

    def member(self, arr: np.ndarray, codeset) -> np.ndarray:
        if self.fits:
            return np.isin(self.codes(arr), codeset)
        return np.array([c in codeset for c in self.codes(arr)], dtype=bool)

    def codeset(self, arr: np.ndarray):
        if self.fits:
            return np.unique(self.codes(arr)) if len(arr) else np.zeros(0, dtype=np.int64)
        return set(self.codes(arr))


class _RowIndex:
    """Exact lookup of integer rows in a fixed table."""

    def __init__(self, rows: np.ndarray):
        self.rows = rows
        rng = np.random.default_rng(12345)
        self.w = rng.integers(1, 2**62, size=rows.shape[1], dtype=np.int64)
        h = self._hash(rows)
        self.order = np.argsort(h, kind="stable")
        self.sorted = h[self.order]

    def _hash(self, rows):
        with np.errstate(over="ignore"):
            return (rows * self.w).sum(axis=1) if rows.shape[1] else np.zeros(len(rows), np.int64)

    def find(self, rows: np.ndarray) -> np.ndarray:
        """Index of every row in the table, or -1."""
        if len(self.sorted) == 0:
            return np.full(len(rows), -1, dtype=np.int64)
        h = self._hash(rows)
        pos = np.searchsorted(self.sorted, h)
        out = np.full(len(rows), -1, dtype=np.int64)
        for i in range(len(rows)):
            p = pos[i]
            while p < len(self.sorted) and self.sorted[p] == h[i]:
                cand = self.order[p]
                if np.array_equal(self.rows[cand], rows[i]):
                    out[i] = cand
                    break
                p += 1
        return out

    def find_fast(self, rows: np.ndarray) -> np.ndarray:
        """As :meth:`find`, vectorised; falls back when hashes collide."""
        if len(self.sorted) == 0:
            return np.full(len(rows), -1, dtype=np.int64)
        if len(np.unique(self.sorted)) != len(self.sorted):
            return self.find(rows)
        h = self._hash(rows)
        pos = np.minimum(np.searchsorted(self.sorted, h), len(self.sorted) - 1)
        cand = self.order[pos]
        hit = (self.sorted[pos] == h) & (self.rows[cand] == rows).all(axis=1)
        return np.where(hit, cand, -1)


def _as_array(sols, n_vars) -> np.ndarray:
    if not sols:
        return np.zeros((0, n_vars), dtype=np.int64)
    return np.array(sorted(sols), dtype=np.int64)


# -- normal form for constraint sets -------------------------------------------

def _same_injective_map(views) -> bool:
    first = views[0]
    if any((v.a, v.b, v.table) != (first.a, first.b, first.table) for v in views):
        return False
    return first.table is None or len(set(first.table)) == len(first.table)


def _normal_form(c: Constraint):
    """A hashable key equal for constraints with the same solutions.

    Only rewrites that are equivalences are used: a common injective value
    map inside all-different is dropped, affine views inside linear
    constraints are expanded and the sign is normalised, and argument order
    is forgotten where the constraint is symmetric in it.
    """
    if isinstance(c, AllDifferent) and c.items and _same_injective_map(c.items):
        return ("alldifferent", frozenset(v.var for v in c.items))
    if isinstance(c, _Linear) and all(v.table is None for v in c.terms):
        coeff = {}
        rhs = c.rhs
        for k, v in zip(c.coeffs, c.terms):
            coeff[v.var] = coeff.get(v.var, 0) + k * v.a
            rhs -= k * v.b
        terms = sorted((x, k) for x, k in coeff.items() if k)
        if terms and terms[0][1] < 0 and isinstance(c, LinearEq):
            terms = [(x, -k) for x, k in terms]
            rhs = -rhs
        return (type(c).__name__, tuple(terms), rhs)
    if isinstance(c, Occurrence) and all(v.ident for v in c.items):
        return ("occurrence", frozenset(v.var for v in c.items), c.value, c.count)
    if isinstance(c, HammingEq) and all(v.ident for v in c.xs + c.ys):
        pairs = frozenset(frozenset((x.var, y.var)) for x, y in zip(c.xs, c.ys))
        if len(pairs) == len(c.xs):
            return ("hamming", pairs, c.distance)
    return c


# -- proposition checks -----------------------------------------------------

PROPOSITIONS = (
    "satisfiability",
    "solution-image",
    "fixed-solutions",
    "group-preservation",
    "soundness",
    "completeness",
    "representatives",
    "breaks-preservation",
    "no-symmetry-in-group",
)

_DNB, _BREAKS, _ELIM = 0, 1, 2
_CLASS = {_DNB: Classification.DOES_NOT_BREAK, _BREAKS: Classification.BREAKS,
          _ELIM: Classification.ELIMINATES}


@dataclass
class CheckResult:
    name: str
    instance: str
    passed: bool
    group_size: int
    solution_count: int
    orbit_count: int
    counterexample: tuple | None = None
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"\tcounterexample={self.counterexample}" if self.counterexample else ""
        note = f"\t{self.note}" if self.note else ""
        return (f"{self.name}\t{self.instance}\tgroup={self.group_size}\t"
                f"solutions={self.solution_count}\torbits={self.orbit_count}\t{status}{note}{extra}")


@dataclass
class Verifier:
    """Caches the enumerated group, solutions and survivors of every ``g(S)``."""
    csp: Csp
    group: SymmetryGroup
    sbc: SymBreakSet
    instance: str = "instance"
    bound: int = DEFAULT_GROUP_BOUND
    leaf_bound: int = DEFAULT_LEAF_BOUND
    order: Sequence[int] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.elements = enumerate_group(self.group, self.bound)
        self.solutions = enumerate_solutions(self.csp, self.leaf_bound, self.order)
        self.sol_list = sorted(self.solutions)
        self.sol_arr = _as_array(self.solutions, self.csp.n_vars)
        self.action = _Action(self.elements, self.csp.n_vars, self.csp.n_vals)
        self.sol_index = _RowIndex(self.sol_arr)
        self.orbits = orbit_partition(self.solutions, self.group)
        self.orbit_id = np.zeros(len(self.sol_arr), dtype=np.int64)
        index = {a: i for i, a in enumerate(self.sol_list)}
        for k, orb in enumerate(self.orbits):
            for a in orb:
                self.orbit_id[index[a]] = k
        self._img = None

    @property
    def img(self) -> np.ndarray:
        """``img[i, k]``: index of the image of solution ``i`` under element ``k``, or -1."""
        if self._img is None:
            cols = [self.sol_index.find_fast(self.action.images(k, self.sol_arr))
                    for k in range(len(self.elements))]
            self._img = (np.stack(cols, axis=1) if cols
                         else np.zeros((len(self.sol_arr), 0), dtype=np.int64))
        return self._img

    # survivors of g(S) among sol(C), by evaluating the transformed constraints
    def kept_mask(self, k: int) -> np.ndarray:
        if k not in self._cache:
            mask = np.ones(len(self.sol_arr), dtype=bool)
            if len(self.sol_arr):
                for c in apply_symmetry(self.elements[k], self.sbc).constraints:
                    mask &= c.eval_many(self.sol_arr)
            self._cache[k] = mask
        return self._cache[k]

    def kept(self, k: int) -> np.ndarray:
        return self.sol_arr[self.kept_mask(k)]

    def per_orbit(self, k: int) -> np.ndarray:
        return np.bincount(self.orbit_id[self.kept_mask(k)], minlength=len(self.orbits))

    def result(self, name, passed, counterexample=None, note=""):
        return CheckResult(name, self.instance, passed, len(self.elements), len(self.solutions),
                           len(self.orbits), counterexample, note)

    def _label(self, k):
        g = self.elements[k]
        return g.label or f"element#{k}"

    def _row(self, i):
        return tuple(int(x) for x in self.sol_arr[i])

    # individual checks

    def satisfiability(self):
        base = bool(self.kept_mask(0).any())
        for k in range(len(self.elements)):
            if bool(self.kept_mask(k).any()) != base:
                return self.result("satisfiability", False, (self._label(k),))
        return self.result("satisfiability", True)

    def solution_image(self):
        base = np.flatnonzero(self.kept_mask(0))
        for k in range(len(self.elements)):
            want = np.unique(self.img[base, k])
            got = np.flatnonzero(self.kept_mask(k))
            if not np.array_equal(want, got):
                return self.result("solution-image", False, (self._label(k),))
        return self.result("solution-image", True)

    def fixed_solutions(self):
        for k in range(len(self.elements)):
            outside = np.flatnonzero(self.img[:, k] < 0)
            if len(outside):
                return self.result("fixed-solutions", False,
                                   (self._label(k), self._row(outside[0])))
        return self.result("fixed-solutions", True)

    def group_preservation(self):
        """Every element of the group is a symmetry of every ``sigma(C)``.

        Closure of a finite set under the generators implies closure under
        the group, so only generators are applied to ``sol(sigma(C))``.
        Constraint sets with equal normal forms share one enumeration.
        """
        n = self.csp.n_vars
        gens = _Action(self.group.generators, n, self.csp.n_vals)
        done = set()
        for k, sigma in enumerate(self.elements):
            moved_cons = apply_to_constraints(sigma, self.csp.constraints)
            key = frozenset(_normal_form(c) for c in moved_cons)
            if key in done:
                continue
            done.add(key)
            moved = Csp(n, self.csp.n_vals, self.csp.domains, moved_cons, self.csp.value_offset)
            order = None
            if self.order is not None:
                order = [sigma.var_perm.image[i] for i in self.order]
            moved_arr = _as_array(enumerate_solutions(moved, self.leaf_bound, order), n)
            index = _RowIndex(moved_arr)
            for t in range(len(self.group.generators)):
                if (index.find_fast(gens.images(t, moved_arr)) < 0).any():
                    gen = self.group.generators[t]
                    return self.result("group-preservation", False,
                                       (self._label(k), gen.label or f"generator#{t}"))
        return self.result("group-preservation", True, note=f"{len(done)} distinct sigma(C)")

    def _orbit_property(self, name, holds):
        if not holds(self.per_orbit(0)):
            return self.result(name, True, note=f"vacuous: S is not {name[:-4]}")
        for k in range(len(self.elements)):
            if not holds(self.per_orbit(k)):
                return self.result(name, False, (self._label(k),))
        return self.result(name, True)

    def soundness(self):
        return self._orbit_property("soundness", lambda c: bool((c >= 1).all()))

    def completeness(self):
        return self._orbit_property("completeness", lambda c: bool((c <= 1).all()))

    def representatives(self):
        if not (self.per_orbit(0) >= 1).all():
            return self.result("representatives", True, note="vacuous: S is not sound")
        covered = np.zeros(len(self.sol_arr), dtype=bool)
        for k in range(len(self.elements)):
            covered |= self.kept_mask(k)
            if covered.all():
                return self.result("representatives", True)
        return self.result("representatives", False, (self._row(int(np.argmin(covered))),))

    def class_codes(self, k: int) -> np.ndarray:
        """Classification of every element against ``sol(C ∪ g_k(S))`` as codes."""
        mask = self.kept_mask(k)
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            return np.full(len(self.elements), _DNB, dtype=np.int64)
        sub = self.img[idx]
        inside = np.where(sub >= 0, mask[np.maximum(sub, 0)], False)
        all_in, none_in = inside.all(axis=0), ~inside.any(axis=0)
        return np.where(all_in, _DNB, np.where(none_in, _ELIM, _BREAKS))

    def classes(self, k: int) -> list:
        return [_CLASS[int(c)] for c in self.class_codes(k)]

    def _element_rows(self) -> np.ndarray:
        return np.concatenate([self.action.var, self.action.val], axis=1)

    def breaks_preservation(self):
        """``g(S)`` breaks (eliminates) ``t`` iff ``S`` does so for ``g⁻¹ t g``.

        Hence if ``S`` breaks (eliminates) every non-identity element, so does
        every ``g(S)``.
        """
        rows = self._element_rows()
        index = _RowIndex(rows)
        EV, EW = self.action.var, self.action.val
        base = self.class_codes(0)
        broken = lambda cl: bool((cl[1:] != _DNB).all())
        eliminated = lambda cl: bool((cl[1:] == _ELIM).all())
        for k in range(len(self.elements)):
            cls = self.class_codes(k)
            if broken(base) and not broken(cls):
                return self.result("breaks-preservation", False, (self._label(k), "breaks"))
            if eliminated(base) and not eliminated(cls):
                return self.result("breaks-preservation", False, (self._label(k), "eliminates"))
            gv, gw = EV[k], EW[k]
            inv_v, inv_w = np.argsort(gv), np.argsort(gw)
            conj = np.concatenate([inv_v[EV[:, gv]], inv_w[EW[:, gw]]], axis=1)
            where = index.find_fast(conj)
            if (where < 0).any():
                t = int(np.argmin(where))
                return self.result("breaks-preservation", False,
                                   (self._label(k), self._label(t), "not closed"))
            bad = np.flatnonzero(cls != base[where])
            if len(bad):
                return self.result("breaks-preservation", False,
                                   (self._label(k), self._label(int(bad[0]))))
        note = "S breaks every non-identity element" if broken(base) else ""
        return self.result("breaks-preservation", True, note=note)

    def no_symmetry_in_group(self):
        base = self.class_codes(0)
        kept = self.kept(0)
        for t in range(len(self.elements)):
            if base[t] == _DNB:
                continue
            moved = self.action.images(t, kept)
            ok = np.ones(len(moved), dtype=bool)
            for c in self.sbc.constraints:
                ok &= c.eval_many(moved)
            if ok.all():
                return self.result("no-symmetry-in-group", False, (self._label(t),))
        return self.result("no-symmetry-in-group", True)

    def run(self, name: str) -> CheckResult:
        if name not in PROPOSITIONS:
            raise ValueError(f"unknown proposition {name!r}")
        return getattr(self, name.replace("-", "_"))()

    def run_all(self) -> list:
        out = []
        for name in PROPOSITIONS:
            r = self.run(name)
            log.info(r.line())
            out.append(r)
        return out


def check_generators(csp: Csp, group: SymmetryGroup, leaf_bound: int = DEFAULT_LEAF_BOUND,
                     order: Sequence[int] | None = None, instance: str = "instance",
                     solutions=None) -> CheckResult:
    """Every generator maps ``sol(csp)`` into itself; needs no group enumeration."""
    sols = enumerate_solutions(csp, leaf_bound, order) if solutions is None else solutions
    arr = _as_array(sols, csp.n_vars)
    gens = _Action(group.generators, csp.n_vars, csp.n_vals)
    index = _RowIndex(arr)
    for t, g in enumerate(group.generators):
        where = index.find_fast(gens.images(t, arr))
        if (where < 0).any():
            bad = tuple(int(x) for x in arr[int(np.argmin(where))])
            return CheckResult("generators", instance, False, -1, len(arr), -1,
                               (g.label or f"generator#{t}", bad))
    return CheckResult("generators", instance, True, -1, len(arr), -1)


def check_proposition(name: str, bundle, s: SymBreakSet | None = None,
                      bound: int = DEFAULT_GROUP_BOUND) -> CheckResult:
    return verifier_for(bundle, s, bound).run(name)


def verifier_for(bundle, s: SymBreakSet | None = None,
                 bound: int = DEFAULT_GROUP_BOUND) -> Verifier:
    return Verifier(bundle.csp, bundle.group, bundle.sbc if s is None else s,
                    instance=bundle.name, bound=bound, order=bundle.oracle_order)


def verify(bundle, s: SymBreakSet | None = None, bound: int = DEFAULT_GROUP_BOUND) -> list:
    return verifier_for(bundle, s, bound).run_all()
