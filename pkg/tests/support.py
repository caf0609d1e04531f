"""Shared test helpers: reference squares and an exhaustive tuple oracle."""
from __future__ import annotations

import itertools
import random

import numpy as np

from symbreak.constraints import (AllDifferent, AtMostNValues, GreaterThanMax, HammingEq,
                                  Implies, Inconsistent, Less, LessEq, LessThanMin, Lex,
                                  LinearEq, LinearLe, Nogood, Occurrence, ValuePrecedence, View)

# The Khajuraho most-perfect square and three of its symmetric images,
# rows listed top to bottom (external values 1..16).
SQUARES = {
    1: ((14, 11, 5, 4), (1, 8, 10, 15), (12, 13, 3, 6), (7, 2, 16, 9)),
    2: ((4, 5, 11, 14), (15, 10, 8, 1), (6, 3, 13, 12), (9, 16, 2, 7)),
    3: ((3, 6, 12, 13), (16, 9, 7, 2), (5, 4, 14, 11), (10, 15, 1, 8)),
    4: ((13, 12, 6, 3), (2, 7, 9, 16), (11, 14, 4, 5), (8, 1, 15, 10)),
}


def square(k: int) -> tuple:
    """Reference square ``k`` as an internal (0-based) row-major assignment."""
    return tuple(v - 1 for row in SQUARES[k] for v in row)


N_VALS = 4
FULL = (1 << N_VALS) - 1


def random_view(var: int, rng: random.Random, shifts: bool = True) -> View:
    """Identity, inversion, a shift (arithmetic kinds only) or a random table."""
    kind = rng.randrange(4)
    if kind == 2 and not shifts:
        kind = 3
    if kind == 0:
        return View(var)
    if kind == 1:
        return View(var, -1, N_VALS - 1)
    if kind == 2:
        return View(var, 1, rng.choice((-1, 1)))
    table = list(range(N_VALS))
    rng.shuffle(table)
    return View(var, table=tuple(table))


def _views(k, rng, shifts=True):
    return tuple(random_view(i, rng, shifts) for i in range(k))


def catalog(k: int, rng: random.Random) -> list:
    """One random instance of every constraint kind over variables ``0..k-1``.

    Set-filtered kinds only get views that stay inside the value range, as
    a :class:`~symbreak.csp.Csp` requires.
    """
    vs = _views(k, rng)                  # arithmetic kinds
    ws = _views(k, rng, shifts=False)    # set-filtered kinds
    out = [
        LinearEq(vs, tuple(rng.choice((-2, -1, 1, 2)) for _ in vs), rng.randrange(-2, 7)),
        LinearLe(vs, tuple(rng.choice((-2, -1, 1, 2)) for _ in vs), rng.randrange(-2, 7)),
        AllDifferent(ws),
        Occurrence(ws, rng.randrange(N_VALS), rng.randrange(k + 1)),
        ValuePrecedence(ws),
        AtMostNValues(ws, rng.randrange(1, k + 1)),
        Nogood(tuple((w, rng.randrange(N_VALS)) for w in ws)),
    ]
    if k == 2:
        out += [Less(vs[0], vs[1]), LessEq(vs[0], vs[1])]
    if k >= 2:
        strict = rng.random() < 0.5
        out += [LessThanMin(vs[0], vs[1:], strict), GreaterThanMax(vs[0], vs[1:], strict)]
        guard = rng.choice((LinearEq(vs[:2], (1, 1), rng.randrange(7)), Less(vs[0], vs[1])))
        body = rng.choice((Less(vs[-1], vs[0]), LinearLe(vs, (1,) * k, rng.randrange(2 * k + 2)),
                           AllDifferent(ws), Occurrence(ws, rng.randrange(N_VALS), 1)))
        out.append(Implies(guard, body))
    if k % 2 == 0:
        h = k // 2
        out += [Lex(vs[:h], vs[h:], False), Lex(vs[:h], vs[h:], True),
                HammingEq(ws[:h], ws[h:], rng.randrange(h + 1))]
    return out


KINDS = ("LinearEq", "LinearLe", "AllDifferent", "Occurrence", "ValuePrecedence",
         "AtMostNValues", "Nogood", "Less", "LessEq", "LessThanMin", "GreaterThanMax",
         "Implies", "Lex", "HammingEq")


def kind_of(c) -> str:
    return type(c).__name__


class TupleOracle:
    """Truth table of a constraint over all ``N_VALS**k`` tuples."""

    def __init__(self, c, k: int):
        self.k = k
        self.tuples = np.array(list(itertools.product(range(N_VALS), repeat=k)), dtype=np.int64)
        self.sat = np.array([c.eval(tuple(t)) for t in self.tuples], dtype=bool)
        self.fast = c.eval_many(self.tuples)

    def supports(self, configs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per domain configuration: any satisfying tuple, and supported-value masks."""
        member = np.ones((len(configs), len(self.tuples)), dtype=bool)
        for v in range(self.k):
            member &= ((configs[:, v:v + 1] >> self.tuples[:, v][None, :]) & 1).astype(bool)
        ok = member & self.sat[None, :]
        masks = np.zeros((len(configs), self.k), dtype=np.int64)
        for v in range(self.k):
            for val in range(N_VALS):
                hit = ok[:, self.tuples[:, v] == val].any(axis=1)
                masks[:, v] |= hit.astype(np.int64) << val
        return ok.any(axis=1), masks


def all_configs(k: int) -> np.ndarray:
    return np.array(list(itertools.product(range(1, FULL + 1), repeat=k)), dtype=np.int64)


def run_propagate(c, doms: list):
    """Propagated copy of ``doms``, or ``None`` on failure."""
    doms = list(doms)
    changed = set()
    try:
        c.propagate(doms, changed)
    except Inconsistent:
        return None
    if any(d == 0 for d in doms):
        return None
    return doms


def soundness_violations(c, k: int, configs: np.ndarray) -> list:
    """Configurations where propagation removed a supported value or missed a violation."""
    oracle = TupleOracle(c, k)
    feasible, masks = oracle.supports(configs)
    bad = []
    for i, cfg in enumerate(configs.tolist()):
        out = run_propagate(c, cfg)
        if out is None:
            if feasible[i]:
                bad.append((cfg, "failed on a feasible configuration"))
            continue
        for v in range(k):
            if out[v] & ~cfg[v]:
                bad.append((cfg, f"domain of {v} grew"))
            if int(masks[i, v]) & ~out[v]:
                bad.append((cfg, f"removed a supported value of {v}"))
        fixed = all(d & (d - 1) == 0 for d in cfg)
        if fixed and not feasible[i]:
            bad.append((cfg, "accepted a violated ground tuple"))
    return bad
