"""Constraint catalog over value-mapped variable views.

Every constraint is an immutable description.  ``eval`` gives its truth on
a total assignment, ``propagate`` filters a list of bitmask domains in place
(bit ``v`` set means internal value ``v`` is still possible) and raises
:class:`Inconsistent` on a wipeout.  All propagators are sound: they never
remove a value that has a support in the constraint taken on its own.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np


class Inconsistent(Exception):
    """A domain became empty."""


# -- bitmask helpers --------------------------------------------------------

def bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(values) -> int:
    m = 0
    for v in values:
        if v >= 0:
            m |= 1 << v
    return m


MAX_VALUE = 1 << 12  # no domain in this package gets near this


def range_mask(lo: int, hi: int) -> int:
    lo = max(lo, 0)
    hi = min(hi, MAX_VALUE)
    if hi < lo:
        return 0
    return ((1 << (hi + 1)) - 1) ^ ((1 << lo) - 1)


def low(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def high(mask: int) -> int:
    return mask.bit_length() - 1


def is_single(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def _narrow(doms: list, changed: set, var: int, keep: int) -> bool:
    d = doms[var]
    nd = d & keep
    if nd == d:
        return False
    if not nd:
        raise Inconsistent
    doms[var] = nd
    changed.add(var)
    return True


# -- views ------------------------------------------------------------------

@dataclass(frozen=True)
class View:
    """Variable ``var`` seen through a value map.

    The map is ``x -> a*x + b`` unless ``table`` is given, in which case it
    is ``x -> table[x]``.
    """
    var: int
    a: int = 1
    b: int = 0
    table: tuple | None = None
    ident: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.table is None and self.a not in (1, -1):
            raise ValueError("affine views need a in {+1, -1}")
        object.__setattr__(self, "ident", self.table is None and self.a == 1 and self.b == 0)

    def value(self, x: int) -> int:
        if self.table is not None:
            return self.table[x]
        return self.a * x + self.b

    def values(self, arr: np.ndarray) -> np.ndarray:
        """Mapped values of column ``var`` for every row of ``arr``."""
        col = arr[:, self.var]
        if self.table is not None:
            return np.asarray(self.table, dtype=np.int64)[col]
        return self.a * col + self.b

    def renamed(self, var: int) -> View:
        return replace(self, var=var)

    def precompose(self, perm: Sequence[int]) -> View:
        """View of ``f(perm(x))`` where ``f`` is this view's map."""
        n = len(perm)
        if all(perm[x] == x for x in range(n)):
            return self
        if self.table is None:
            if all(perm[x] == n - 1 - x for x in range(n)):
                return View(self.var, -self.a, self.a * (n - 1) + self.b)
        return View(self.var, table=tuple(self.value(perm[x]) for x in range(n)))

    def postcompose_affine(self, a: int, b: int) -> View:
        """View of ``a*f(x) + b``."""
        if self.table is not None:
            return View(self.var, table=tuple(a * v + b for v in self.table))
        return View(self.var, a * self.a, a * self.b + b)

    def is_affine(self, a: int, b: int) -> bool:
        return self.table is None and self.a == a and self.b == b

    # domain side

    def dom(self, doms) -> int:
        d = doms[self.var]
        if self.ident:
            return d
        if self.table is None and self.a == 1:
            return d << self.b if self.b >= 0 else d >> -self.b
        m = 0
        for x in bits(d):
            y = self.value(x)
            if y >= 0:
                m |= 1 << y
        return m

    def min(self, doms) -> int:
        d = doms[self.var]
        if self.table is None:
            if self.a == 1:
                return low(d) + self.b
            return self.b - high(d)
        return min(self.table[x] for x in bits(d))

    def max(self, doms) -> int:
        d = doms[self.var]
        if self.table is None:
            if self.a == 1:
                return high(d) + self.b
            return self.b - low(d)
        return max(self.table[x] for x in bits(d))

    def fixed(self, doms) -> bool:
        return is_single(doms[self.var])

    def narrow(self, doms, changed, keep: int) -> bool:
        """Keep only variable values whose image lies in ``keep``."""
        if self.ident:
            return _narrow(doms, changed, self.var, keep)
        if self.table is None and self.a == 1:
            pre = keep >> self.b if self.b >= 0 else keep << -self.b
            return _narrow(doms, changed, self.var, pre)
        pre = 0
        for x in bits(doms[self.var]):
            y = self.value(x)
            if y >= 0 and (keep >> y) & 1:
                pre |= 1 << x
        return _narrow(doms, changed, self.var, pre)

    def narrow_range(self, doms, changed, lo: int, hi: int) -> bool:
        if self.table is None:
            if self.a == 1:
                return _narrow(doms, changed, self.var, range_mask(lo - self.b, hi - self.b))
            return _narrow(doms, changed, self.var, range_mask(self.b - hi, self.b - lo))
        return self.narrow(doms, changed, range_mask(lo, hi))

    def remove(self, doms, changed, value: int) -> bool:
        if value < 0:
            return False
        return self.narrow(doms, changed, ~(1 << value))


def _fmt_view(v: View) -> str:
    if v.ident:
        return f"X{v.var}"
    if v.table is not None:
        return f"T(X{v.var})"
    if v.a == 1:
        return f"X{v.var}{v.b:+d}"
    return f"{v.b}-X{v.var}"


def _plain_vars(views) -> tuple | None:
    """Variable indices when every view is the identity, else ``None``."""
    if all(v.ident for v in views):
        return tuple(v.var for v in views)
    return None


# -- base -------------------------------------------------------------------

class Constraint:
    """Base class; subclasses are frozen dataclasses."""
    value_based = False

    def views(self) -> tuple:
        raise NotImplementedError

    def map_views(self, fn: Callable[[View], View]) -> Constraint:
        raise NotImplementedError

    def value_views(self) -> tuple:
        """Views whose values are filtered as sets, so must stay in the value range."""
        return self.views() if self.value_based else ()

    def eval(self, a: Sequence[int]) -> bool:
        raise NotImplementedError

    def eval_many(self, arr: np.ndarray) -> np.ndarray:
        """``eval`` over every row of a 2-d array of total assignments."""
        return np.fromiter((self.eval(row) for row in arr.tolist()), dtype=bool, count=len(arr))

    def propagate(self, doms: list, changed: set) -> None:
        raise NotImplementedError

    def variables(self) -> frozenset:
        return frozenset(v.var for v in self.views())

    def entailed(self, doms) -> bool:
        if all(is_single(doms[v.var]) for v in self.views()):
            return self.eval(_fixed_assignment(doms))
        return False

    def disentailed(self, doms) -> bool:
        if all(is_single(doms[v.var]) for v in self.views()):
            return not self.eval(_fixed_assignment(doms))
        return False

    def show(self, fmt: Callable[[View], str] = _fmt_view) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.show()


class _FixedValues:
    """Lazy ``a[var]`` over fixed domains."""
    __slots__ = ("doms",)

    def __init__(self, doms):
        self.doms = doms

    def __getitem__(self, var):
        return low(self.doms[var])


def _fixed_assignment(doms):
    return _FixedValues(doms)


def _vals(views, a):
    return [v.value(a[v.var]) for v in views]


def _stack(views, arr) -> np.ndarray:
    if not views:
        return np.zeros((len(arr), 0), dtype=np.int64)
    return np.stack([v.values(arr) for v in views], axis=1)


def _le_pair(doms, changed, l: View, r: View, strict: int):
    """Enforce ``l + strict <= r`` by bounds."""
    rmax = r.max(doms)
    if l.max(doms) > rmax - strict:
        l.narrow_range(doms, changed, -1 << 60, rmax - strict)
    lmin = l.min(doms)
    if r.min(doms) < lmin + strict:
        r.narrow_range(doms, changed, lmin + strict, 1 << 60)


# -- linear -----------------------------------------------------------------

def _floordiv(a, b):
    return a // b


def _ceildiv(a, b):
    return -((-a) // b)


@dataclass(frozen=True)
class _Linear(Constraint):
    terms: tuple  # of View
    coeffs: tuple
    rhs: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.terms) != len(self.coeffs):
            raise ValueError("coefficient list must match view list")
        plain = all(v.ident for v in self.terms) and all(c == 1 for c in self.coeffs)
        object.__setattr__(self, "_plain", tuple(v.var for v in self.terms) if plain else None)

    def views(self):
        return self.terms

    def map_views(self, fn):
        return replace(self, terms=tuple(fn(v) for v in self.terms))

    def lhs(self, a):
        return sum(c * v.value(a[v.var]) for c, v in zip(self.coeffs, self.terms))

    def lhs_many(self, arr):
        total = np.zeros(len(arr), dtype=np.int64)
        for c, v in zip(self.coeffs, self.terms):
            total += c * v.values(arr)
        return total

    def _bounds(self, doms):
        los, his = [], []
        for c, v in zip(self.coeffs, self.terms):
            lo, hi = v.min(doms), v.max(doms)
            if c >= 0:
                los.append(c * lo)
                his.append(c * hi)
            else:
                los.append(c * hi)
                his.append(c * lo)
        return los, his

    def _filter_plain(self, doms, changed, upper_only):
        # unit coefficients on plain variables: the common sum constraint
        xs, rhs = self._plain, self.rhs
        while True:
            los = [(doms[x] & -doms[x]).bit_length() - 1 for x in xs]
            his = [doms[x].bit_length() - 1 for x in xs]
            smin, smax = sum(los), sum(his)
            if smin > rhs or (not upper_only and smax < rhs):
                raise Inconsistent
            moved = False
            for x, lo, hi in zip(xs, los, his):
                new_hi = rhs - smin + lo
                new_lo = lo if upper_only else rhs - smax + hi
                if new_hi < hi or new_lo > lo:
                    d = doms[x] & range_mask(new_lo, new_hi)
                    if not d:
                        raise Inconsistent
                    if d != doms[x]:
                        doms[x] = d
                        changed.add(x)
                        moved = True
            if not moved:
                return

    def _filter(self, doms, changed, upper_only: bool):
        if self._plain is not None:
            return self._filter_plain(doms, changed, upper_only)
        while True:
            los, his = self._bounds(doms)
            smin, smax = sum(los), sum(his)
            if smin > self.rhs or (not upper_only and smax < self.rhs):
                raise Inconsistent
            moved = False
            for i, (c, v) in enumerate(zip(self.coeffs, self.terms)):
                if c == 0:
                    continue
                hi_t = self.rhs - (smin - los[i])
                lo_t = None if upper_only else self.rhs - (smax - his[i])
                if c > 0:
                    hi = _floordiv(hi_t, c)
                    lo = -1 << 60 if lo_t is None else _ceildiv(lo_t, c)
                else:
                    lo = _ceildiv(hi_t, c)
                    hi = (1 << 60) if lo_t is None else _floordiv(lo_t, c)
                if v.min(doms) < lo or v.max(doms) > hi:
                    if v.narrow_range(doms, changed, lo, hi):
                        moved = True
            if not moved:
                return


@dataclass(frozen=True)
class LinearEq(_Linear):
    def eval(self, a):
        return self.lhs(a) == self.rhs

    def eval_many(self, arr):
        return self.lhs_many(arr) == self.rhs

    def propagate(self, doms, changed):
        self._filter(doms, changed, upper_only=False)

    def entailed(self, doms):
        los, his = self._bounds(doms)
        return sum(los) == sum(his) == self.rhs

    def disentailed(self, doms):
        los, his = self._bounds(doms)
        return sum(los) > self.rhs or sum(his) < self.rhs

    def propagate_negation(self, doms, changed):
        free = [(c, v) for c, v in zip(self.coeffs, self.terms)
                if c != 0 and not is_single(doms[v.var])]
        if len(free) > 1:
            return
        rest = sum(c * v.min(doms) for c, v in zip(self.coeffs, self.terms)
                   if c == 0 or is_single(doms[v.var]))
        if not free:
            if rest == self.rhs:
                raise Inconsistent
            return
        c, v = free[0]
        if (self.rhs - rest) % c == 0:
            v.remove(doms, changed, (self.rhs - rest) // c)

    def show(self, fmt=_fmt_view):
        return f"{_fmt_sum(self, fmt)} = {self.rhs}"


@dataclass(frozen=True)
class LinearLe(_Linear):
    def eval(self, a):
        return self.lhs(a) <= self.rhs

    def eval_many(self, arr):
        return self.lhs_many(arr) <= self.rhs

    def propagate(self, doms, changed):
        self._filter(doms, changed, upper_only=True)

    def entailed(self, doms):
        return sum(self._bounds(doms)[1]) <= self.rhs

    def disentailed(self, doms):
        return sum(self._bounds(doms)[0]) > self.rhs

    def propagate_negation(self, doms, changed):
        LinearLe(self.terms, tuple(-c for c in self.coeffs), -self.rhs - 1).propagate(doms, changed)

    def show(self, fmt=_fmt_view):
        return f"{_fmt_sum(self, fmt)} <= {self.rhs}"


def _fmt_sum(lin, fmt):
    parts = []
    for c, v in zip(lin.coeffs, lin.terms):
        s = fmt(v)
        parts.append(s if c == 1 else f"{c}*{s}")
    return " + ".join(parts)


# -- orderings --------------------------------------------------------------

@dataclass(frozen=True)
class Less(Constraint):
    left: View
    right: View

    strict = 1
    symbol = "<"

    def views(self):
        return (self.left, self.right)

    def map_views(self, fn):
        return replace(self, left=fn(self.left), right=fn(self.right))

    def eval(self, a):
        return self.left.value(a[self.left.var]) + self.strict <= self.right.value(a[self.right.var])

    def eval_many(self, arr):
        return self.left.values(arr) + self.strict <= self.right.values(arr)

    def propagate(self, doms, changed):
        _le_pair(doms, changed, self.left, self.right, self.strict)

    def entailed(self, doms):
        return self.left.max(doms) + self.strict <= self.right.min(doms)

    def disentailed(self, doms):
        return self.left.min(doms) + self.strict > self.right.max(doms)

    def negation(self) -> Constraint:
        other = LessEq if self.strict else Less
        return other(self.right, self.left)

    def propagate_negation(self, doms, changed):
        self.negation().propagate(doms, changed)

    def show(self, fmt=_fmt_view):
        return f"{fmt(self.left)} {self.symbol} {fmt(self.right)}"


@dataclass(frozen=True)
class LessEq(Less):
    strict = 0
    symbol = "<="


@dataclass(frozen=True)
class LessThanMin(Constraint):
    """``x < min(ys)`` (``x <= min(ys)`` when not strict)."""
    x: View
    ys: tuple
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ys", tuple(self.ys))

    def views(self):
        return (self.x,) + self.ys

    def map_views(self, fn):
        return replace(self, x=fn(self.x), ys=tuple(fn(y) for y in self.ys))

    def eval(self, a):
        xv = self.x.value(a[self.x.var])
        m = min(_vals(self.ys, a))
        return xv < m if self.strict else xv <= m

    def eval_many(self, arr):
        xv, m = self.x.values(arr), _stack(self.ys, arr).min(axis=1)
        return xv < m if self.strict else xv <= m

    def propagate(self, doms, changed):
        s = int(self.strict)
        while True:
            before = [doms[v.var] for v in self.views()]
            for y in self.ys:
                _le_pair(doms, changed, self.x, y, s)
            if [doms[v.var] for v in self.views()] == before:
                return

    def show(self, fmt=_fmt_view):
        op = "<" if self.strict else "<="
        return f"{fmt(self.x)} {op} min({', '.join(fmt(y) for y in self.ys)})"


@dataclass(frozen=True)
class GreaterThanMax(Constraint):
    """``x > max(ys)`` (``x >= max(ys)`` when not strict)."""
    x: View
    ys: tuple
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ys", tuple(self.ys))

    def views(self):
        return (self.x,) + self.ys

    def map_views(self, fn):
        return replace(self, x=fn(self.x), ys=tuple(fn(y) for y in self.ys))

    def eval(self, a):
        xv = self.x.value(a[self.x.var])
        m = max(_vals(self.ys, a))
        return xv > m if self.strict else xv >= m

    def eval_many(self, arr):
        xv, m = self.x.values(arr), _stack(self.ys, arr).max(axis=1)
        return xv > m if self.strict else xv >= m

    def propagate(self, doms, changed):
        s = int(self.strict)
        while True:
            before = [doms[v.var] for v in self.views()]
            for y in self.ys:
                _le_pair(doms, changed, y, self.x, s)
            if [doms[v.var] for v in self.views()] == before:
                return

    def show(self, fmt=_fmt_view):
        op = ">" if self.strict else ">="
        return f"{fmt(self.x)} {op} max({', '.join(fmt(y) for y in self.ys)})"


# -- all-different ----------------------------------------------------------

@dataclass(frozen=True)
class AllDifferent(Constraint):
    value_based = True
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "_plain", _plain_vars(self.items))

    def views(self):
        return self.items

    def map_views(self, fn):
        return replace(self, items=tuple(fn(v) for v in self.items))

    def eval(self, a):
        vals = _vals(self.items, a)
        return len(set(vals)) == len(vals)

    def eval_many(self, arr):
        vals = np.sort(_stack(self.items, arr), axis=1)
        return (vals[:, 1:] != vals[:, :-1]).all(axis=1)

    def propagate(self, doms, changed):
        items = self.items
        if self._plain is not None:
            return self._propagate_plain(doms, changed)
        done = 0  # bitmask of positions already used for removal
        while True:
            progress = False
            union = 0
            for i, v in enumerate(items):
                m = v.dom(doms)
                union |= m
                if (done >> i) & 1 or not is_single(m):
                    continue
                done |= 1 << i
                progress = True
                val = low(m)
                for j, w in enumerate(items):
                    if j != i:
                        w.remove(doms, changed, val)
            if union.bit_count() < len(items):
                raise Inconsistent
            if not progress:
                return

    def _propagate_plain(self, doms, changed):
        vars_ = self._plain
        fixed = 0
        while True:
            new_fixed = 0
            union = 0
            for x in vars_:
                d = doms[x]
                if d & (d - 1) == 0:
                    if d & fixed:
                        continue
                    if d & new_fixed:
                        raise Inconsistent
                    new_fixed |= d
                union |= d
            union |= fixed
            if union.bit_count() < len(vars_):
                raise Inconsistent
            if not new_fixed:
                return
            fixed |= new_fixed
            for x in vars_:
                d = doms[x]
                if d & (d - 1) and d & fixed:
                    d &= ~fixed
                    if not d:
                        raise Inconsistent
                    doms[x] = d
                    changed.add(x)

    def show(self, fmt=_fmt_view):
        return f"alldifferent({', '.join(fmt(v) for v in self.items)})"


# -- lexicographic ordering -------------------------------------------------

@dataclass(frozen=True)
class Lex(Constraint):
    """``xs <=lex ys`` (``<lex`` when strict)."""
    xs: tuple
    ys: tuple
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "ys", tuple(self.ys))
        if len(self.xs) != len(self.ys):
            raise ValueError("lex vectors must have equal length")

    def views(self):
        return self.xs + self.ys

    def map_views(self, fn):
        return replace(self, xs=tuple(fn(v) for v in self.xs), ys=tuple(fn(v) for v in self.ys))

    def eval(self, a):
        xv, yv = _vals(self.xs, a), _vals(self.ys, a)
        return xv < yv if self.strict else xv <= yv

    def eval_many(self, arr):
        xv, yv = _stack(self.xs, arr), _stack(self.ys, arr)
        differ = xv != yv
        first = differ.argmax(axis=1)
        rows = np.arange(len(arr))
        below = xv[rows, first] < yv[rows, first]
        return np.where(differ.any(axis=1), below, not self.strict)

    def _tail_possible(self, doms, start) -> bool:
        """Can positions ``start..`` still come out lex-below (or equal)?"""
        for x, y in zip(self.xs[start:], self.ys[start:]):
            xmin, ymax = x.min(doms), y.max(doms)
            if xmin < ymax:
                return True
            if xmin > ymax:
                return False
        return not self.strict

    def propagate(self, doms, changed):
        n = len(self.xs)
        alpha = 0
        while True:
            while alpha < n:
                x, y = self.xs[alpha], self.ys[alpha]
                if x.fixed(doms) and y.fixed(doms) and x.min(doms) == y.min(doms):
                    alpha += 1
                else:
                    break
            if alpha == n:
                if self.strict:
                    raise Inconsistent
                return
            x, y = self.xs[alpha], self.ys[alpha]
            strict = 0 if self._tail_possible(doms, alpha + 1) else 1
            _le_pair(doms, changed, x, y, strict)
            if not (x.fixed(doms) and y.fixed(doms) and x.min(doms) == y.min(doms)):
                return

    def show(self, fmt=_fmt_view):
        op = "<lex" if self.strict else "<=lex"
        return f"[{', '.join(fmt(v) for v in self.xs)}] {op} [{', '.join(fmt(v) for v in self.ys)}]"


def LexLe(xs, ys):
    return Lex(xs, ys, strict=False)


def LexLess(xs, ys):
    return Lex(xs, ys, strict=True)


# -- counting ---------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence(Constraint):
    """Exactly ``count`` of the views take ``value``."""
    value_based = True
    items: tuple
    value: int
    count: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "_plain", _plain_vars(self.items))

    def views(self):
        return self.items

    def map_views(self, fn):
        return replace(self, items=tuple(fn(v) for v in self.items))

    def eval(self, a):
        return _vals(self.items, a).count(self.value) == self.count

    def eval_many(self, arr):
        return (_stack(self.items, arr) == self.value).sum(axis=1) == self.count

    def propagate(self, doms, changed):
        if self._plain is not None:
            return self._propagate_plain(doms, changed)
        bit = 1 << self.value
        sure, maybe = [], []
        for v in self.items:
            m = v.dom(doms)
            if m & bit:
                (sure if m == bit else maybe).append(v)
        if len(sure) > self.count or len(sure) + len(maybe) < self.count:
            raise Inconsistent
        if len(sure) == self.count:
            for v in maybe:
                v.remove(doms, changed, self.value)
        elif len(sure) + len(maybe) == self.count:
            for v in maybe:
                v.narrow(doms, changed, bit)

    def _propagate_plain(self, doms, changed):
        bit = 1 << self.value
        sure = 0
        maybe = []
        for x in self._plain:
            m = doms[x]
            if m & bit:
                if m == bit:
                    sure += 1
                else:
                    maybe.append(x)
        if sure > self.count or sure + len(maybe) < self.count:
            raise Inconsistent
        if sure == self.count:
            for x in maybe:
                doms[x] &= ~bit
                changed.add(x)
        elif sure + len(maybe) == self.count:
            for x in maybe:
                doms[x] = bit
                changed.add(x)

    def show(self, fmt=_fmt_view):
        return f"count([{', '.join(fmt(v) for v in self.items)}], {self.value}) = {self.count}"


@dataclass(frozen=True)
class HammingEq(Constraint):
    """The vectors differ in exactly ``distance`` positions."""
    value_based = True
    xs: tuple
    ys: tuple
    distance: int

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "ys", tuple(self.ys))
        if len(self.xs) != len(self.ys):
            raise ValueError("hamming vectors must have equal length")
        plain = _plain_vars(self.xs + self.ys)
        n = len(self.xs)
        object.__setattr__(self, "_pairs", None if plain is None
                           else tuple(zip(plain[:n], plain[n:])))

    def views(self):
        return self.xs + self.ys

    def map_views(self, fn):
        return replace(self, xs=tuple(fn(v) for v in self.xs), ys=tuple(fn(v) for v in self.ys))

    def eval(self, a):
        return sum(p != q for p, q in zip(_vals(self.xs, a), _vals(self.ys, a))) == self.distance

    def eval_many(self, arr):
        return (_stack(self.xs, arr) != _stack(self.ys, arr)).sum(axis=1) == self.distance

    def propagate(self, doms, changed):
        if self._pairs is not None:
            return self._propagate_plain(doms, changed)
        while True:
            differ = 0
            open_ = []
            for x, y in zip(self.xs, self.ys):
                mx, my = x.dom(doms), y.dom(doms)
                if not mx & my:
                    differ += 1
                elif not (mx == my and is_single(mx)):
                    open_.append((x, y, mx, my))
            if differ > self.distance or differ + len(open_) < self.distance:
                raise Inconsistent
            moved = False
            if differ == self.distance:
                for x, y, mx, my in open_:
                    both = mx & my
                    moved |= x.narrow(doms, changed, both)
                    moved |= y.narrow(doms, changed, both)
            elif differ + len(open_) == self.distance:
                for x, y, mx, my in open_:
                    if is_single(mx):
                        moved |= y.narrow(doms, changed, ~mx)
                    if is_single(my):
                        moved |= x.narrow(doms, changed, ~my)
            if not moved:
                return

    def _propagate_plain(self, doms, changed):
        pairs = self._pairs
        dist = self.distance
        while True:
            differ = 0
            open_ = []
            for x, y in pairs:
                mx, my = doms[x], doms[y]
                if not mx & my:
                    differ += 1
                elif mx != my or mx & (mx - 1):
                    open_.append((x, y, mx, my))
            if differ > dist or differ + len(open_) < dist:
                raise Inconsistent
            moved = False
            if differ == dist:
                for x, y, mx, my in open_:
                    both = mx & my
                    if both != mx:
                        doms[x] = both
                        changed.add(x)
                        moved = True
                    if both != my:
                        doms[y] = both
                        changed.add(y)
                        moved = True
            elif differ + len(open_) == dist:
                for x, y, mx, my in open_:
                    if mx & (mx - 1) == 0:
                        moved |= _narrow(doms, changed, y, ~mx)
                    if my & (my - 1) == 0:
                        moved |= _narrow(doms, changed, x, ~my)
            if not moved:
                return

    def show(self, fmt=_fmt_view):
        return (f"hamming([{', '.join(fmt(v) for v in self.xs)}], "
                f"[{', '.join(fmt(v) for v in self.ys)}]) = {self.distance}")


@dataclass(frozen=True)
class ValuePrecedence(Constraint):
    """Values appear in first-use order: ``x0 = 0`` and ``xj <= 1 + max(x0..x{j-1})``."""
    value_based = True
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def views(self):
        return self.items

    def map_views(self, fn):
        return replace(self, items=tuple(fn(v) for v in self.items))

    def eval(self, a):
        top = -1
        for v in _vals(self.items, a):
            if v > top + 1:
                return False
            top = max(top, v)
        return True

    def eval_many(self, arr):
        vals = _stack(self.items, arr)
        if vals.shape[1] == 0:
            return np.ones(len(arr), dtype=bool)
        before = np.maximum.accumulate(np.maximum(vals, -1), axis=1)
        before = np.concatenate([np.full((len(arr), 1), -1), before[:, :-1]], axis=1)
        return (vals <= before + 1).all(axis=1)

    def propagate(self, doms, changed):
        top = -1
        for v in self.items:
            if v.max(doms) > top + 1:
                v.narrow_range(doms, changed, -1 << 60, top + 1)
            top = max(top, v.max(doms))

    def show(self, fmt=_fmt_view):
        return f"precedence({', '.join(fmt(v) for v in self.items)})"


@dataclass(frozen=True)
class AtMostNValues(Constraint):
    """At most ``limit`` distinct values among the views."""
    value_based = True
    items: tuple
    limit: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def views(self):
        return self.items

    def map_views(self, fn):
        return replace(self, items=tuple(fn(v) for v in self.items))

    def eval(self, a):
        return len(set(_vals(self.items, a))) <= self.limit

    def eval_many(self, arr):
        vals = np.sort(_stack(self.items, arr), axis=1)
        if vals.shape[1] == 0:
            return np.full(len(arr), 0 <= self.limit)
        return 1 + (vals[:, 1:] != vals[:, :-1]).sum(axis=1) <= self.limit

    def propagate(self, doms, changed):
        used = 0
        for v in self.items:
            m = v.dom(doms)
            if is_single(m):
                used |= m
        n = used.bit_count()
        if n > self.limit:
            raise Inconsistent
        if n == self.limit:
            for v in self.items:
                v.narrow(doms, changed, used)

    def show(self, fmt=_fmt_view):
        return f"nvalues({', '.join(fmt(v) for v in self.items)}) <= {self.limit}"


# -- logical ----------------------------------------------------------------

GUARD_KINDS = (LinearEq, LinearLe, Less)


@dataclass(frozen=True)
class Implies(Constraint):
    guard: Constraint
    body: Constraint

    def __post_init__(self):
        if not isinstance(self.guard, GUARD_KINDS):
            raise TypeError("guard must be a linear or ordering constraint")

    def views(self):
        return self.guard.views() + self.body.views()

    def map_views(self, fn):
        return Implies(self.guard.map_views(fn), self.body.map_views(fn))

    def value_views(self):
        return self.guard.value_views() + self.body.value_views()

    def eval(self, a):
        return not self.guard.eval(a) or self.body.eval(a)

    def eval_many(self, arr):
        return ~self.guard.eval_many(arr) | self.body.eval_many(arr)

    def propagate(self, doms, changed):
        if self.guard.disentailed(doms):
            return
        if self.guard.entailed(doms):
            self.body.propagate(doms, changed)
        elif self.body.disentailed(doms):
            self.guard.propagate_negation(doms, changed)

    def show(self, fmt=_fmt_view):
        return f"{self.guard.show(fmt)} -> {self.body.show(fmt)}"


@dataclass(frozen=True)
class Nogood(Constraint):
    """Not all of the literals ``view == value`` hold at once."""
    value_based = True
    literals: tuple  # of (View, int)

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))

    def views(self):
        return tuple(v for v, _ in self.literals)

    def map_views(self, fn):
        return Nogood(tuple((fn(v), val) for v, val in self.literals))

    def eval(self, a):
        return not all(v.value(a[v.var]) == val for v, val in self.literals)

    def eval_many(self, arr):
        hold = np.ones(len(arr), dtype=bool)
        for v, val in self.literals:
            hold &= v.values(arr) == val
        return ~hold

    def propagate(self, doms, changed):
        pending = None
        for v, val in self.literals:
            m = v.dom(doms)
            if val < 0 or not (m >> val) & 1:
                return
            if m != 1 << val:
                if pending is not None:
                    return
                pending = (v, val)
        if pending is None:
            raise Inconsistent
        pending[0].remove(doms, changed, pending[1])

    def show(self, fmt=_fmt_view):
        return "not(" + " & ".join(f"{fmt(v)} = {val}" for v, val in self.literals) + ")"


def check_value_ranges(constraints: Iterable[Constraint], domains: Sequence[int],
                       n_vals: int) -> None:
    """Reject set-filtered views that map a domain value outside ``0..n_vals-1``."""
    for c in constraints:
        for v in c.value_views():
            for x in bits(domains[v.var]):
                y = v.value(x)
                if not 0 <= y < n_vals:
                    raise ValueError(f"{c}: view maps value {x} of variable {v.var} to {y}, "
                                     f"outside 0..{n_vals - 1}")


def identity_views(indices) -> tuple:
    return tuple(View(i) for i in indices)
