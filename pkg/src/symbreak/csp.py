"""Variables, finite domains, problem container and solution checking."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .constraints import (AtMostNValues, Constraint, LinearLe, View, bits,
                          check_value_ranges, high, low, mask_of)


@dataclass(frozen=True)
class Domain:
    """Finite set of internal value indices stored as a bitmask."""
    mask: int

    @classmethod
    def of(cls, values: Iterable[int]) -> Domain:
        return cls(mask_of(values))

    @classmethod
    def interval(cls, lo: int, hi: int) -> Domain:
        return cls(mask_of(range(lo, hi + 1)))

    @property
    def empty(self) -> bool:
        return self.mask == 0

    @property
    def min(self) -> int:
        return low(self.mask)

    @property
    def max(self) -> int:
        return high(self.mask)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, v: int) -> bool:
        return v >= 0 and bool((self.mask >> v) & 1)

    def __iter__(self):
        return bits(self.mask)

    def __len__(self):
        return self.size


@dataclass(frozen=True)
class Objective:
    """Quantity to minimise.

    ``kind`` is ``"var"`` (the value of a single variable) or ``"nvalues"``
    (number of distinct values over ``variables``; invariant under any
    value permutation, which is what graph colouring needs).
    """
    kind: str
    variables: tuple

    def value(self, a: Sequence[int]) -> int:
        if self.kind == "var":
            return a[self.variables[0]]
        return len({a[i] for i in self.variables})

    def below(self, bound: int) -> Constraint:
        """Constraint ``objective < bound``."""
        if self.kind == "var":
            return LinearLe((View(self.variables[0]),), (1,), bound - 1)
        return AtMostNValues(tuple(View(i) for i in self.variables), bound - 1)


@dataclass(frozen=True)
class Csp:
    n_vars: int
    n_vals: int
    domains: tuple  # of int bitmasks
    constraints: tuple = ()
    value_offset: int = 0
    objective: Objective | None = None
    name_of: Callable[[int], str] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(self.domains) != self.n_vars:
            raise ValueError("one domain per variable required")
        full = (1 << self.n_vals) - 1
        for d in self.domains:
            if d & ~full:
                raise ValueError("domain value outside the value range")
        for c in self.constraints:
            for v in c.views():
                if not 0 <= v.var < self.n_vars:
                    raise ValueError(f"constraint {c} references unknown variable {v.var}")
        check_value_ranges(self.constraints, self.domains, self.n_vals)

    @classmethod
    def build(cls, n_vars: int, values: Sequence[int], constraints=(), objective=None,
              name_of=None) -> Csp:
        """Uniform domain over the external ``values`` (a contiguous range)."""
        lo, hi = min(values), max(values)
        n_vals = hi - lo + 1
        dom = mask_of(v - lo for v in values)
        return cls(n_vars, n_vals, (dom,) * n_vars, tuple(constraints), lo, objective, name_of)

    def with_constraints(self, extra: Iterable[Constraint]) -> Csp:
        return Csp(self.n_vars, self.n_vals, self.domains, self.constraints + tuple(extra),
                   self.value_offset, self.objective, self.name_of)

    def domain(self, i: int) -> Domain:
        return Domain(self.domains[i])

    def to_external(self, a: Sequence[int]) -> tuple:
        return tuple(v + self.value_offset for v in a)

    def to_internal(self, a: Sequence[int]) -> tuple:
        return tuple(v - self.value_offset for v in a)

    def var_name(self, i: int) -> str:
        return self.name_of(i) if self.name_of else f"X{i}"

    def in_domains(self, a: Sequence[int]) -> bool:
        return len(a) == self.n_vars and all((d >> v) & 1 for d, v in zip(self.domains, a))

    def is_solution(self, a: Sequence[int]) -> bool:
        return self.in_domains(a) and all(c.eval(a) for c in self.constraints)


def satisfies(a: Sequence[int], c: Constraint | Iterable[Constraint]) -> bool:
    """Truth of a constraint (or every constraint of a collection) on a total assignment."""
    if any(v is None for v in a):
        raise ValueError("satisfies needs a total assignment")
    if isinstance(c, Constraint):
        return c.eval(a)
    return all(ci.eval(a) for ci in c)


def sol(csp: Csp, bound: int | None = None) -> set:
    """All solutions, by the generate-and-test enumerator."""
    from .oracle import DEFAULT_LEAF_BOUND, enumerate_solutions

    return enumerate_solutions(csp, DEFAULT_LEAF_BOUND if bound is None else bound)
