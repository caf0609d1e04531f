"""Symmetries acting on sets of symmetry-breaking constraints.

A symmetry ``g = (sigma, theta)`` sends an assignment ``A`` to ``B`` with
``B[sigma[i]] = theta[A[i]]``.  For the image of a constraint to accept
exactly the images of the assignments the original accepts, every view on
variable ``i`` with value map ``f`` becomes a view on ``sigma[i]`` with map
``f ∘ theta⁻¹``.  For involutive value symmetries such as value inversion
this is the same as composing with ``theta``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .constraints import Constraint, GreaterThanMax, Less, LessThanMin, Lex, View, _Linear
from .csp import Csp
from .perm import DimensionMismatch, Symmetry, apply_assignment


@dataclass(frozen=True)
class SymBreakSet:
    constraints: tuple = ()
    label: str = "S"

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def eval(self, a: Sequence[int]) -> bool:
        return all(c.eval(a) for c in self.constraints)

    def show(self, fmt: Callable[[View], str] | None = None) -> str:
        if fmt is None:
            return "\n".join(str(c) for c in self.constraints)
        return "\n".join(c.show(fmt) for c in self.constraints)


def view_mapper(g: Symmetry) -> Callable[[View], View]:
    sigma = g.var_perm.image
    theta_inv = g.val_perm.inverse().image
    n_vars, n_vals = g.n_vars, g.n_vals

    def move(v: View) -> View:
        if v.var >= n_vars:
            raise DimensionMismatch(f"view on variable {v.var} outside {n_vars} variables")
        if v.table is not None and len(v.table) != n_vals:
            raise DimensionMismatch("value table does not match the value range")
        return v.precompose(theta_inv).renamed(sigma[v.var])

    return move


def apply_to_constraints(g: Symmetry, constraints: Iterable[Constraint]) -> tuple:
    move = view_mapper(g)
    return tuple(c.map_views(move) for c in constraints)


def apply_symmetry(g: Symmetry, s: SymBreakSet) -> SymBreakSet:
    """Image of a symmetry-breaking set under ``g`` (not simplified)."""
    label = s.label if g.is_identity() else f"{g.label or 'g'}({s.label})"
    return SymBreakSet(apply_to_constraints(g, s.constraints), label)


# -- simplification ---------------------------------------------------------

def _negated(v: View, b: int) -> View:
    """View of ``b - f(x)``."""
    return v.postcompose_affine(-1, b)


def _is_inverted(v: View) -> bool:
    return v.table is None and v.a == -1


def simplify_constraint(c: Constraint) -> Constraint:
    if isinstance(c, Less):
        l, r = c.left, c.right
        if _is_inverted(l) and _is_inverted(r) and l.b == r.b:
            return type(c)(View(r.var), View(l.var))
        return c
    if isinstance(c, (LessThanMin, GreaterThanMax)) and _is_inverted(c.x):
        dual = GreaterThanMax if isinstance(c, LessThanMin) else LessThanMin
        b = c.x.b
        return dual(View(c.x.var), tuple(_negated(y, b) for y in c.ys), c.strict)
    if isinstance(c, Lex):
        views = c.xs + c.ys
        b = views[0].b
        if all(_is_inverted(v) and v.b == b for v in views):
            return Lex(tuple(View(v.var) for v in c.ys), tuple(View(v.var) for v in c.xs),
                       c.strict)
        return c
    if isinstance(c, _Linear):
        terms, coeffs, rhs = [], [], c.rhs
        for k, v in zip(c.coeffs, c.terms):
            if v.table is None and not v.ident:
                terms.append(View(v.var))
                coeffs.append(k * v.a)
                rhs -= k * v.b
            else:
                terms.append(v)
                coeffs.append(k)
        return type(c)(tuple(terms), tuple(coeffs), rhs)
    return c


def simplify(s: SymBreakSet) -> SymBreakSet:
    """Normalise value-inverted comparisons; the solution set is unchanged."""
    return SymBreakSet(tuple(simplify_constraint(c) for c in s.constraints), s.label)


# -- breaks / eliminates ----------------------------------------------------

class Classification(enum.Enum):
    ELIMINATES = "eliminates"
    BREAKS = "breaks-not-eliminates"
    DOES_NOT_BREAK = "does-not-break"


def surviving(solutions: Iterable[Sequence[int]], s: Iterable[Constraint]) -> set:
    cons = tuple(s)
    return {a for a in solutions if all(c.eval(a) for c in cons)}


def classify_solutions(kept: set, g: Symmetry) -> Classification:
    """Classify ``g`` against the solution set left by the breaking constraints."""
    images_kept = [apply_assignment(g, a) in kept for a in kept]
    if not kept or all(images_kept):
        return Classification.DOES_NOT_BREAK
    if not any(images_kept):
        return Classification.ELIMINATES
    return Classification.BREAKS


def classify(csp: Csp, s: SymBreakSet, g: Symmetry, bound: int | None = None,
             solutions: Iterable[Sequence[int]] | None = None) -> Classification:
    """Exact breaks/eliminates classification by enumerating ``sol(csp)``.

    An empty ``sol(csp ∪ S)`` neither breaks nor eliminates anything.
    """
    if solutions is None:
        from .csp import sol

        solutions = sol(csp, bound)
    return classify_solutions(surviving(solutions, s), g)


# -- pretty printing --------------------------------------------------------

def external_formatter(name_of: Callable[[int], str], offset: int,
                       table_name: str = "θ") -> Callable[[View], str]:
    """Render views in external values, e.g. ``17-X[4,1]`` for an inverted view."""
    def fmt(v: View) -> str:
        name = name_of(v.var)
        if v.ident:
            return name
        if v.table is not None:
            return f"{table_name}({name})"
        if v.a == 1:
            return f"{name}{v.b:+d}"
        return f"{v.b + 2 * offset}-{name}"

    return fmt


def show(s: SymBreakSet, csp: Csp | None = None) -> str:
    if csp is None:
        return s.show()
    return s.show(external_formatter(csp.var_name, csp.value_offset))
