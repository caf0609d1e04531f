"""Permutations and combined variable/value symmetries.

A :class:`Symmetry` pairs a permutation of variable indices with a
permutation of the (0-based, contiguous) value range.  It acts on a total
assignment ``A`` by ``B[var_perm[i]] = val_perm[A[i]]``.  Composition reads
right to left: ``compose(g, h)`` applies ``h`` first.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Assignment = tuple  # tuple[int, ...], one internal value index per variable

DEFAULT_GROUP_BOUND = 10_000
DEFAULT_WORD_LENGTH = 50


class GroupTooLarge(Exception):
    def __init__(self, bound):
        super().__init__(f"generated group exceeds {bound} elements")
        self.bound = bound


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    image: tuple

    def __post_init__(self):
        image = tuple(self.image)
        object.__setattr__(self, "image", image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"not a bijection on 0..{len(image) - 1}: {image}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        image = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                image[a] = b
        return cls(tuple(image))

    def __len__(self):
        return len(self.image)

    def __getitem__(self, i):
        return self.image[i]

    def __call__(self, i):
        return self.image[i]

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.image))

    def compose(self, other: Permutation) -> Permutation:
        """``self ∘ other``: apply ``other`` first."""
        if len(self) != len(other):
            raise DimensionMismatch(f"permutation sizes {len(self)} and {len(other)}")
        img = self.image
        return Permutation(tuple(img[j] for j in other.image))

    def inverse(self) -> Permutation:
        inv = [0] * len(self.image)
        for i, v in enumerate(self.image):
            inv[v] = i
        return Permutation(tuple(inv))


@dataclass(frozen=True)
class Symmetry:
    var_perm: Permutation
    val_perm: Permutation
    label: str = field(default="", compare=False, hash=False)

    @classmethod
    def identity(cls, n_vars: int, n_vals: int) -> Symmetry:
        return cls(Permutation.identity(n_vars), Permutation.identity(n_vals), "id")

    @classmethod
    def of_variables(cls, image: Sequence[int], n_vals: int, label: str = "") -> Symmetry:
        return cls(Permutation(tuple(image)), Permutation.identity(n_vals), label)

    @classmethod
    def of_values(cls, n_vars: int, image: Sequence[int], label: str = "") -> Symmetry:
        return cls(Permutation.identity(n_vars), Permutation(tuple(image)), label)

    @property
    def n_vars(self) -> int:
        return len(self.var_perm)

    @property
    def n_vals(self) -> int:
        return len(self.val_perm)

    def is_identity(self) -> bool:
        return self.var_perm.is_identity() and self.val_perm.is_identity()

    def key(self):
        return (self.var_perm.image, self.val_perm.image)

    def with_label(self, label: str) -> Symmetry:
        return Symmetry(self.var_perm, self.val_perm, label)

    def __str__(self):
        return self.label or f"Symmetry({self.var_perm.image}, {self.val_perm.image})"

    def to_json(self, offset: int = 0) -> str:
        return json.dumps({
            "var_perm": list(self.var_perm.image),
            "val_perm": list(self.val_perm.image),
            "offset": offset,
            "label": self.label,
        })

    @classmethod
    def from_json(cls, text: str) -> Symmetry:
        data = json.loads(text)
        return cls(Permutation(tuple(data["var_perm"])), Permutation(tuple(data["val_perm"])),
                   data.get("label", ""))


def _check_dims(g: Symmetry, h: Symmetry):
    if g.n_vars != h.n_vars or g.n_vals != h.n_vals:
        raise DimensionMismatch(
            f"symmetries act on ({g.n_vars} vars, {g.n_vals} values) and "
            f"({h.n_vars} vars, {h.n_vals} values)")


def compose(g: Symmetry, h: Symmetry) -> Symmetry:
    """Return ``g ∘ h``, the symmetry that applies ``h`` and then ``g``."""
    _check_dims(g, h)
    if h.is_identity():
        label = g.label
    elif g.is_identity():
        label = h.label
    else:
        label = f"{g.label}∘{h.label}" if g.label and h.label else ""
    return Symmetry(g.var_perm.compose(h.var_perm), g.val_perm.compose(h.val_perm), label)


def inverse(g: Symmetry) -> Symmetry:
    label = f"{g.label}⁻¹" if g.label and g.label != "id" else g.label
    return Symmetry(g.var_perm.inverse(), g.val_perm.inverse(), label)


def apply_assignment(g: Symmetry, a: Sequence[int]) -> Assignment:
    """Image of a total assignment: ``B[var_perm[i]] = val_perm[A[i]]``."""
    if len(a) != g.n_vars:
        raise DimensionMismatch(f"assignment has {len(a)} variables, symmetry {g.n_vars}")
    if any(v is None for v in a):
        raise ValueError("apply_assignment needs a total assignment")
    sigma, theta = g.var_perm.image, g.val_perm.image
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[sigma[i]] = theta[v]
    return tuple(out)


def apply_literal(g: Symmetry, var: int, val: int) -> tuple[int, int]:
    """Image of the single assignment ``X_var = val``."""
    return g.var_perm.image[var], g.val_perm.image[val]


# -- groups -----------------------------------------------------------------

@dataclass(frozen=True)
class ValueSymmetric:
    """Full symmetric group on a set of values."""
    values: tuple


@dataclass(frozen=True)
class BlockSymmetric:
    """Full symmetric group on a block of interchangeable variables."""
    block: tuple


@dataclass(frozen=True)
class RowColumn:
    """Row permutations × column permutations of a matrix of variables.

    ``grid[r][c]`` is the variable index at row ``r``, column ``c``.
    """
    grid: tuple


@dataclass(frozen=True)
class Explicit:
    elements: tuple


Factor = ValueSymmetric | BlockSymmetric | RowColumn | Explicit


@dataclass(frozen=True)
class SymmetryGroup:
    n_vars: int
    n_vals: int
    generators: tuple = ()
    structure: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.structure is not None:
            object.__setattr__(self, "structure", tuple(self.structure))
        for g in self.generators:
            if g.n_vars != self.n_vars or g.n_vals != self.n_vals:
                raise DimensionMismatch(f"generator {g} does not match group dimensions")

    def identity(self) -> Symmetry:
        return Symmetry.identity(self.n_vars, self.n_vals)


def _factor_sample(factor, n_vars: int, n_vals: int, rng: random.Random) -> Symmetry:
    var_img = list(range(n_vars))
    val_img = list(range(n_vals))
    if isinstance(factor, ValueSymmetric):
        shuffled = list(factor.values)
        rng.shuffle(shuffled)
        for src, dst in zip(factor.values, shuffled):
            val_img[src] = dst
    elif isinstance(factor, BlockSymmetric):
        shuffled = list(factor.block)
        rng.shuffle(shuffled)
        for src, dst in zip(factor.block, shuffled):
            var_img[src] = dst
    elif isinstance(factor, RowColumn):
        grid = factor.grid
        rows = list(range(len(grid)))
        cols = list(range(len(grid[0])))
        rng.shuffle(rows)
        rng.shuffle(cols)
        for r, row in enumerate(grid):
            for c, var in enumerate(row):
                var_img[var] = grid[rows[r]][cols[c]]
    elif isinstance(factor, Explicit):
        return rng.choice(factor.elements)
    else:
        raise TypeError(f"unknown group factor {factor!r}")
    return Symmetry(Permutation(tuple(var_img)), Permutation(tuple(val_img)))


def random_element(group: SymmetryGroup, rng: random.Random,
                   word_length: int = DEFAULT_WORD_LENGTH) -> Symmetry:
    """Sample a group element.

    With a structure descriptor each independent factor is sampled uniformly
    and the samples are composed, which is exactly uniform on a direct
    product.  Otherwise a random word over generators and their inverses is
    multiplied out.
    """
    g = group.identity()
    if group.structure is not None:
        parts = [_factor_sample(f, group.n_vars, group.n_vals, rng) for f in group.structure]
        for part in parts:
            g = compose(part, g)
        labels = [p.label for p in parts]
        return g.with_label("∘".join(reversed(labels)) if all(labels) else "random")
    letters = [s for gen in group.generators for s in (gen, inverse(gen))]
    if not letters:
        return g
    for _ in range(word_length):
        g = compose(rng.choice(letters), g)
    return g.with_label("random")


def enumerate_group(group: SymmetryGroup, bound: int = DEFAULT_GROUP_BOUND) -> list[Symmetry]:
    """Breadth-first closure of the generators; identity first."""
    ident = group.identity()
    seen = {ident.key(): ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for gen in group.generators:
            h = compose(gen, g)
            if h.key() not in seen:
                if len(seen) >= bound:
                    raise GroupTooLarge(bound)
                if not h.label and g.label and gen.label:
                    h = h.with_label(f"{gen.label}∘{g.label}" if g.label != "id" else gen.label)
                seen[h.key()] = h
                queue.append(h)
    return list(seen.values())


def structure_size(group: SymmetryGroup) -> int | None:
    """Order of the group described by the structure descriptor, if any."""
    if group.structure is None:
        return None
    from math import factorial

    size = 1
    for f in group.structure:
        if isinstance(f, ValueSymmetric):
            size *= factorial(len(f.values))
        elif isinstance(f, BlockSymmetric):
            size *= factorial(len(f.block))
        elif isinstance(f, RowColumn):
            size *= factorial(len(f.grid)) * factorial(len(f.grid[0]))
        else:
            size *= len(f.elements)
    return size


def symmetric_group_generators(items: Sequence[int]) -> list[tuple]:
    """A transposition and a full cycle; together they generate Sym(items)."""
    items = list(items)
    if len(items) < 2:
        return []
    gens = [(items[0], items[1])]
    if len(items) > 2:
        gens.append(tuple(items))
    return gens


def orbit(a: Sequence[int], group: SymmetryGroup | Iterable[Symmetry],
          bound: int = DEFAULT_GROUP_BOUND) -> set:
    """Images of ``a`` under every element of a group (enumerated) or an element list."""
    elements = enumerate_group(group, bound) if isinstance(group, SymmetryGroup) else group
    return {apply_assignment(g, a) for g in elements}
