"""Model builders: magic squares, random graph colouring, EFPA.

Each builder returns a :class:`ModelBundle` with the problem, its symmetry
group and a canonical symmetry-breaking set.

Magic square cells are indexed row-major, ``var = row * n + col``.  Names
follow the ``X[i,j]`` convention where ``i`` is the column and ``j`` the
row (1-based), so ``X[n,1]`` is the top-right corner.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .constraints import (AllDifferent, HammingEq, LessEq, LessThanMin, Less, LexLe, LinearEq,
                          Occurrence, ValuePrecedence, View)
from .csp import Csp, Objective
from .perm import (BlockSymmetric, Explicit, Permutation, RowColumn, Symmetry, SymmetryGroup,
                   ValueSymmetric, compose, enumerate_group, symmetric_group_generators)
from .transform import SymBreakSet


@dataclass(frozen=True)
class ModelBundle:
    csp: Csp
    group: SymmetryGroup
    sbc: SymBreakSet
    name: str
    meta: dict = field(default_factory=dict, compare=False, hash=False)
    oracle_order: tuple | None = None

    def render(self, a: Sequence[int]) -> str:
        renderer = self.meta.get("render")
        if renderer is None:
            return " ".join(str(v) for v in self.csp.to_external(a))
        return renderer(a)


# -- squares ----------------------------------------------------------------

class Square:
    """Index helpers and named geometric symmetries for an ``n`` by ``n`` grid."""

    def __init__(self, n: int):
        self.n = n
        self.cells = n * n

    def cell(self, row: int, col: int) -> int:
        return row * self.n + col

    def X(self, i: int, j: int) -> int:
        """Variable ``X[i,j]``: column ``i``, row ``j``, both 1-based."""
        return self.cell(j - 1, i - 1)

    def name(self, var: int) -> str:
        r, c = divmod(var, self.n)
        return f"X[{c + 1},{r + 1}]"

    def _geometric(self, f: Callable[[int, int], tuple], n_vals: int, label: str) -> Symmetry:
        image = [0] * self.cells
        for r in range(self.n):
            for c in range(self.n):
                image[self.cell(r, c)] = self.cell(*f(r, c))
        return Symmetry(Permutation(tuple(image)), Permutation.identity(n_vals), label)

    def geometric(self, n_vals: int) -> dict:
        m = self.n - 1
        moves = {
            "id": lambda r, c: (r, c),
            "σ_90": lambda r, c: (c, m - r),
            "σ_180": lambda r, c: (m - r, m - c),
            "σ_270": lambda r, c: (m - c, r),
            "σ_v": lambda r, c: (r, m - c),
            "σ_h": lambda r, c: (m - r, c),
            "σ_d": lambda r, c: (c, r),
            "σ_ad": lambda r, c: (m - c, m - r),
        }
        return {k: self._geometric(f, n_vals, k) for k, f in moves.items()}

    def render(self, ext: Sequence[int]) -> str:
        width = max(len(str(v)) for v in ext)
        rule = "+" + "+".join("-" * (width + 2) for _ in range(self.n)) + "+"
        lines = [rule]
        for r in range(self.n):
            row = ext[r * self.n:(r + 1) * self.n]
            lines.append("| " + " | ".join(str(v).rjust(width) for v in row) + " |")
            lines.append(rule)
        return "\n".join(lines)


def value_inversion(n_vars: int, n_vals: int) -> Symmetry:
    return Symmetry(Permutation.identity(n_vars),
                    Permutation(tuple(n_vals - 1 - k for k in range(n_vals))), "θ_inv")


def _magic_constraints(sq: Square, offset: int) -> list:
    n = sq.n
    total = n * (n * n + 1) // 2 - n * offset
    ones = (1,) * n
    lines = [[sq.cell(r, c) for c in range(n)] for r in range(n)]
    lines += [[sq.cell(r, c) for r in range(n)] for c in range(n)]
    lines.append([sq.cell(k, k) for k in range(n)])
    lines.append([sq.cell(k, n - 1 - k) for k in range(n)])
    cons = [AllDifferent(tuple(View(i) for i in range(sq.cells)))]
    cons += [LinearEq(tuple(View(i) for i in line), ones, total) for line in lines]
    return cons


def _corner_sbc(sq: Square, n_vals: int, strict_inverse: bool) -> SymBreakSet:
    """Smallest corner top left, bottom left below top right, and the value-inversion guard."""
    n = sq.n
    x11, x1n, xn1, xnn = sq.X(1, 1), sq.X(1, n), sq.X(n, 1), sq.X(n, n)
    inv = lambda v: View(v, -1, n_vals - 1)
    return SymBreakSet((
        LessThanMin(View(x11), (View(x1n), View(xn1), View(xnn))),
        Less(View(x1n), View(xn1)),
        LessThanMin(View(x11), tuple(inv(v) for v in (x11, x1n, xn1, xnn)), strict_inverse),
    ), "S")


def _explicit_group(n_vars, n_vals, gens, named) -> SymmetryGroup:
    base = SymmetryGroup(n_vars, n_vals, tuple(gens))
    elements = enumerate_group(base)
    by_key = {g.key(): g for g in named}
    elements = tuple(by_key.get(g.key(), g) for g in elements)
    return SymmetryGroup(n_vars, n_vals, tuple(gens), (Explicit(elements),))


def _named_square_elements(geo: dict, inv: Symmetry) -> list:
    named = list(geo.values())
    named += [compose(inv, g).with_label("θ_inv" if k == "id" else f"θ_inv∘{k}")
              for k, g in geo.items()]
    return named


def most_perfect_magic_square(n: int) -> ModelBundle:
    if n < 4 or n % 4:
        raise ValueError("most-perfect magic squares need n divisible by 4")
    sq = Square(n)
    n_vals = n * n
    offset = 1
    cons = _magic_constraints(sq, offset)
    block = 2 * (n * n + 1) - 4 * offset
    for r in range(n):
        for c in range(n):
            cells = [sq.cell(r, c), sq.cell(r, (c + 1) % n),
                     sq.cell((r + 1) % n, c), sq.cell((r + 1) % n, (c + 1) % n)]
            cons.append(LinearEq(tuple(View(i) for i in cells), (1, 1, 1, 1), block))
    pair = n * n + 1 - 2 * offset
    h = n // 2
    for k in range(h):
        for a, b in ((sq.cell(k, k), sq.cell(k + h, k + h)),
                     (sq.cell(k, n - 1 - k), sq.cell(k + h, n - 1 - k - h))):
            cons.append(LinearEq((View(a), View(b)), (1, 1), pair))
    csp = Csp.build(n * n, range(1, n * n + 1), cons, name_of=sq.name)
    geo = sq.geometric(n_vals)
    inv = value_inversion(n * n, n_vals)
    group = _explicit_group(n * n, n_vals, (geo["σ_90"], geo["σ_v"], inv),
                            _named_square_elements(geo, inv))
    symmetries = {g.label: g for g in group.structure[0].elements}
    return ModelBundle(csp, group, _corner_sbc(sq, n_vals, strict_inverse=True),
                       f"most-perfect-{n}",
                       {"n": n, "square": sq, "symmetries": symmetries,
                        "render": lambda a: sq.render(csp.to_external(a))})


def magic_square(n: int, group: str = "dihedral") -> ModelBundle:
    """Plain magic square.

    ``group`` picks the posted symmetry group: ``"rotations"`` (4),
    ``"dihedral"`` (8) or ``"full"`` (16, adds value inversion).
    """
    if n < 2:
        raise ValueError("magic squares need n >= 2")
    sq = Square(n)
    n_vals = n * n
    csp = Csp.build(n * n, range(1, n * n + 1), _magic_constraints(sq, 1), name_of=sq.name)
    geo = sq.geometric(n_vals)
    inv = value_inversion(n * n, n_vals)
    if group == "rotations":
        gens = (geo["σ_90"],)
    elif group == "dihedral":
        gens = (geo["σ_90"], geo["σ_v"])
    elif group == "full":
        gens = (geo["σ_90"], geo["σ_v"], inv)
    else:
        raise ValueError(f"unknown square group {group!r}")
    grp = _explicit_group(n * n, n_vals, gens, _named_square_elements(geo, inv))
    symmetries = {g.label: g for g in grp.structure[0].elements}
    return ModelBundle(csp, grp, _corner_sbc(sq, n_vals, strict_inverse=False),
                       f"magic-{n}",
                       {"n": n, "square": sq, "symmetries": symmetries, "group": group,
                        "render": lambda a: sq.render(csp.to_external(a))})


# -- graph colouring --------------------------------------------------------

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream; fixed so generated instances are portable.

    state += 0x9E3779B97F4A7C15, then
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9,
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB,
    output z ^ (z >> 31), all mod 2**64.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def coin(self) -> bool:
        return bool(self.next() >> 63)

    def below(self, k: int) -> int:
        return self.next() % k


def random_partitioned_graph(vertex_count: int, partition_max_size: int, seed: int):
    """Blocks of consecutive vertices with all-or-none edges inside and between blocks.

    Draw order: block sizes ``1 + below(max)`` until the vertices are covered
    (the last block is truncated), then one coin per block (clique?), then
    one coin per block pair in lexicographic order (biclique?).
    """
    if vertex_count < 1:
        raise ValueError("need at least one vertex")
    rng = SplitMix64(seed)
    blocks, start = [], 0
    while start < vertex_count:
        size = min(1 + rng.below(partition_max_size), vertex_count - start)
        blocks.append(tuple(range(start, start + size)))
        start += size
    edges = set()
    for b in blocks:
        if rng.coin():
            edges.update(itertools.combinations(b, 2))
    for b1, b2 in itertools.combinations(blocks, 2):
        if rng.coin():
            edges.update((u, v) for u in b1 for v in b2)
    return blocks, sorted(edges)


def coloring_bundle(vertex_count: int, edges, blocks=None, colors: int | None = None,
                    name: str = "coloring") -> ModelBundle:
    k = vertex_count if colors is None else colors
    edges = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
    blocks = [tuple(b) for b in (blocks or [(i,) for i in range(vertex_count)])]
    cons = [_not_equal(u, v) for u, v in edges]
    objective = Objective("nvalues", tuple(range(vertex_count)))
    csp = Csp.build(vertex_count, range(k), cons, objective=objective,
                    name_of=lambda i: f"v{i}")
    gens, structure = [], []
    for b in blocks:
        for cyc in symmetric_group_generators(b):
            gens.append(Symmetry(Permutation.from_cycles(vertex_count, cyc),
                                 Permutation.identity(k), f"swap{cyc}" if len(cyc) == 2 else f"cycle{cyc}"))
        if len(b) > 1:
            structure.append(BlockSymmetric(b))
    for cyc in symmetric_group_generators(range(k)):
        gens.append(Symmetry(Permutation.identity(vertex_count), Permutation.from_cycles(k, cyc),
                             f"colors{cyc}" if len(cyc) == 2 else "colors-cycle"))
    structure.append(ValueSymmetric(tuple(range(k))))
    group = SymmetryGroup(vertex_count, k, tuple(gens), tuple(structure))
    sbc = [ValuePrecedence(tuple(View(i) for i in range(vertex_count)))]
    for b in blocks:
        sbc += [LessEq(View(u), View(v)) for u, v in zip(b, b[1:])]
    meta = {"edges": edges, "blocks": blocks, "colors": k,
            "render": lambda a: " ".join(f"v{i}:{c}" for i, c in enumerate(a))}
    return ModelBundle(csp, group, SymBreakSet(tuple(sbc), "S"), name, meta)


def _not_equal(u: int, v: int):
    return AllDifferent((View(u), View(v)))


def graph_coloring(vertex_count: int, partition_max_size: int, seed: int,
                   colors: int | None = None) -> ModelBundle:
    blocks, edges = random_partitioned_graph(vertex_count, partition_max_size, seed)
    return coloring_bundle(vertex_count, edges, blocks, colors,
                           f"coloring-{vertex_count}-{partition_max_size}-{seed}")


def to_dimacs(vertex_count: int, edges) -> str:
    lines = [f"p edge {vertex_count} {len(edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in edges]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> tuple[int, list]:
    n, edges = None, []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
    if n is None:
        raise ValueError("missing 'p edge' line")
    return n, edges


# -- EFPA -------------------------------------------------------------------

def efpa(v: int, q: int, lam: int, d: int) -> ModelBundle:
    """``v`` words of length ``q*lam`` over ``q`` symbols, each used ``lam``
    times per word, pairwise Hamming distance ``d``.

    The bundle is named ``efpa-q-lam-d-v``, the usual order of instance names.
    """
    if min(v, q, lam) < 1 or d < 0:
        raise ValueError("EFPA parameters must be positive")
    length = q * lam
    grid = tuple(tuple(r * length + c for c in range(length)) for r in range(v))
    rows = [tuple(View(i) for i in row) for row in grid]
    cols = [tuple(View(grid[r][c]) for r in range(v)) for c in range(length)]
    cons = [Occurrence(row, s, lam) for row in rows for s in range(q)]
    cons += [HammingEq(a, b, d) for a, b in itertools.combinations(rows, 2)]
    csp = Csp.build(v * length, range(q), cons, name_of=lambda i: f"X[{i // length + 1},{i % length + 1}]")
    n = v * length
    gens = []
    for cyc in symmetric_group_generators(range(v)):
        image = list(range(n))
        for r, r2 in zip(cyc, cyc[1:] + cyc[:1]):
            for c in range(length):
                image[grid[r][c]] = grid[r2][c]
        gens.append(Symmetry(Permutation(tuple(image)), Permutation.identity(q), f"rows{cyc}"))
    for cyc in symmetric_group_generators(range(length)):
        image = list(range(n))
        for c, c2 in zip(cyc, cyc[1:] + cyc[:1]):
            for r in range(v):
                image[grid[r][c]] = grid[r][c2]
        gens.append(Symmetry(Permutation(tuple(image)), Permutation.identity(q), f"cols{cyc}"))
    group = SymmetryGroup(n, q, tuple(gens), (RowColumn(grid),))
    sbc = [LexLe(a, b) for a, b in zip(rows, rows[1:])]
    sbc += [LexLe(a, b) for a, b in zip(cols, cols[1:])]

    def render(a):
        return "\n".join("".join(str(a[i]) for i in row) for row in grid)

    return ModelBundle(csp, group, SymBreakSet(tuple(sbc), "double-lex"),
                       f"efpa-{q}-{lam}-{d}-{v}", {"grid": grid, "render": render})
