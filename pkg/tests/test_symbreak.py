from __future__ import annotations

import itertools
import random

import pytest

from symbreak.constraints import GreaterThanMax, Implies, Less, LessThanMin, LinearEq, View
from symbreak.perm import DimensionMismatch, Permutation, Symmetry, apply_assignment
from symbreak.transform import (Classification, SymBreakSet, apply_symmetry, classify, show,
                                simplify)
from support import N_VALS, catalog, random_view, square


def _x(mp4, i, j):
    return View(mp4.meta["square"].X(i, j))


def _first_two(mp4):
    return SymBreakSet(mp4.sbc.constraints[:2], "corner")


def test_reflection_moves_smallest_corner_to_top_right(mp4):
    g = mp4.meta["symmetries"]["σ_v"]
    image = apply_symmetry(g, _first_two(mp4))
    x = lambda i, j: _x(mp4, i, j)
    assert image.constraints == (LessThanMin(x(4, 1), (x(4, 4), x(1, 1), x(1, 4))),
                                 Less(x(4, 4), x(1, 1)))
    assert show(image, mp4.csp).splitlines()[0] == "X[4,1] < min(X[4,4], X[1,1], X[1,4])"
    assert image.label == "σ_v(corner)"


def test_identity_leaves_constraints_alone(mp4):
    g = Symmetry.identity(16, 16)
    assert apply_symmetry(g, mp4.sbc).constraints == mp4.sbc.constraints


def test_reflect_and_invert_simplifies_to_max_form(mp4):
    g = mp4.meta["symmetries"]["θ_inv∘σ_v"]
    image = simplify(apply_symmetry(g, _first_two(mp4)))
    x = lambda i, j: _x(mp4, i, j)
    assert image.constraints == (GreaterThanMax(x(4, 1), (x(4, 4), x(1, 1), x(1, 4))),
                                 Less(x(1, 1), x(4, 4)))
    assert show(image, mp4.csp).splitlines() == ["X[4,1] > max(X[4,4], X[1,1], X[1,4])",
                                                 "X[1,1] < X[4,4]"]


def test_simplify_cancels_double_inversion():
    c = Less(View(0, -1, 16), View(1, -1, 16))
    assert simplify(SymBreakSet((c,))).constraints == (Less(View(1), View(0)),)
    plain = SymBreakSet((Less(View(0), View(1)), LinearEq((View(0), View(1)), (1, 2), 5)))
    assert simplify(plain).constraints == plain.constraints


@pytest.mark.parametrize("seed", range(20))
def test_simplify_preserves_meaning(seed):
    rng = random.Random(seed)
    cons = []
    for _ in range(3):
        kind = rng.randrange(4)
        vs = [random_view(i, rng) if rng.random() < 0.3 else View(i, -1, N_VALS - 1)
              for i in range(3)]
        if kind == 0:
            cons.append(Less(vs[0], vs[1]))
        elif kind == 1:
            cons.append(LessThanMin(vs[0], tuple(vs[1:]), rng.random() < 0.5))
        elif kind == 2:
            cons.append(GreaterThanMax(vs[2], tuple(vs[:2]), rng.random() < 0.5))
        else:
            cons.append(LinearEq(tuple(vs), (1, -1, 2), rng.randrange(-3, 8)))
    s = SymBreakSet(tuple(cons))
    t = simplify(s)
    for a in itertools.product(range(N_VALS), repeat=3):
        assert s.eval(a) == t.eval(a)


def _random_symmetry(k, rng):
    var, val = list(range(k)), list(range(N_VALS))
    rng.shuffle(var)
    rng.shuffle(val)
    return Symmetry(Permutation(tuple(var)), Permutation(tuple(val)))


@pytest.mark.parametrize("k", (1, 2, 3, 4))
def test_solutions_of_image_are_images_of_solutions(k):
    rng = random.Random(k)
    space = list(itertools.product(range(N_VALS), repeat=k))
    for _ in range(4):
        s = SymBreakSet(tuple(rng.sample(catalog(k, rng), 2)))
        g = _random_symmetry(k, rng)
        image = apply_symmetry(g, s)
        lhs = {a for a in space if image.eval(a)}
        rhs = {apply_assignment(g, a) for a in space if s.eval(a)}
        assert lhs == rhs


def test_solution_image_on_most_perfect(mp4, mp4_solutions):
    kept = {a for a in mp4_solutions if mp4.sbc.eval(a)}
    for g in mp4.meta["symmetries"].values():
        image = apply_symmetry(g, mp4.sbc)
        assert {a for a in mp4_solutions if image.eval(a)} == {apply_assignment(g, a) for a in kept}


def test_dimension_mismatch(mp4):
    with pytest.raises(DimensionMismatch):
        apply_symmetry(Symmetry.identity(9, 9), mp4.sbc)


def test_classify_examples(mp4, mp4_solutions):
    sym = mp4.meta["symmetries"]
    x = lambda i, j: _x(mp4, i, j)
    s9 = SymBreakSet((Less(x(1, 4), x(4, 1)),))
    assert classify(mp4.csp, s9, sym["σ_d"], solutions=mp4_solutions) is Classification.ELIMINATES
    assert classify(mp4.csp, s9, sym["σ_90"], solutions=mp4_solutions) is Classification.BREAKS
    cond = SymBreakSet((Implies(LinearEq((x(1, 1), x(4, 4)), (1, 1), 15), Less(x(1, 1), x(4, 4))),))
    for name, g in sym.items():
        if g.val_perm.is_identity():
            assert classify(mp4.csp, cond, g, solutions=mp4_solutions) \
                is Classification.DOES_NOT_BREAK, name


def test_classify_empty_survivors(mp4, mp4_solutions):
    x = lambda i, j: _x(mp4, i, j)
    impossible = SymBreakSet((Less(x(1, 1), x(1, 1)),))
    g = mp4.meta["symmetries"]["σ_90"]
    assert classify(mp4.csp, impossible, g, solutions=mp4_solutions) \
        is Classification.DOES_NOT_BREAK


def test_classify_enumerates_when_not_given(magic3):
    g = magic3.meta["symmetries"]["σ_90"]
    assert classify(magic3.csp, magic3.sbc, g) is Classification.ELIMINATES


def test_running_example_squares(mp4):
    sym = mp4.meta["symmetries"]
    admitted = lambda g: {k for k in (1, 2, 3, 4) if apply_symmetry(g, mp4.sbc).eval(square(k))}
    assert admitted(sym["id"]) == {3}
    assert admitted(sym["σ_v"]) == {4}
    assert admitted(sym["θ_inv∘σ_v"]) == {2}
    assert admitted(sym["θ_inv"]) == {1}
