from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbreak.models import Square, value_inversion
from symbreak.perm import (BlockSymmetric, DimensionMismatch, Explicit, GroupTooLarge,
                           Permutation, Symmetry, SymmetryGroup, ValueSymmetric, apply_assignment,
                           compose, enumerate_group, inverse, orbit, random_element,
                           structure_size)
from support import square

N = 4
CELLS = 16


@pytest.fixture(scope="module")
def geo():
    return Square(N).geometric(CELLS)


@pytest.fixture(scope="module")
def inv():
    return value_inversion(CELLS, CELLS)


@pytest.fixture(scope="module")
def group16(geo, inv):
    return SymmetryGroup(CELLS, CELLS, (geo["σ_90"], geo["σ_v"], inv))


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_permutation_inverse_is_two_sided():
    p = Permutation((2, 0, 3, 1))
    assert p.compose(p.inverse()).is_identity()
    assert p.inverse().compose(p).is_identity()


def test_compose_reflect_then_invert_gives_fourth_square(geo, inv):
    assert apply_assignment(compose(inv, geo["σ_v"]), square(1)) == square(4)


def test_compose_with_identity(geo):
    ident = Symmetry.identity(CELLS, CELLS)
    g = geo["σ_90"]
    assert compose(g, ident) == g
    assert compose(ident, g) == g


def test_two_quarter_turns_make_a_half_turn(geo):
    g = compose(geo["σ_90"], geo["σ_90"])
    assert g.var_perm.image == geo["σ_180"].var_perm.image
    cells = tuple(range(CELLS))
    assert apply_assignment(g, cells) == apply_assignment(geo["σ_180"], cells)


def test_compose_dimension_mismatch(geo):
    with pytest.raises(DimensionMismatch):
        compose(geo["σ_90"], Symmetry.identity(9, 9))


def test_inverse_examples(geo, inv):
    ident = Symmetry.identity(CELLS, CELLS)
    assert inverse(ident) == ident
    assert inverse(inv) == inv
    assert inverse(geo["σ_90"]) == geo["σ_270"]
    assert compose(geo["σ_90"], inverse(geo["σ_90"])).is_identity()


def test_apply_assignment_examples(geo, inv):
    assert apply_assignment(geo["σ_v"], square(1)) == square(2)
    assert apply_assignment(inv, square(1)) == square(3)
    a = square(1)
    assert apply_assignment(Symmetry.identity(CELLS, CELLS), a) == a


def test_apply_assignment_rejects_partial(geo):
    with pytest.raises(ValueError):
        apply_assignment(geo["σ_v"], (None,) + square(1)[1:])
    with pytest.raises(DimensionMismatch):
        apply_assignment(geo["σ_v"], (0, 1))


def test_enumerate_examples(geo, group16):
    assert len(enumerate_group(SymmetryGroup(CELLS, CELLS, (geo["σ_90"], geo["σ_v"])))) == 8
    assert len(enumerate_group(group16)) == 16
    only = enumerate_group(SymmetryGroup(CELLS, CELLS, ()))
    assert len(only) == 1 and only[0].is_identity()


def test_enumerate_bound():
    gens = (Symmetry.of_variables((1, 2, 3, 4, 5, 6, 0), 1),
            Symmetry.of_variables((1, 0, 2, 3, 4, 5, 6), 1))
    with pytest.raises(GroupTooLarge):
        enumerate_group(SymmetryGroup(7, 1, gens), bound=100)


def test_orbit_examples(group16):
    orb = orbit(square(1), group16)
    assert {square(k) for k in (1, 2, 3, 4)} <= orb
    a = square(2)
    assert orbit(a, [Symmetry.identity(CELLS, CELLS)]) == {a}


def test_orbit_sizes_divide_group_order(mp4, mp4_solutions):
    elements = enumerate_group(mp4.group)
    for a in sorted(mp4_solutions)[::7]:
        assert len(elements) % len(orbit(a, elements)) == 0


def test_random_element_explicit_is_uniform(geo):
    elements = tuple(enumerate_group(SymmetryGroup(CELLS, CELLS, (geo["σ_90"], geo["σ_v"]))))
    group = SymmetryGroup(CELLS, CELLS, (geo["σ_90"], geo["σ_v"]), (Explicit(elements),))
    rng = random.Random(11)
    draws = 10_000
    counts = Counter(random_element(group, rng).key() for _ in range(draws))
    assert set(counts) == {g.key() for g in elements}
    expected = draws / len(elements)
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 24.32  # chi-squared, 7 degrees of freedom, p = 0.001


def test_random_element_identity_only():
    group = SymmetryGroup(3, 2, (Symmetry.identity(3, 2),))
    assert random_element(group, random.Random(0)).is_identity()
    assert random_element(SymmetryGroup(3, 2), random.Random(0)).is_identity()


def test_random_element_structured_lies_in_group():
    n_vars, n_vals = 5, 4
    block = (1, 2, 3)
    gens = (Symmetry.of_values(n_vars, (1, 0, 2, 3)), Symmetry.of_values(n_vars, (1, 2, 3, 0)),
            Symmetry.of_variables(Permutation.from_cycles(n_vars, (1, 2)).image, n_vals),
            Symmetry.of_variables(Permutation.from_cycles(n_vars, (1, 2, 3)).image, n_vals))
    structure = (ValueSymmetric((0, 1, 2, 3)), BlockSymmetric(block))
    group = SymmetryGroup(n_vars, n_vals, gens, structure)
    members = {g.key() for g in enumerate_group(group)}
    assert len(members) == 144 == structure_size(group)
    rng = random.Random(3)
    seen = set()
    for _ in range(3000):
        g = random_element(group, rng)
        assert g.key() in members
        seen.add(g.key())
    assert len(seen) == 144


def test_random_element_deterministic_and_word_fallback(geo):
    group = SymmetryGroup(CELLS, CELLS, (geo["σ_90"], geo["σ_v"]))
    members = {g.key() for g in enumerate_group(group)}
    a = [random_element(group, random.Random(5)).key() for _ in range(3)]
    assert len(set(a)) == 1
    rng = random.Random(9)
    assert all(random_element(group, rng).key() in members for _ in range(50))


def test_symmetry_json_round_trip(geo):
    g = geo["σ_90"]
    back = Symmetry.from_json(g.to_json(offset=1))
    assert back == g and back.label == g.label


# -- group action laws --------------------------------------------------------

_sq = Square(N).geometric(CELLS)
_ELEMENTS = enumerate_group(SymmetryGroup(CELLS, CELLS, (_sq["σ_90"], _sq["σ_v"],
                                                         value_inversion(CELLS, CELLS))))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, CELLS - 1), min_size=CELLS, max_size=CELLS),
       st.integers(0, 15), st.integers(0, 15))
def test_action_is_a_group_action(a, i, j):
    g, h = _ELEMENTS[i], _ELEMENTS[j]
    a = tuple(a)
    assert apply_assignment(compose(g, h), a) == apply_assignment(g, apply_assignment(h, a))
    assert apply_assignment(compose(g, inverse(g)), a) == a
    assert apply_assignment(compose(inverse(g), g), a) == a


def test_inverse_on_every_element():
    for g in _ELEMENTS:
        assert compose(g, inverse(g)).is_identity()
        assert compose(inverse(g), g).is_identity()
