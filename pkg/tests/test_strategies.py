from __future__ import annotations

import math
from fractions import Fraction

import pytest

from symbreak.models import graph_coloring, magic_square
from symbreak.oracle import enumerate_solutions, orbit_partition
from symbreak.perm import SymmetryGroup
from symbreak.search import BranchSpec, Outcome, solve_all
from symbreak.strategies import (RestartConfig, RestartRecord, expected_restart_cost,
                                 restart_seed, run_model_restarts, run_sbds, run_static,
                                 simulate_restart_cost, symmetry_counts)
from symbreak.transform import SymBreakSet, apply_symmetry
from support import square

COUNTS = (658, 17143, 315267, 18808974)
FIXED = BranchSpec("fixed")
MIN_DOM = BranchSpec("min-domain")


def test_restart_config_validation():
    with pytest.raises(ValueError):
        RestartConfig(cutoff=0)
    with pytest.raises(ValueError):
        RestartConfig(max_restarts=0)
    assert RestartConfig().cutoff == 1000


def test_restart_log_line_format():
    assert RestartRecord(3, "σ_90", 1000, Outcome.CUTOFF).line() == "3\tσ_90\t1000\tcutoff"


def test_static_breaking_set_on_reference_squares(mp4):
    r = run_static(mp4.csp, mp4.sbc, MIN_DOM)
    assert r.outcome is Outcome.SOLUTION and mp4.sbc.eval(r.solution)
    assert [k for k in (1, 2, 3, 4) if mp4.sbc.eval(square(k))] == [3]
    reflected = apply_symmetry(mp4.meta["symmetries"]["σ_v"], mp4.sbc)
    assert [k for k in (1, 2, 3, 4) if reflected.eval(square(k))] == [4]
    plain = run_static(mp4.csp, (), MIN_DOM)
    assert plain.outcome is Outcome.SOLUTION and mp4.csp.is_solution(plain.solution)


def test_trivial_group_restarts_match_static():
    b = magic_square(4)
    trivial = SymmetryGroup(b.csp.n_vars, b.csp.n_vals)
    r = run_model_restarts(b.csp, b.sbc, trivial, FIXED, RestartConfig(cutoff=10**9))
    s = run_static(b.csp, b.sbc, FIXED)
    assert r.outcome is s.outcome and r.solution == s.solution
    assert r.stats.backtracks == s.stats.backtracks and r.stats.restarts == 1


def test_exhaustion_only_from_a_completed_restart():
    b = magic_square(2)
    r = run_model_restarts(b.csp, b.sbc, b.group, FIXED, RestartConfig(cutoff=1000))
    assert r.outcome is Outcome.EXHAUSTED
    assert r.restarts[-1].outcome is Outcome.EXHAUSTED
    assert r.restarts[-1].backtracks <= 1000
    capped = run_model_restarts(b.csp, SymBreakSet(()), b.group, FIXED,
                                RestartConfig(cutoff=1, max_restarts=3))
    assert capped.outcome is Outcome.CUTOFF
    assert [x.outcome for x in capped.restarts] == [Outcome.CUTOFF] * 3


def test_restarts_are_reproducible_and_respect_final_symmetry():
    b = magic_square(5, "rotations")
    branch = BranchSpec("fixed", "random")
    cfg = RestartConfig(cutoff=200, max_restarts=200, master_seed=7)
    one = run_model_restarts(b.csp, b.sbc, b.group, branch, cfg)
    two = run_model_restarts(b.csp, b.sbc, b.group, branch, cfg)
    assert one.log_text() == two.log_text() and one.solution == two.solution
    assert one.outcome is Outcome.SOLUTION
    assert apply_symmetry(one.final_symmetry, b.sbc).eval(one.solution)
    assert b.csp.is_solution(one.solution)


def test_restart_seeds_depend_on_master_and_index():
    assert restart_seed(1, 0) != restart_seed(1, 1) != restart_seed(2, 1)
    assert restart_seed(5, 3) == restart_seed(5, 3)


def test_cache_changes_nothing_but_time():
    b = magic_square(5, "rotations")
    cache = {}
    for seed in (1, 2):
        cfg = RestartConfig(cutoff=300, max_restarts=100, master_seed=seed)
        plain = run_model_restarts(b.csp, b.sbc, b.group, FIXED, cfg)
        cached = run_model_restarts(b.csp, b.sbc, b.group, FIXED, cfg, cache=cache)
        assert plain.log_text() == cached.log_text()
        assert plain.stats.backtracks == cached.stats.backtracks


def test_model_restarts_optimise():
    b = graph_coloring(12, 4, 5)
    static = run_static(b.csp, b.sbc, MIN_DOM)
    r = run_model_restarts(b.csp, b.sbc, b.group, MIN_DOM, RestartConfig(cutoff=50, master_seed=3))
    assert static.proved_optimal and r.proved_optimal
    assert r.objective == static.objective


def test_sbds_solves(mp4):
    r = run_sbds(mp4.csp, mp4.group.generators, MIN_DOM)
    assert r.outcome is Outcome.SOLUTION and mp4.csp.is_solution(r.solution)


def test_every_strategy_reaches_every_orbit(magic3):
    sols = enumerate_solutions(magic3.csp)
    for g in magic3.meta["symmetries"].values():
        if not g.val_perm.is_identity():
            continue
        found = set(solve_all(magic3.csp, apply_symmetry(g, magic3.sbc).constraints).solutions)
        assert all(orb & found for orb in orbit_partition(sols, magic3.group))


# -- expected cost ----------------------------------------------------------------

def test_expected_cost_examples():
    assert expected_restart_cost(COUNTS, 1000) == 3658
    assert expected_restart_cost([5], 5) == 5 == expected_restart_cost([5], 99)
    assert expected_restart_cost(COUNTS, 20000) == 28900.5
    with pytest.raises(ValueError):
        expected_restart_cost(COUNTS, 100)
    with pytest.raises(ValueError):
        expected_restart_cost([], 100)


@pytest.mark.parametrize("cutoff", (700, 1000, 20000, 400000))
def test_expected_cost_is_the_fixed_point(cutoff):
    t = Fraction(expected_restart_cost(COUNTS, cutoff))
    k = len(COUNTS)
    rhs = sum(Fraction(b) for b in COUNTS if b <= cutoff) / k \
        + sum(cutoff + t for b in COUNTS if b > cutoff) / k
    assert t == rhs


def test_simulation_agrees_with_expectation():
    est = simulate_restart_cost(COUNTS, 20000, 100_000, seed=2)
    assert abs(est - 28900.5) / 28900.5 < 0.02
    with pytest.raises(ValueError):
        simulate_restart_cost(COUNTS, 10, 10)


def test_symmetry_counts_cap():
    b = magic_square(4)
    sym = b.meta["symmetries"]
    counts = symmetry_counts(b.csp, b.sbc, [sym["id"], sym["σ_90"]], FIXED, cap=1)
    full = symmetry_counts(b.csp, b.sbc, [sym["id"]], FIXED)
    assert full[0] >= 0
    assert counts[0] == (math.inf if full[0] > 1 else full[0])
    assert symmetry_counts(b.csp, SymBreakSet(()), [sym["id"]], FIXED)[0] >= 0
