"""Symmetry breaking constraints, their symmetric images, and model restarts."""
from __future__ import annotations

from .constraints import (AllDifferent, AtMostNValues, GreaterThanMax, HammingEq, Implies,
                          Inconsistent, Less, LessEq, LessThanMin, Lex, LexLe, LexLess, LinearEq,
                          LinearLe, Nogood, Occurrence, ValuePrecedence, View)
from .csp import Csp, Domain, Objective, satisfies, sol
from .models import (ModelBundle, efpa, graph_coloring, magic_square,
                     most_perfect_magic_square)
from .perm import (GroupTooLarge, Permutation, Symmetry, SymmetryGroup, apply_assignment,
                   compose, enumerate_group, inverse, orbit, random_element)
from .search import BranchSpec, Outcome, SearchStats, optimize, solve, solve_all
from .strategies import (RestartConfig, expected_restart_cost, run_model_restarts, run_sbds,
                         run_static)
from .transform import Classification, SymBreakSet, apply_symmetry, classify, simplify

__version__ = "0.1.0"

__all__ = [
    "AllDifferent", "AtMostNValues", "BranchSpec", "Classification", "Csp", "Domain",
    "GreaterThanMax", "GroupTooLarge", "HammingEq", "Implies", "Inconsistent", "Less", "LessEq",
    "LessThanMin", "Lex", "LexLe", "LexLess", "LinearEq", "LinearLe", "ModelBundle", "Nogood",
    "Objective", "Occurrence", "Outcome", "Permutation", "RestartConfig", "SearchStats",
    "SymBreakSet", "Symmetry", "SymmetryGroup", "ValuePrecedence", "View", "apply_assignment",
    "apply_symmetry", "classify", "compose", "efpa", "enumerate_group", "expected_restart_cost",
    "graph_coloring", "inverse", "magic_square", "most_perfect_magic_square", "optimize",
    "orbit", "random_element", "run_model_restarts", "run_sbds", "run_static", "satisfies",
    "simplify", "sol", "solve", "solve_all",
]
