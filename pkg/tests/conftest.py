from __future__ import annotations

import pytest

from symbreak.models import magic_square, most_perfect_magic_square
from symbreak.oracle import enumerate_solutions


@pytest.fixture(scope="session")
def mp4():
    return most_perfect_magic_square(4)


@pytest.fixture(scope="session")
def mp4_solutions(mp4):
    return enumerate_solutions(mp4.csp, order=mp4.oracle_order)


@pytest.fixture(scope="session")
def magic3():
    return magic_square(3)
