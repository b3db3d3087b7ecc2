import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from permix import groups


@pytest.fixture(scope="session")
def s3():
    return groups.enumerate_group(3)


@pytest.fixture(scope="session")
def s4():
    return groups.enumerate_group(4)


@pytest.fixture(scope="session")
def s5():
    return groups.enumerate_group(5)


@pytest.fixture(scope="session")
def a4():
    return groups.enumerate_group(4, "even")


@pytest.fixture(scope="session")
def a5():
    return groups.enumerate_group(5, "even")


@pytest.fixture(scope="session")
def a6():
    return groups.enumerate_group(6, "even")


@pytest.fixture(scope="session")
def klein(a4):
    members = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    return groups.GroupSubset.from_permutations(
        a4, [groups.Permutation(m) for m in members]
    )
