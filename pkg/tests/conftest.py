import pytest

from critdimer.permutations import all_loopless


@pytest.fixture(scope="session")
def loopless_by_n():
    return {n: list(all_loopless(n)) for n in range(1, 7)}
