import pytest

from floorcount import Engine, FloorDiagram


@pytest.fixture(scope="session")
def engine():
    """One shared engine so expensive values are computed once per run."""
    return Engine()


@pytest.fixture
def single_floor():
    # degree 1: one floor, one sink
    return FloorDiagram((1,), (), (1,))


@pytest.fixture
def chain_11():
    # degree 3 chain with internal weights (1, 1); sinks at the last two floors
    return FloorDiagram((1, 1, 1), ((0, 1, 1), (1, 2, 1)), (0, 1, 2))


@pytest.fixture
def chain_12():
    # degree 3 chain with internal weights (1, 2); all sinks at the bottom
    return FloorDiagram((1, 1, 1), ((0, 1, 1), (1, 2, 2)), (0, 0, 3))


@pytest.fixture
def vee():
    # two source floors flowing into one floor with three sinks
    return FloorDiagram((1, 1, 1), ((0, 2, 1), (1, 2, 1)), (0, 0, 3))


@pytest.fixture
def double_edge():
    # degree 3, genus 1: chain whose lower edge is doubled
    return FloorDiagram((1, 1, 1), ((0, 1, 1), (1, 2, 1), (1, 2, 1)), (0, 0, 3))
