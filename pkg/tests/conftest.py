import pytest

from ordinalcps import ProbVector

from helpers import CANON


@pytest.fixture
def canon():
    """The worked 5-class example vector used throughout the tests."""
    return ProbVector(CANON)
