import hypothesis
import pytest

from flagram.algebra import FlagContext
from flagram.model import parse_problem

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.load_profile("ci")

R33_TEXT = """
colors 2
colorblind 1,2
forbid 1: 1-2,2-3,1-3
forbid 2: 1-2,2-3,1-3
flag_order 4
ell 2
"""

R34_TEXT = """
colors 2
forbid 1: 1-2,2-3,1-3
forbid 2: 1-2,1-3,1-4,2-3,2-4,3-4
flag_order 5
ell 2
"""


@pytest.fixture(scope="session")
def r33():
    return parse_problem(R33_TEXT, name="r33")


@pytest.fixture(scope="session")
def r34():
    return parse_problem(R34_TEXT, name="r34")


@pytest.fixture(scope="session")
def ctx33(r33):
    return FlagContext(r33)


@pytest.fixture(scope="session")
def ctx34(r34):
    return FlagContext(r34)
