from pathlib import Path

import pytest

from clientlab.game import GameParams
from clientlab.graph import parse_village_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def v1_path():
    return FIXTURES / "v1.csv"


@pytest.fixture
def v1(v1_path):
    return parse_village_file(v1_path)


@pytest.fixture
def pstar():
    return GameParams(n=10, b=3, theta=0.7, c=1.1, R=100, e=0.1)
