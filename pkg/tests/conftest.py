import json

import pytest

from infrasim import data_path
from infrasim.world import load_map


@pytest.fixture(scope="session")
def four_approach_path():
    return data_path("maps", "four_approach.json")


@pytest.fixture(scope="session")
def four_approach_map(four_approach_path):
    return load_map(four_approach_path)


@pytest.fixture(scope="session")
def four_approach_doc(four_approach_path):
    with open(four_approach_path, "r", encoding="utf-8") as fh:
        return json.load(fh)
