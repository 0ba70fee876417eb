import json
from pathlib import Path

import pytest

from ergo_assist import load_scene

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str):
    return json.loads((FIXTURES / f"{name}.json").read_text())


@pytest.fixture(scope="session")
def paper_scene():
    return load_scene(load_fixture("paper_scenario"))


@pytest.fixture(scope="session")
def unimpaired_scene():
    return load_scene(load_fixture("unimpaired"))


@pytest.fixture()
def paper_doc():
    return load_fixture("paper_scenario")


@pytest.fixture()
def unimpaired_doc():
    return load_fixture("unimpaired")
