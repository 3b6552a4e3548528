import math

import pytest
from hypothesis import settings

from domint import FadingModel, NetworkModel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def net():
    return NetworkModel(1e-4, 3.0, math.pi / 4)


@pytest.fixture
def fading():
    return FadingModel(2.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
