import math
import random

import pytest

from photonpaths.corpus import random_pair_circuit, random_single_photon_circuit

TWO_PI = 2 * math.pi

# filled by test_acceptance; echoed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def single_corpus():
    rng = random.Random(20240601)
    return [random_single_photon_circuit(rng) for _ in range(100)]


@pytest.fixture(scope="session")
def pair_corpus():
    rng = random.Random(20240602)
    return [random_pair_circuit(rng) for _ in range(100)]
