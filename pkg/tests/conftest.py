import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dlakit.pauli import OperatorElement, PauliString

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def random_string(rng: random.Random, n: int) -> PauliString:
    while True:
        x, z = rng.getrandbits(n), rng.getrandbits(n)
        if x or z:
            return PauliString(n, x, z)


def random_element(rng: random.Random, n: int, max_terms: int = 4) -> OperatorElement:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[random_string(rng, n)] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return OperatorElement(n, terms)


@st.composite
def strings(draw, n):
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    if x == 0 and z == 0:
        x = 1
    return PauliString(n, x, z)


@st.composite
def elements(draw, n, max_terms=4):
    k = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(k):
        s = draw(strings(n))
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 3)))
        terms[s] = c
    return OperatorElement(n, terms)


@pytest.fixture
def rng():
    return random.Random(20240613)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
