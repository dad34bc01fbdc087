import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from oddtangle.state import PureState, ghz, parse_ket

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**63 - 1)
odd_n = st.sampled_from([3, 5])


@st.composite
def complex_scalars(draw, lo=0.1, hi=5.0):
    r = draw(st.floats(lo, hi))
    phi = draw(st.floats(0, 2 * math.pi))
    return r * complex(math.cos(phi), math.sin(phi))


@st.composite
def qubit_permutations(draw, n):
    from oddtangle.state import QubitPermutation

    return QubitPermutation(tuple(draw(st.permutations(range(1, n + 1)))))


def bits(k: int, n: int) -> str:
    return format(k, f"0{n}b")


@pytest.fixture
def example_psi():
    return parse_ket("0.5|0> + 0.5|7> + 0.5|24> + 0.5|31>", 5)


@pytest.fixture
def example_psi_swapped():
    return parse_ket("0.5|0> + 0.5|9> + 0.5|22> + 0.5|31>", 5)


@pytest.fixture
def ghz3():
    return ghz(3)


@pytest.fixture
def bell():
    return PureState.from_terms({0: 1 / math.sqrt(2), 3: 1 / math.sqrt(2)}, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20071)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
