import numpy as np
import pytest

from jwtower.tower import InclusionSpec, build

TAU = 0.25

# filled by test_acceptance.verdict, echoed after the run so the lines survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def c2():
    """C ⊂ M_2, index 4."""
    return build(InclusionSpec("tensor", k=1, d=2), 7)


@pytest.fixture(scope="session")
def m4():
    """M_2 ⊗ 1 ⊂ M_4, index 4."""
    return build(InclusionSpec("tensor", k=2, d=2), 6)


@pytest.fixture(scope="session")
def trivial():
    """B = A = M_2, index 1."""
    return build(InclusionSpec("tensor", k=2, d=1), 5)


@pytest.fixture(params=["c2", "m4"])
def tower(request):
    return request.getfixturevalue(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
