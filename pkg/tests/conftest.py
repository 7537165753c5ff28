import pytest

from headtail.histogram import dh_to_ccdh, exact_dh
from headtail.stream import SyntheticSpec, generate, havel_hakimi

# 200 vertices in four degree classes
FIXED_DEGREES = [1] * 148 + [5] * 40 + [20] * 10 + [100] * 2

_ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    _ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(_ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def fixed_graph():
    return havel_hakimi(FIXED_DEGREES)


@pytest.fixture(scope="session")
def desk_graph():
    return generate(SyntheticSpec("chung_lu", n=100_000, exponent=2.5, avg_degree=20, seed=1))


@pytest.fixture(scope="session")
def desk_truth(desk_graph):
    return dh_to_ccdh(exact_dh(desk_graph))
