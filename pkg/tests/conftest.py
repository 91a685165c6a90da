"""Shared solved grids (each solved once per session) and the acceptance summary."""

import time

import pytest

from g2toda.toda import SexticPoly, SolverConfig, solve
from g2toda.transport import MetricField

SOLVE_SECONDS = {}


def _timed_solve(name, q, radius, n):
    start = time.perf_counter()
    grid = solve(q, SolverConfig(radius=radius, n=n))
    SOLVE_SECONDS[name] = time.perf_counter() - start
    return grid


@pytest.fixture(scope="session")
def solve_seconds():
    return SOLVE_SECONDS


@pytest.fixture(scope="session")
def flat_grid():
    return _timed_solve("flat", SexticPoly((1,)), 6.0, 257)


@pytest.fixture(scope="session")
def linear_grid():
    return _timed_solve("linear", SexticPoly.monomial(1), 8.0, 513)


@pytest.fixture(scope="session")
def quadratic_grid():
    return _timed_solve("quadratic", SexticPoly.monomial(2), 8.0, 513)


@pytest.fixture(scope="session")
def linear_field(linear_grid):
    return MetricField(linear_grid.q, linear_grid)


@pytest.fixture(scope="session")
def quadratic_field(quadratic_grid):
    return MetricField(quadratic_grid.q, quadratic_grid)


@pytest.fixture
def gate(request):
    """Print one PASS/FAIL line for an acceptance criterion and fail the test if needed."""

    def report(number, title, ok, detail):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        print(line)
        lines = getattr(request.config, "_acceptance_lines", [])
        lines.append((number, line))
        request.config._acceptance_lines = lines
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
