import numpy as np
import pytest

from vein.body import BodySpec


def random_sym_polytope(rng, d, k=None):
    k = k if k is not None else int(rng.integers(d, d + 5))
    while True:
        G = rng.standard_normal((k, d))
        if np.linalg.matrix_rank(G) == d:
            return BodySpec.sym_polytope(G)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""
    def _report(number, passed, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
