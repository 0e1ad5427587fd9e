import numpy as np
import pytest

from khessian.exponents import ProblemParams
from khessian import weights


@pytest.fixture(scope="session")
def canonical():
    """n=3, k=1, q=6 with constant weight (spiral regime, lambda~ = 0.24)."""
    return ProblemParams(3, 1, 6.0), weights.constant()


@pytest.fixture(scope="session")
def example1():
    return ProblemParams(3, 1, 3.0), weights.example1(3, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed again in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def record(number, title, checks, details=""):
        ok = all(bool(v) for v in checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
        if details:
            line += f" [{details}]"
        if failed:
            line += f" (failed: {', '.join(failed)})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
