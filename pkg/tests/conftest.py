import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def angular_momentum(j2: int):
    """Jz, J+, J- and Jy for spin j = j2/2 in the m = j..-j basis (independent of the package)."""
    j = j2 / 2
    m = j - np.arange(j2 + 1)
    jz = np.diag(m)
    jp = np.zeros((j2 + 1, j2 + 1))
    for k in range(1, j2 + 1):
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jm = jp.T
    jy = (jp - jm) / 2j
    jx = (jp + jm) / 2
    return jx, jy, jz


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
