from __future__ import annotations

import numpy as np
import pytest

# The (7,4) Hamming matrices as printed for the worked example.
HAMMING7_H = np.array(
    [
        [1, 0, 1, 1, 1, 0, 0],
        [1, 1, 1, 0, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ],
    dtype=np.uint8,
)

HAMMING7_HE_PRINTED = np.array(
    [
        [1, 0, 1, 1, 1, 0, 0],
        [1, 1, 1, 0, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
        [0, 1, 0, 1, 1, 1, 0],
        [1, 1, 0, 0, 1, 0, 1],
        [1, 0, 0, 1, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 1],
    ],
    dtype=np.uint8,
)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":").split(".")[0])):
            terminalreporter.write_line(line)
