import math

import pytest

ACCEPTANCE_LINES = []


def within_sigma(k, n, p, n_sigma=4.0):
    """Binomial check: observed fraction k/n lies within n_sigma standard errors of p."""
    if n == 0:
        return False
    sigma = math.sqrt(p * (1 - p) / n)
    return abs(k / n - p) <= n_sigma * sigma + 1e-15


def clustered_rate(groups):
    """Ratio estimate and cluster-robust standard error from ``[(errors, trials), ...]`` per group."""
    groups = [(e, n) for e, n in groups if n]
    total_e = sum(e for e, _ in groups)
    total_n = sum(n for _, n in groups)
    r = total_e / total_n
    g = len(groups)
    ss = sum((e - r * n) ** 2 for e, n in groups)
    se = math.sqrt(ss * g / (g - 1)) / total_n
    return r, se, total_n


class FixedRng:
    """Stand-in stream returning a fixed uniform value; 0.0 always selects the first allowed outcome."""

    def __init__(self, value=0.0):
        self.value = value

    def random(self):
        return self.value

    def bit(self):
        return int(self.value >= 0.5)

    def index(self, n):
        return min(int(self.value * n), n - 1)


@pytest.fixture
def acceptance_log():
    def log(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
