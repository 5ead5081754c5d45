import numpy as np
import pytest

from sdofdisc import Signal

ACCEPTANCE_LINES: list[str] = []


def record(label: str, ok: bool, detail: str = "") -> None:
    """Log one acceptance verdict; shown in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_signal(seed: int, n: int, dt: float = 0.01, first_zero: bool = False) -> Signal:
    x = np.random.default_rng(seed).standard_normal(n)
    if first_zero:
        x[0] = 0.0
    return Signal(dt, x)


def rel_max(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
