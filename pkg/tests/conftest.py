import numpy as np
import pytest

from rarehc.models import ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def normal_means():
    return ModelSpec()


def pytest_configure(config):
    config._criterion_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion and assert on it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config._criterion_lines.append(line)
        print(line)
        assert ok, line

    return record
