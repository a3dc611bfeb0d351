import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "eismu",
    deadline=None,
    derandomize=True,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("eismu")

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=0, help="seed for randomized property tests")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


@pytest.fixture
def acceptance():
    """Record and assert one acceptance criterion: pass/fail line plus timing."""
    def record(number, title, ok, detail, elapsed, limit=None):
        in_time = limit is None or elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = f" (limit {limit:g} s)" if limit is not None else ""
        line = f"[{number:>2}] {status}  {title}: {detail}; {elapsed:.2f} s{budget}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
        assert in_time, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
