import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from varlearn import PointCloud, sample_so3, sample_trott

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def so3_900():
    return sample_so3(900, seed=2024)


@pytest.fixture(scope="session")
def trott_300():
    return sample_trott(300, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def circle_points(m, rational=True):
    """Exact unit-circle points from the rational parametrisation."""
    t = np.linspace(-3.0, 3.0, m)
    if rational:
        return PointCloud(np.column_stack([(1 - t**2) / (1 + t**2), 2 * t / (1 + t**2)]))
    theta = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return PointCloud(np.column_stack([np.cos(theta), np.sin(theta)]))


# Acceptance criteria report their verdicts here; the summary hook prints them
# after the run so they appear even when output capture is on.
ACCEPTANCE_LINES: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
