import numpy as np
import pytest

from streamcl.stats import StatisticsStore


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\n[ACCEPTANCE] {name}: {report.outcome.upper()}")


def store_with(stats: dict[int, tuple[list, list]]) -> StatisticsStore:
    """Store with prescribed per-class (prototype, std); counts set to 2."""
    dim = len(next(iter(stats.values()))[0])
    labels = sorted(stats)
    protos = np.array([stats[y][0] for y in labels], dtype=np.float64)
    stds = np.array([stats[y][1] for y in labels], dtype=np.float64)
    sq = protos**2 + stds**2
    counts = np.full(len(labels), 2, dtype=np.uint64)
    return StatisticsStore.from_arrays(dim, labels, counts, protos, sq)


@pytest.fixture
def make_store():
    return store_with
