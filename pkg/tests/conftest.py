import numpy as np
import pytest

from pqbench.synth import CircuitConfig, EventClass, generate


@pytest.fixture(scope="session")
def config():
    return CircuitConfig()


@pytest.fixture(scope="session")
def records_by_class(config):
    """Four records per class from a fixed seed, generated once per session."""
    return {cls: [generate(config, cls, 7, i, int(cls) * 4 + i) for i in range(4)]
            for cls in EventClass}


@pytest.fixture(scope="session")
def blobs():
    """Small well-separated 3-class problem in 5 dimensions."""
    rng = np.random.default_rng(3)
    centers = np.array([[0, 0, 0, 0, 0], [4, 0, 1, 0, 0], [0, 4, 0, 1, 0]], dtype=float)
    y = np.repeat(np.arange(3), 30)
    X = centers[y] + rng.normal(scale=0.7, size=(len(y), 5))
    return X, y


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Record ``(criterion, passed, detail)`` lines for the terminal summary."""
    log = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(criterion: int, passed: bool, detail: str) -> None:
        log[criterion] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(log):
        passed, detail = log[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
