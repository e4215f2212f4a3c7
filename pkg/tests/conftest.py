import numpy as np
import pytest

from bbg import build_graph


@pytest.fixture
def eight_cycle():
    """The 8-cycle as a (4,4,2,2) graph: u joins u and u+1 mod 4."""
    return build_graph((4, 4, 2, 2), [(u, (u + k) % 4) for u in range(4) for k in (0, 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    import sys
    results = {}
    for name, mod in list(sys.modules.items()):
        if name.split(".")[-1] == "test_acceptance":
            results.update(getattr(mod, "RESULTS", {}))
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
