import os

import numpy as np
import pytest

from eptas.instance import Instance

ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("EPTAS_SLOW", "0") not in ("", "0"):
        return
    skip = pytest.mark.skip(reason="long run; set EPTAS_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


def small_suite(seed: int = 20240601, count: int = 200) -> list[Instance]:
    """Brute-forceable instances: m in {2, 3}, n <= 10, p uniform on [1, 20]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(m, 11))
        p = tuple(int(v) for v in rng.integers(1, 21, size=n))
        out.append(Instance(m, p))
    return out


@pytest.fixture(scope="session")
def suite():
    return small_suite()


@pytest.fixture(scope="session")
def suite_opt(suite):
    from eptas.driver import exact_opt

    return [exact_opt(i) for i in suite]
