import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from horolab.graph import build_ball  # noqa: E402
from horolab.spaces import free_group, free_product  # noqa: E402


@pytest.fixture(scope="session")
def F2():
    return free_group(2)


@pytest.fixture(scope="session")
def ball_cache(F2):
    cache = {}

    def get(action, radius):
        key = (id(action), radius)
        if key not in cache:
            cache[key] = build_ball(action, radius)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def F2_ball(F2, ball_cache):
    return lambda r: ball_cache(F2, r)


@pytest.fixture(scope="session")
def coned_z3z4():
    return free_product([3, 4], names="st", coned=True)


@pytest.fixture(scope="session")
def coned_zz3():
    return free_product([0, 3], coned=True)


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "fixtures" / "frozen.json").read_text())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(mod.RESULTS, key=lambda c: c.number):
        terminalreporter.write_line(c.line())
