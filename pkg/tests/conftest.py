import functools
import sys

import pytest

from impstop.payoffs import PiecewisePayoff
from impstop.scenarios import SCENARIOS
from impstop.type1 import solve_type1
from impstop.type2 import solve_type2

ALL = tuple(SCENARIOS)


@functools.lru_cache(maxsize=None)
def solved(name):
    sc = SCENARIOS[name]
    eq = solve_type1(sc.params) if name.startswith("type1") else solve_type2(sc.params)
    assert eq is not None, f"{name} did not solve"
    return eq


@functools.lru_cache(maxsize=None)
def payoff(name):
    return PiecewisePayoff.from_equilibrium(solved(name), SCENARIOS[name].params)


@pytest.fixture(params=ALL)
def scenario_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
