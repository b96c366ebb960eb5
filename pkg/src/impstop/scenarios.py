"""Built-in parameter sets with their reference thresholds."""

from __future__ import annotations

from dataclasses import dataclass

from .model import GameParams
from .payoffs import TYPE_I, TYPE_II


@dataclass(frozen=True)
class Scenario:
    name: str
    params: GameParams
    kind: str
    # (x1_bar, x1_star, x2_bar); for Type II x1_star == x2_bar
    expected: tuple[float, float, float] | None = None
    tol: float = 0.0

    def __post_init__(self):
        if self.expected is not None:
            x1b, x1s, x2b = self.expected
            if not (x1b < x1s <= x2b):
                raise ValueError(f"expected thresholds of {self.name} are not ordered: {self.expected}")


SCENARIOS = {
    s.name: s
    for s in (
        Scenario("type1-A", GameParams(0.01, 5.0, 500.0, 100.0, 20.0, 40.0, 0.0, 0.0, 1.0, 5.0),
                 TYPE_I, (-31.11, 16.95, 34.84), 0.02),
        Scenario("type1-B", GameParams(0.01, 1.5, 50.0, 150.0, 10.0, 15.0, 2.0, 8.0, 10.0, 10.0),
                 TYPE_I, (4.95, 14.26, 18.18), 0.02),
        Scenario("type2-A", GameParams(0.01, 5.0, 100.0, 100.0, 25.0, 10.0, 24.0, 9.0, 45.0, 0.0),
                 TYPE_II, (22.56, 32.68, 32.68), 0.05),
        Scenario("type2-B", GameParams(0.01, 1.5, 150.0, 125.0, 80.0, 25.0, 70.0, 15.0, 10.0, 15.0),
                 TYPE_II, (14.27, 25.72, 25.72), 0.05),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None
