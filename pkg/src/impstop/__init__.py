"""Threshold Nash equilibria of the linear impulse-controller vs stopper game."""

from .model import GameParams, InvalidParams, OdeCoefficients
from .payoffs import TYPE_I, TYPE_II, PiecewisePayoff
from .scenarios import SCENARIOS, Scenario, get_scenario
from .type1 import Type1Equilibrium, diagnose_type1, solve_type1
from .type2 import Type2Equilibrium, diagnose_type2, solve_type2
from .verifier import QviReport, verify
from .montecarlo import SimConfig, SimEstimate, Strategy, best_response_scan, simulate

__all__ = [
    "GameParams", "InvalidParams", "OdeCoefficients",
    "TYPE_I", "TYPE_II", "PiecewisePayoff",
    "SCENARIOS", "Scenario", "get_scenario",
    "Type1Equilibrium", "diagnose_type1", "solve_type1",
    "Type2Equilibrium", "diagnose_type2", "solve_type2",
    "QviReport", "verify",
    "SimConfig", "SimEstimate", "Strategy", "best_response_scan", "simulate",
]
