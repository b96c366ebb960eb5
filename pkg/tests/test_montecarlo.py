import math

import numpy as np
import pytest

import impstop.montecarlo as mc
from impstop.montecarlo import (InvalidSimConfig, InvalidStrategy, SimConfig, Strategy,
                                best_response_scan, estimates_to_csv, path_generator, simulate,
                                simulate_paths)
from impstop.scenarios import SCENARIOS

from conftest import payoff

P1B = SCENARIOS["type1-B"].params
P2A = SCENARIOS["type2-A"].params
P2B = SCENARIOS["type2-B"].params
SMALL = SimConfig(n_paths=2000, seed=7)


def _strategy(name):
    return Strategy.from_payoff(payoff(name))


def test_deterministic_estimates_and_csv():
    s = _strategy("type1-B")
    e1 = simulate(10.0, s, P1B, SMALL)
    e2 = simulate(10.0, s, P1B, SMALL)
    assert e1 == e2
    pp = payoff("type1-B")
    rows = [(e1, pp.W1(10.0), pp.W2(10.0))]
    assert estimates_to_csv(rows) == estimates_to_csv([(e2, pp.W1(10.0), pp.W2(10.0))])


def test_batching_does_not_change_paths(monkeypatch):
    s = _strategy("type2-B")
    ref = simulate_paths(20.0, s, P2B, SMALL)
    monkeypatch.setattr(mc, "BATCH", 97)
    monkeypatch.setattr(mc, "CHUNK", 333)
    other = simulate_paths(20.0, s, P2B, SMALL)
    assert np.array_equal(ref.j1, other.j1) and np.array_equal(ref.j2, other.j2)


def test_streams_are_keyed_by_seed_and_index():
    a = path_generator(1, 0).standard_normal(4)
    assert np.array_equal(a, path_generator(1, 0).standard_normal(4))
    assert not np.array_equal(a, path_generator(1, 1).standard_normal(4))
    assert not np.array_equal(a, path_generator(2, 0).standard_normal(4))


@pytest.mark.parametrize("name", ["type1-A", "type1-B", "type2-A", "type2-B"])
def test_start_in_stopping_region_is_exact(name):
    pp = payoff(name)
    p = pp.params
    x0 = pp.x2_bar + 1.0
    est = simulate(x0, _strategy(name), p, SMALL)
    assert est.j1_mean == p.a * x0 and est.j2_mean == -p.b * x0
    assert est.j1_se == 0.0 and est.j2_se == 0.0


@pytest.mark.parametrize("name", ["type2-A", "type2-B"])
def test_type2_start_below_x1bar_is_exact(name):
    pp = payoff(name)
    p = pp.params
    x2 = pp.x2_bar
    for x0 in (pp.x1_bar - 5.0, pp.x1_bar):
        est = simulate(x0, _strategy(name), p, SMALL)
        assert est.j1_mean == pytest.approx(p.a * x2 - p.c - p.lam * (x2 - x0), rel=1e-15, abs=1e-12)
        assert est.j2_mean == pytest.approx(-p.b * x2 + p.d + p.gam * (x2 - x0), rel=1e-15, abs=1e-12)
        assert est.j1_se == 0.0 and est.j2_se == 0.0
        assert est.n_interventions_mean == 1.0


def test_type1B_interior_point_matches_payoff():
    pp = payoff("type1-B")
    est = simulate(10.0, _strategy("type1-B"), P1B, SimConfig(n_paths=4000, seed=3))
    for m, se, w in ((est.j1_mean, est.j1_se, pp.W1(10.0)), (est.j2_mean, est.j2_se, pp.W2(10.0))):
        assert abs(m - w) < 3 * se + 0.005 * abs(w)
    assert 0 < est.truncation_bias_bound < math.inf


def test_raw_scheme_bias_and_shift_correction():
    # discrete monitoring lets paths overshoot thresholds; the error of the raw
    # scheme grows with dt and the shifted barriers remove most of it
    pp = payoff("type2-A")
    x0 = 0.5 * (pp.x1_bar + pp.x2_bar)
    w2 = pp.W2(x0)
    errs = {}
    for shift in (False, True):
        for dt in (0.01, 0.16):
            cfg = SimConfig(dt=dt, n_paths=4000, seed=11, barrier_shift=shift)
            errs[shift, dt] = simulate(x0, _strategy("type2-A"), P2A, cfg).j2_mean - w2
    assert abs(errs[False, 0.16]) > abs(errs[False, 0.01])
    assert abs(errs[True, 0.16]) < abs(errs[False, 0.16])
    assert abs(errs[True, 0.01]) < abs(errs[False, 0.01])


def test_intervention_count_finite_at_target():
    pp = payoff("type1-B")
    est = simulate(pp.x1_star, _strategy("type1-B"), P1B, SMALL)
    assert math.isfinite(est.n_interventions_mean) and est.n_interventions_mean < 50
    assert 0 <= est.censored_frac <= 1
    assert est.stop_time_mean <= SMALL.horizon(P1B)


def test_zero_perturbation_is_exactly_zero():
    pp = payoff("type1-B")
    devs = best_response_scan(10.0, pp, P1B, SMALL, [("x2_bar", 0.0), ("target", 0.0), ("x1_bar", 0.0)])
    for d in devs:
        assert d.diff == 0.0 and d.diff_se == 0.0 and not d.improves


def test_best_response_examples():
    pp = payoff("type1-B")
    devs = best_response_scan(10.0, pp, P1B, SimConfig(n_paths=4000, seed=5), [("x2_bar", 2.0), ("target", 2.0)])
    assert [d.player for d in devs] == [2, 1]
    for d in devs:
        assert d.diff <= 3 * d.diff_se


def test_type2_deviation_past_target_allowed():
    s = _strategy("type2-B")
    moved = mc.perturbed_strategy(s, "x2_bar", -1.0)
    assert moved.target > moved.x2_bar


@pytest.mark.parametrize("strat", [(5.0, 4.0, 10.0), (5.0, 6.0, 5.0), (5.0, 5.0, 10.0)])
def test_invalid_strategy(strat):
    with pytest.raises(InvalidStrategy):
        simulate(6.0, strat, P1B, SMALL)


def test_unknown_lever():
    with pytest.raises(ValueError):
        mc.perturbed_strategy(_strategy("type1-B"), "sigma", 1.0)


@pytest.mark.parametrize("cfg", [SimConfig(dt=0.0), SimConfig(n_paths=50), SimConfig(n_paths=1001),
                                 SimConfig(T=100.0), SimConfig(seed=-1)])
def test_invalid_config(cfg):
    with pytest.raises(InvalidSimConfig):
        cfg.validate(P1B)


def test_default_horizon_accepted():
    cfg = SimConfig()
    cfg.validate(P1B)
    assert cfg.horizon(P1B) == pytest.approx(math.log(1e3) / 0.01)


def test_csv_schema():
    text = estimates_to_csv([])
    assert text == ",".join(mc.CSV_COLUMNS) + "\n"
    assert mc.CSV_COLUMNS == ("x0", "j1_mean", "j1_se", "j2_mean", "j2_se", "w1", "w2",
                              "n_paths", "dt", "T", "seed")
