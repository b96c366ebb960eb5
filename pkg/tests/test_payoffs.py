import numpy as np
import pytest

from impstop.payoffs import TYPE_I, TYPE_II, PiecewisePayoff
from impstop.scenarios import SCENARIOS

from conftest import ALL, payoff, solved


def _grid(pp, n=10_000, k=5):
    w = pp.x2_bar - pp.x1_bar
    return np.linspace(pp.x1_bar - k * w, pp.x2_bar + k * w, n)


def test_W1_at_x2bar_type1B():
    pp = payoff("type1-B")
    p = pp.params
    assert pp.W1(pp.x2_bar) == p.a * pp.x2_bar
    assert pp.W1(pp.x2_bar) == pytest.approx(2 * 18.18, abs=2 * 0.02)


@pytest.mark.parametrize("name", ALL)
def test_M_continuous_at_x1bar(name):
    pp = payoff(name)
    assert pp.M_op(pp.x1_bar) == pytest.approx(float(pp.phi1(pp.x1_bar)), abs=1e-6)


def test_W1_linear_below_x1bar():
    pp = payoff("type1-A")
    assert pp.W1(pp.x1_bar - 10) == pytest.approx(pp.W1(pp.x1_bar) - pp.params.lam * 10, abs=1e-9)


@pytest.mark.parametrize("name", ALL)
def test_W2_stopping_piece(name):
    pp = payoff(name)
    b = pp.params.b
    assert pp.W2(pp.x2_bar) == -b * pp.x2_bar
    for x in (pp.x2_bar + 1, 1e6, 1e9):
        assert pp.W2(x) == -b * x


def test_W2_at_x1bar_type2A():
    pp = payoff("type2-A")
    # -9*32.68 + 100 + 10*(32.68 - 22.56) from the reference thresholds, rounding worth about 0.15
    assert pp.W2(pp.x1_bar) == pytest.approx(-93.0, abs=0.2)


def test_delta_examples():
    pp = payoff("type1-A")
    assert pp.delta(-40.0) == pytest.approx(16.95 + 40.0, abs=0.02)
    assert pp.delta(pp.x1_star) == 0.0
    assert pp.delta(pp.x1_star + 1.0) == 0.0
    assert np.all(pp.delta(np.linspace(-100, 100, 101)) >= 0)


@pytest.mark.parametrize("name", ALL)
def test_intervention_regions(name):
    pp = payoff(name)
    xs = _grid(pp)
    gap = pp.M_op(xs) - pp.W1(xs)
    scale = max(1.0, float(np.max(np.abs(pp.W1(xs)))))
    below = xs <= pp.x1_bar
    assert np.max(np.abs(gap[below])) <= 1e-8 * scale
    assert np.max(gap[~below]) <= 1e-8 * scale
    # strictly negative once clear of the boundary by a cell
    h = xs[1] - xs[0]
    assert np.all(gap[xs > pp.x1_bar + h] < 0)
    assert np.allclose(pp.H_op(xs[below]), pp.W2(xs[below]), rtol=0, atol=1e-8 * scale)


@pytest.mark.parametrize("name", ALL)
def test_stopping_regions(name):
    pp = payoff(name)
    xs = _grid(pp)
    v = pp.W2(xs) + pp.params.b * xs
    scale = max(1.0, float(np.max(np.abs(pp.W2(xs)))))
    assert np.all(v[xs >= pp.x2_bar] == 0)
    assert np.min(v[xs < pp.x2_bar]) >= -1e-8 * scale
    h = xs[1] - xs[0]
    assert np.all(v[xs < pp.x2_bar - h] > 0)


@pytest.mark.parametrize("name", ALL)
def test_gamma_argmax_at_landing_point(name):
    pp = payoff(name)
    xs = _grid(pp)
    i = int(np.argmax(pp.gamma_fn(xs)))
    assert abs(xs[i] - pp.target) <= xs[1] - xs[0]


@pytest.mark.parametrize("name", ALL)
def test_linear_growth(name):
    pp = payoff(name)
    p = pp.params
    far = 1e6 * (1 + abs(pp.x2_bar))
    left1 = pp.W1(pp.x1_bar) - p.lam * (pp.x1_bar + far)
    left2 = pp.W2(pp.x1_bar) + p.gam * (pp.x1_bar + far)
    assert pp.W1(-far) == pytest.approx(left1, rel=1e-12)
    assert pp.W2(-far) == pytest.approx(left2, rel=1e-12)
    assert pp.W1(far) == p.a * far and pp.W2(far) == -p.b * far
    K = max(p.lam, p.gam, p.a, p.b) + abs(pp.W1(0.0)) + abs(pp.W2(0.0)) + 1e3
    for x in (-far, far):
        assert abs(pp.W1(x)) <= K * (1 + abs(x)) and abs(pp.W2(x)) <= K * (1 + abs(x))


@pytest.mark.parametrize("name", ALL)
def test_smooth_fit(name):
    pp = payoff(name)
    assert max(abs(v) for v in pp.jumps().values()) <= 1e-6
    eps = 1e-9 * max(1.0, abs(pp.x1_bar))
    # W1 is C1 across x1_bar, W2 is C1 across x2_bar
    assert abs(pp.W1(pp.x1_bar - eps, 1) - pp.W1(pp.x1_bar + eps, 1)) <= 1e-5
    assert abs(pp.W2(pp.x2_bar - eps, 1) - pp.W2(pp.x2_bar + eps, 1)) <= 1e-5


def test_vector_and_scalar_agree():
    pp = payoff("type1-B")
    xs = np.array([-5.0, 4.0, 10.0, 18.0, 30.0])
    assert np.allclose(pp.W1(xs), [pp.W1(x) for x in xs])
    assert isinstance(pp.W2(3.0), float)


def test_construction_checks():
    pp = payoff("type2-A")
    with pytest.raises(ValueError):
        pp.replace(x1_star=pp.x2_bar - 1)
    with pytest.raises(ValueError):
        payoff("type1-A").replace(x1_bar=100.0)
    with pytest.raises(ValueError):
        pp.replace(kind="III")


def test_from_equilibrium_kind():
    assert payoff("type1-A").kind == TYPE_I
    assert payoff("type2-B").kind == TYPE_II
    assert payoff("type2-B").target == solved("type2-B").x2_bar
