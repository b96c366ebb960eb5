import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impstop.model import (GameParams, InvalidParams, OdeCoefficients, d2phi1, dphi1, dphi2,
                           ode_residual1, ode_residual2, phi1, phi2, theta)
from impstop.scenarios import SCENARIOS

from conftest import solved

BASE = SCENARIOS["type1-B"].params


@pytest.mark.parametrize("r,sigma,expected", [(0.01, 5.0, 0.0282843), (0.5, 1.0, 1.0), (0.01, 1.5, 0.0942809)])
def test_theta_examples(r, sigma, expected):
    p = BASE.replace(r=r, sigma=sigma, lam=1.0, b=0.0, a=0.0)
    assert theta(p) == pytest.approx(expected, abs=5e-8)
    assert p.theta == theta(p)


def test_particular_solutions_vanish():
    zero = OdeCoefficients(0, 0, 0, 0)
    assert phi1(BASE.s, zero, BASE) == 0.0
    assert phi2(BASE.q, zero, BASE) == 0.0
    assert ode_residual1(BASE.s, zero, BASE) == 0.0


def test_phi1_at_x2bar_type1B():
    eq = solved("type1-B")
    assert phi1(eq.x2_bar, eq.coeffs, BASE) == pytest.approx(BASE.a * eq.x2_bar, abs=1e-6)
    # reference value 18.18 is known to +-0.02, so a*x2_bar to +-a*0.02
    assert BASE.a * eq.x2_bar == pytest.approx(BASE.a * 18.18, abs=BASE.a * 0.02)


def test_residual_at_scenario_A_solution():
    eq = solved("type1-A")
    p = SCENARIOS["type1-A"].params
    assert abs(ode_residual1(0.0, eq.coeffs, p)) < 1e-9 * max(1.0, abs(phi1(0.0, eq.coeffs, p)))


coef = st.floats(-1e3, 1e3, allow_nan=False)
xs = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(coef, coef, coef, coef, xs)
def test_ode_residuals_vanish(c11, c12, c21, c22, x):
    co = OdeCoefficients(c11, c12, c21, c22)
    p = BASE
    # scale of the terms that cancel
    e = math.exp(p.theta * abs(x))
    s1 = p.r * (abs(c11) + abs(c12)) * e + abs(x - p.s) + 1.0
    s2 = p.r * (abs(c21) + abs(c22)) * e + abs(p.q - x) + 1.0
    assert abs(ode_residual1(x, co, p)) <= 1e-9 * s1
    assert abs(ode_residual2(x, co, p)) <= 1e-9 * s2


@settings(max_examples=200, deadline=None)
@given(coef, coef, st.floats(-200, 200))
def test_first_derivative_matches_central_difference(c1, c2, x):
    co = OdeCoefficients(c1, c2, -c2, c1)
    h = 1e-5
    for f, df in ((phi1, dphi1), (phi2, dphi2)):
        fd = (f(x + h, co, BASE) - f(x - h, co, BASE)) / (2 * h)
        scale = max(1.0, abs(df(x, co, BASE)), abs(f(x, co, BASE)) * BASE.theta)
        assert abs(fd - df(x, co, BASE)) <= 1e-5 * scale


def test_vectorised_evaluation():
    eq = solved("type1-A")
    p = SCENARIOS["type1-A"].params
    x = np.linspace(-50, 50, 11)
    assert np.allclose(phi1(x, eq.coeffs, p), [phi1(float(v), eq.coeffs, p) for v in x])
    assert d2phi1(x, eq.coeffs, p).shape == x.shape


@pytest.mark.parametrize("change,needle", [
    (dict(a=10.0), "a < lambda"),
    (dict(a=12.0), "a < lambda"),
    (dict(b=15.0), "b < gamma"),
    (dict(lam=100.0, a=0.0), "1 - lambda*r"),
    (dict(lam=150.0, a=0.0), "1 - lambda*r"),
    (dict(b=100.0, gam=200.0), "1 - b*r"),
    (dict(r=0.0), "r must be > 0"),
    (dict(sigma=-1.0), "sigma must be > 0"),
    (dict(c=0.0), "c must be > 0"),
    (dict(d=0.0), "d must be > 0"),
    (dict(s=0.0), "s must be > 0"),
    (dict(q=-1.0), "q must be >= 0"),
    (dict(a=-0.5), "a must be >= 0"),
    (dict(c=float("nan")), "finite"),
])
def test_each_constraint_rejected(change, needle):
    with pytest.raises(InvalidParams, match=needle.replace("*", r"\*")):
        BASE.replace(**change)


def test_one_minus_ar_required():
    # a < lambda and 1 - lambda*r > 0 already force 1 - a*r > 0; any a with
    # a*r >= 1 is rejected by one of the checks
    with pytest.raises(InvalidParams):
        GameParams(r=0.01, sigma=1, c=1, d=1, lam=99, gam=1, a=100, b=0, s=1, q=0)


def test_coefficients_must_be_finite():
    with pytest.raises(ValueError):
        OdeCoefficients(1.0, math.inf, 0.0, 0.0)


def test_params_are_frozen_and_roundtrip():
    p = SCENARIOS["type2-A"].params
    assert GameParams(**p.as_dict()) == p
    with pytest.raises(Exception):
        p.r = 0.5
