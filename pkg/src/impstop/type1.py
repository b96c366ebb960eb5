"""Type-I equilibrium: P1 restarts the state at an interior target, never forcing a stop.

The seven smooth-pasting equations reduce to two scalar unknowns,
``z = exp(theta*(x1_star - x1_bar))`` and ``w = exp(theta*(x2_bar - x1_bar))``.
``z`` solves a monotone transcendental equation; ``w`` is then a root of a
quartic polynomial whose coefficients depend on ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import GameParams, OdeCoefficients, d2phi1, dphi1, dphi2, phi1, phi2, theta
from .rootfind import DEFAULT_NGRID, SOLVER_TOL, Bracket, find_root, log_scan_roots

Z_MIN = 1.0 + 1e-9
W_MAX = 1e6
CLOSED_TOL = 1e-9


class RootNotBracketed(RuntimeError):
    pass


@dataclass(frozen=True)
class Type1Conditions:
    ne11_lhs: float
    ne11_mid: float
    ne11_rhs: float
    ne12_value: float
    z_tilde: float
    w_tilde: float
    phi1_dd_x1_star: float

    @property
    def ne11_ok(self) -> bool:
        return self.ne11_mid > self.ne11_lhs - CLOSED_TOL and self.ne11_mid < self.ne11_rhs

    @property
    def ne12_ok(self) -> bool:
        return self.ne12_value > 0

    @property
    def order_ok(self) -> bool:
        return 1.0 < self.z_tilde < self.w_tilde

    @property
    def second_order_ok(self) -> bool:
        return self.phi1_dd_x1_star < CLOSED_TOL

    @property
    def ok(self) -> bool:
        return self.ne11_ok and self.ne12_ok and self.order_ok and self.second_order_ok

    def failed(self) -> list[str]:
        names = ("ne11_ok", "ne12_ok", "order_ok", "second_order_ok")
        return [n for n in names if not getattr(self, n)]


@dataclass(frozen=True)
class Type1Equilibrium:
    z_tilde: float
    w_tilde: float
    x1_bar: float
    x1_star: float
    x2_bar: float
    coeffs: OdeCoefficients
    conditions: Type1Conditions

    @property
    def thresholds(self):
        return (self.x1_bar, self.x1_star, self.x2_bar)

    @property
    def valid(self) -> bool:
        return self.conditions.ok


@dataclass
class Type1Report:
    z_tilde: float | None
    candidates: list[Type1Equilibrium] = field(default_factory=list)
    reason: str = ""

    @property
    def equilibrium(self) -> Type1Equilibrium | None:
        for cand in self.candidates:
            if cand.valid:
                return cand
        return None


def F_of_z(z, p: GameParams):
    return np.log(z) - 2.0 * (z - 1.0) / (z + 1.0) - p.c * p.r * theta(p) / (1.0 - p.lam * p.r)


def solve_F(p: GameParams, z_max: float = W_MAX, tol: float = SOLVER_TOL) -> float:
    """The unique z > 1 with F(z) = 0 (F is increasing on (1, inf))."""
    f_hi = float(F_of_z(z_max, p))
    if f_hi < 0:
        raise RootNotBracketed(f"F({z_max:g}) = {f_hi:g} < 0; raise z_max")
    f = lambda u: float(F_of_z(math.exp(u), p))
    # searched in ln z for uniform relative precision
    lo, hi = math.log(Z_MIN), math.log(z_max)
    return math.exp(find_root(f, Bracket(lo, hi, f(lo), f(hi)), tol))


def quartic_coefficients(z: float, p: GameParams):
    """Coefficients (w^4, w^3, w^2, w^1, w^0) of the quartic in w."""
    r, th = p.r, theta(p)
    ab = 1.0 - p.a * p.r
    bb = 1.0 - p.b * p.r
    K = bb * (1.0 - p.lam * r) / (th * ab * (z + 1.0))
    L = ((1.0 - p.gam * r) / th * math.log(z) - r * p.d) / (z - 1.0)
    return (
        K,
        bb * (p.s / ab - 1.0 / th) - p.q,
        2.0 * z * (L - K),
        z * (p.q - bb * (p.s / ab + 1.0 / th)),
        K * z * z,
    )


def quartic_in_w(w, z: float, p: GameParams):
    k4, k3, k2, k1, k0 = quartic_coefficients(z, p)
    return (((k4 * w + k3) * w + k2) * w + k1) * w + k0


def w_equation_direct(w, z: float, p: GameParams):
    """The P2 value-matching equation at x1_bar, with x2_bar eliminated.

    Equals ``quartic_in_w(w) * (z - 1) / (2 r z w^2)``.
    """
    r, th = p.r, theta(p)
    bb = 1.0 - p.b * p.r
    x2 = x2_bar_type1(z, w, p)
    return ((1.0 - z) / (2.0 * r * w) * (bb * (x2 + 1.0 / th) - p.q)
            + w * (z - 1.0) / (2.0 * r * z) * (bb * (x2 - 1.0 / th) - p.q)
            + (1.0 - p.gam * r) / (th * r) * np.log(z) - p.d)


def quartic_from_direct(w, z: float, p: GameParams):
    return w_equation_direct(w, z, p) * 2.0 * p.r * z * w * w / (z - 1.0)


def x2_bar_type1(z, w, p: GameParams):
    th = theta(p)
    return ((1.0 - p.lam * p.r) / (th * w) * (w * w - z) / (z + 1.0) + p.s) / (1.0 - p.a * p.r)


def thresholds_type1(z: float, w: float, p: GameParams):
    """(x1_bar, x1_star, x2_bar) from the reduced variables."""
    th = theta(p)
    x2 = float(x2_bar_type1(z, w, p))
    return x2 - math.log(w) / th, x2 + (math.log(z) - math.log(w)) / th, x2


def coefficients_type1(x1_bar: float, x1_star: float, x2_bar: float, p: GameParams) -> OdeCoefficients:
    r, th = p.r, theta(p)
    k = (1.0 - p.lam * r) / (r * th)
    # divide through by exp(theta*x1_star) to keep the exponents bounded
    e = math.exp(th * (x1_bar - x1_star))
    C11 = -k * math.exp(-th * x1_star) / (1.0 + e)
    C12 = k * math.exp(th * x1_bar) / (1.0 + e)
    bb = 1.0 - p.b * r
    C21 = math.exp(-th * x2_bar) / (2 * r) * (bb * (x2_bar + 1.0 / th) - p.q)
    C22 = math.exp(th * x2_bar) / (2 * r) * (bb * (x2_bar - 1.0 / th) - p.q)
    return OdeCoefficients(C11, C12, C21, C22)


def check_conditions_type1(z: float, w: float, p: GameParams) -> Type1Conditions:
    r, th = p.r, theta(p)
    ab, bb, lb = 1.0 - p.a * r, 1.0 - p.b * r, 1.0 - p.lam * r
    mid = bb * lb * (w * w - z) / (th * w * ab * (z + 1.0)) + bb / ab * p.s - p.q
    ne12 = ((bb / ab * (lb * (w * w - z) / (th * w * (z + 1.0)) + p.s) - p.q) * (w - 1.0) ** 2
            + bb / th * (1.0 + 2.0 * w * math.log(w) - w * w))
    dd = math.nan
    if z > 1.0 and w > 1.0:
        x1b, x1s, x2b = thresholds_type1(z, w, p)
        dd = float(d2phi1(x1s, coefficients_type1(x1b, x1s, x2b, p), p))
    return Type1Conditions(0.0, mid, bb / th, ne12, z, w, dd)


def pasting_residuals_type1(x1_bar, x1_star, x2_bar, co: OdeCoefficients, p: GameParams):
    """Residuals (lhs - rhs) of the seven smooth-pasting equations, in a fixed order."""
    return [
        ("p1_optimal_target", float(dphi1(x1_star, co, p) - p.lam)),
        ("p1_c1_x1bar", float(dphi1(x1_bar, co, p) - p.lam)),
        ("p2_c1_x2bar", float(dphi2(x2_bar, co, p) + p.b)),
        ("p1_c0_x1bar", float(phi1(x1_bar, co, p) - (phi1(x1_star, co, p) - p.c - p.lam * (x1_star - x1_bar)))),
        ("p1_c0_x2bar", float(phi1(x2_bar, co, p) - p.a * x2_bar)),
        ("p2_c0_x1bar", float(phi2(x1_bar, co, p) - (phi2(x1_star, co, p) + p.d + p.gam * (x1_star - x1_bar)))),
        ("p2_c0_x2bar", float(phi2(x2_bar, co, p) + p.b * x2_bar)),
    ]


def build_type1(z: float, w: float, p: GameParams) -> Type1Equilibrium:
    x1b, x1s, x2b = thresholds_type1(z, w, p)
    co = coefficients_type1(x1b, x1s, x2b, p)
    return Type1Equilibrium(z, w, x1b, x1s, x2b, co, check_conditions_type1(z, w, p))


def diagnose_type1(p: GameParams, w_max: float = W_MAX, n_grid: int = DEFAULT_NGRID,
                   tol: float = SOLVER_TOL) -> Type1Report:
    """Solve for z, list every quartic root w > z and evaluate its conditions."""
    try:
        z = solve_F(p, w_max, tol)
    except RootNotBracketed as exc:
        return Type1Report(None, [], f"no root of F: {exc}")
    ws = log_scan_roots(lambda w: quartic_in_w(w, z, p), z * (1 + 1e-9), w_max, n_grid, tol)
    ws = [w for w in ws if w > z]
    if not ws:
        return Type1Report(z, [], f"no quartic root w > z_tilde={z:.6g} below {w_max:g}")
    rep = Type1Report(z, [build_type1(z, w, p) for w in ws])
    if rep.equilibrium is None:
        rep.reason = "; ".join(
            f"w={c.w_tilde:.6g}: failed {','.join(c.conditions.failed())}" for c in rep.candidates
        )
    return rep


def solve_type1(p: GameParams, **kw) -> Type1Equilibrium | None:
    """Smallest quartic root passing every condition, or None."""
    return diagnose_type1(p, **kw).equilibrium
