"""Type-II equilibrium: P1's impulse lands on P2's stopping boundary.

Here the post-impulse target coincides with ``x2_bar``, so the equilibrium has
two thresholds and a single reduced unknown ``w = exp(theta*(x2_bar - x1_bar))``.
P1's and P2's value-matching conditions each give ``x2_bar`` as a function of
``w``; ``G(w)`` is their difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import GameParams, OdeCoefficients, dphi1, dphi2, phi1, phi2, theta
from .rootfind import DEFAULT_NGRID, SOLVER_TOL, log_scan_roots
from .type1 import CLOSED_TOL, W_MAX

W_MIN = 1.0 + 1e-6
X2_AGREE_RTOL = 1e-6


class InconsistentX2(ValueError):
    """The two x2_bar expressions disagree, i.e. w is not a root of G."""


class EmptyRootSet(RuntimeError):
    pass


@dataclass(frozen=True)
class Type2Conditions:
    ne21_value: float
    ne22_lhs: float
    ne22_mid: float
    ne22_rhs: float

    @property
    def ne21_ok(self) -> bool:
        return self.ne21_value > 0

    @property
    def ne22_ok(self) -> bool:
        return self.ne22_mid > self.ne22_lhs - CLOSED_TOL and self.ne22_mid < self.ne22_rhs

    @property
    def ok(self) -> bool:
        return self.ne21_ok and self.ne22_ok

    def failed(self) -> list[str]:
        return [n for n in ("ne21_ok", "ne22_ok") if not getattr(self, n)]


@dataclass(frozen=True)
class Type2Equilibrium:
    w_hat: float
    x1_bar: float
    x2_bar: float
    coeffs: OdeCoefficients
    conditions: Type2Conditions

    @property
    def x1_star(self) -> float:
        return self.x2_bar

    @property
    def thresholds(self):
        return (self.x1_bar, self.x2_bar)

    @property
    def valid(self) -> bool:
        return self.conditions.ok and self.x1_bar < self.x2_bar


@dataclass
class Type2Report:
    roots: list[float] = field(default_factory=list)
    candidates: list[Type2Equilibrium] = field(default_factory=list)
    reason: str = ""

    @property
    def equilibrium(self) -> Type2Equilibrium | None:
        for cand in self.candidates:
            if cand.valid:
                return cand
        return None


def x2_bar_from_p1(w, p: GameParams):
    """x2_bar implied by P1's value matching at x1_bar."""
    r, th = p.r, theta(p)
    L = np.log(w)
    num = (1.0 - p.lam * r) * ((L - 1.0) * w * w + L + 1.0) - p.c * r * th * (w * w + 1.0)
    return num / (th * (1.0 - p.a * r) * (w - 1.0) ** 2) + p.s / (1.0 - p.a * r)


def x2_bar_from_p2(w, p: GameParams):
    """x2_bar implied by P2's value matching at x1_bar."""
    r, th = p.r, theta(p)
    L = np.log(w)
    return (p.q / (1.0 - p.b * r) + (w + 1.0) / (th * (w - 1.0))
            + 2.0 * (th * r * p.d - (1.0 - p.gam * r) * L) * w / (th * (1.0 - p.b * r) * (w - 1.0) ** 2))


def G_of_w(w, p: GameParams):
    return x2_bar_from_p1(w, p) - x2_bar_from_p2(w, p)


def solve_G(p: GameParams, w_max: float = W_MAX, n_grid: int = DEFAULT_NGRID,
            tol: float = SOLVER_TOL) -> list[float]:
    """Every sign-change root of G on (1, w_max], ascending."""
    roots = log_scan_roots(lambda w: G_of_w(w, p), W_MIN, w_max, n_grid, tol)
    if not roots:
        raise EmptyRootSet(
            f"G has no sign change on [{W_MIN}, {w_max:g}]: "
            f"G(lo)={float(G_of_w(W_MIN, p)):.3g}, G(hi)={float(G_of_w(w_max, p)):.3g}"
        )
    return roots


def thresholds_type2(w: float, p: GameParams, rtol: float = X2_AGREE_RTOL):
    """(x1_bar, x2_bar) at a root w of G; both x2_bar expressions must agree."""
    x2 = float(x2_bar_from_p2(w, p))
    x2_alt = float(x2_bar_from_p1(w, p))
    if abs(x2 - x2_alt) > rtol * max(1.0, abs(x2)):
        raise InconsistentX2(f"x2_bar expressions disagree at w={w}: {x2} vs {x2_alt}")
    return x2 - math.log(w) / theta(p), x2


def coefficients_type2(x1_bar: float, x2_bar: float, p: GameParams) -> OdeCoefficients:
    r, th = p.r, theta(p)
    lb, bb = 1.0 - p.lam * r, 1.0 - p.b * r
    base = (p.a - p.lam) * x2_bar - p.c + p.s / r
    C11 = math.exp(-th * x1_bar) / 2 * (base - (x1_bar + 1.0 / th) * lb / r)
    C12 = math.exp(th * x1_bar) / 2 * (base - (x1_bar - 1.0 / th) * lb / r)
    C21 = math.exp(-th * x2_bar) / (2 * r) * (bb * (x2_bar + 1.0 / th) - p.q)
    C22 = math.exp(th * x2_bar) / (2 * r) * (bb * (x2_bar - 1.0 / th) - p.q)
    return OdeCoefficients(C11, C12, C21, C22)


def check_conditions_type2(w: float, p: GameParams) -> Type2Conditions:
    r, th = p.r, theta(p)
    lb, bb = 1.0 - p.lam * r, 1.0 - p.b * r
    L = math.log(w)
    ne21 = lb * (w - w * L - 1.0) + p.c * r * th * w
    mid = bb * (w * w - 1.0) + 2.0 * (th * r * p.d - (1.0 - p.gam * r) * L) * w
    return Type2Conditions(ne21, 0.0, mid, bb * (w - 1.0) ** 2)


def pasting_residuals_type2(x1_bar, x2_bar, co: OdeCoefficients, p: GameParams):
    """Residuals (lhs - rhs) of the six smooth-pasting equations, in a fixed order."""
    return [
        ("p1_c1_x1bar", float(dphi1(x1_bar, co, p) - p.lam)),
        ("p1_c0_x2bar", float(phi1(x2_bar, co, p) - p.a * x2_bar)),
        ("p1_c0_x1bar", float(phi1(x1_bar, co, p) - (p.a * x2_bar - p.c - p.lam * (x2_bar - x1_bar)))),
        ("p2_c1_x2bar", float(dphi2(x2_bar, co, p) + p.b)),
        ("p2_c0_x2bar", float(phi2(x2_bar, co, p) + p.b * x2_bar)),
        ("p2_c0_x1bar", float(phi2(x1_bar, co, p) - (-p.b * x2_bar + p.d + p.gam * (x2_bar - x1_bar)))),
    ]


def build_type2(w: float, p: GameParams) -> Type2Equilibrium:
    x1b, x2b = thresholds_type2(w, p)
    return Type2Equilibrium(w, x1b, x2b, coefficients_type2(x1b, x2b, p), check_conditions_type2(w, p))


def diagnose_type2(p: GameParams, w_max: float = W_MAX, n_grid: int = DEFAULT_NGRID,
                   tol: float = SOLVER_TOL) -> Type2Report:
    try:
        roots = solve_G(p, w_max, n_grid, tol)
    except EmptyRootSet as exc:
        return Type2Report([], [], str(exc))
    rep = Type2Report(roots)
    problems = []
    for w in roots:
        try:
            rep.candidates.append(build_type2(w, p))
        except InconsistentX2 as exc:
            problems.append(str(exc))
    if rep.equilibrium is None:
        problems += [f"w={c.w_hat:.6g}: failed {','.join(c.conditions.failed())}"
                     for c in rep.candidates]
        rep.reason = "; ".join(problems) or "no candidate"
    return rep


def solve_type2(p: GameParams, **kw) -> Type2Equilibrium | None:
    return diagnose_type2(p, **kw).equilibrium
