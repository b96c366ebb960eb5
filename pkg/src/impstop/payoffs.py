"""Piecewise equilibrium payoffs W1, W2 and the intervention operators.

Both equilibrium types share one layout: P1 intervenes on (-inf, x1_bar],
nobody acts on (x1_bar, x2_bar) and P2 stops on [x2_bar, inf). They differ in
where P1's impulse lands: at an interior x1_star (Type I) or at x2_bar
itself (Type II).

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GameParams, OdeCoefficients, theta

TYPE_I = "I"
TYPE_II = "II"


@dataclass(frozen=True)
class PiecewisePayoff:
    kind: str
    x1_bar: float
    x1_star: float
    x2_bar: float
    coeffs: OdeCoefficients
    params: GameParams

    def __post_init__(self):
        if self.kind not in (TYPE_I, TYPE_II):
            raise ValueError(f"unknown equilibrium kind {self.kind!r}")
        if self.kind == TYPE_II and self.x1_star != self.x2_bar:
            raise ValueError("Type II payoff needs x1_star == x2_bar")
        if not self.x1_bar < self.x1_star <= self.x2_bar:
            raise ValueError(
                f"thresholds out of order: {self.x1_bar}, {self.x1_star}, {self.x2_bar}"
            )

    @classmethod
    def from_type1(cls, eq, p: GameParams) -> PiecewisePayoff:
        return cls(TYPE_I, eq.x1_bar, eq.x1_star, eq.x2_bar, eq.coeffs, p)

    @classmethod
    def from_type2(cls, eq, p: GameParams) -> PiecewisePayoff:
        return cls(TYPE_II, eq.x1_bar, eq.x2_bar, eq.x2_bar, eq.coeffs, p)

    @classmethod
    def from_equilibrium(cls, eq, p: GameParams) -> PiecewisePayoff:
        if hasattr(eq, "z_tilde"):
            return cls.from_type1(eq, p)
        return cls.from_type2(eq, p)

    @property
    def thresholds(self):
        return (self.x1_bar, self.x1_star, self.x2_bar)

    @property
    def target(self) -> float:
        return self.x1_star

    def replace(self, **changes) -> PiecewisePayoff:
        d = dict(kind=self.kind, x1_bar=self.x1_bar, x1_star=self.x1_star,
                 x2_bar=self.x2_bar, coeffs=self.coeffs, params=self.params)
        d.update(changes)
        return PiecewisePayoff(**d)

    # -- the two ODE solutions, with exponents referenced to x2_bar --

    def _phi(self, x, k, deriv=0):
        p, co = self.params, self.coeffs
        th = theta(p)
        if k == 1:
            A, B = co.C11 * math.exp(th * self.x2_bar), co.C12 * math.exp(-th * self.x2_bar)
        else:
            A, B = co.C21 * math.exp(th * self.x2_bar), co.C22 * math.exp(-th * self.x2_bar)
        sign = 1.0 if k == 1 else -1.0
        u = np.exp(th * (x - self.x2_bar))
        v = 1.0 / u
        if deriv == 0:
            lin = (x - p.s) / p.r if k == 1 else (p.q - x) / p.r
            return A * u + B * v + lin
        if deriv == 1:
            return th * (A * u - B * v) + sign / p.r
        return th * th * (A * u + B * v)

    def phi1(self, x, deriv=0):
        return self._phi(np.asarray(x, dtype=float), 1, deriv)

    def phi2(self, x, deriv=0):
        return self._phi(np.asarray(x, dtype=float), 2, deriv)

    def _pieces(self, x, low, mid, high):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        lo_m = x <= self.x1_bar
        hi_m = x >= self.x2_bar
        mid_m = ~(lo_m | hi_m)
        out[lo_m] = low(x[lo_m])
        out[hi_m] = high(x[hi_m])
        out[mid_m] = mid(x[mid_m])
        return out if out.ndim else float(out)

    def _p1_landing_value(self):
        """W1 at the post-impulse state."""
        if self.kind == TYPE_I:
            return float(self.phi1(self.x1_star))
        return self.params.a * self.x2_bar

    def _p2_landing_value(self):
        if self.kind == TYPE_I:
            return float(self.phi2(self.x1_star))
        return -self.params.b * self.x2_bar

    def W1(self, x, deriv=0):
        p, t = self.params, self.x1_star
        land = self._p1_landing_value()
        if deriv == 0:
            return self._pieces(x, lambda y: land - p.c - p.lam * (t - y),
                                lambda y: self.phi1(y), lambda y: p.a * y)
        if deriv == 1:
            return self._pieces(x, lambda y: np.full_like(y, p.lam),
                                lambda y: self.phi1(y, 1), lambda y: np.full_like(y, p.a))
        return self._pieces(x, np.zeros_like, lambda y: self.phi1(y, 2), np.zeros_like)

    def W2(self, x, deriv=0):
        p, t = self.params, self.x1_star
        land = self._p2_landing_value()
        if deriv == 0:
            return self._pieces(x, lambda y: land + p.d + p.gam * (t - y),
                                lambda y: self.phi2(y), lambda y: -p.b * y)
        if deriv == 1:
            return self._pieces(x, lambda y: np.full_like(y, -p.gam),
                                lambda y: self.phi2(y, 1), lambda y: np.full_like(y, -p.b))
        return self._pieces(x, np.zeros_like, lambda y: self.phi2(y, 2), np.zeros_like)

    def delta(self, x):
        """Optimal impulse size; zero at and above the landing point."""
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.x1_star, self.x1_star - x, 0.0)
        return out if out.ndim else float(out)

    def M_op(self, x):
        """P1's payoff right after an optimal impulse from x."""
        p = self.params
        dl = self.delta(x)
        return self.W1(np.asarray(x, dtype=float) + dl) - p.c - p.lam * np.abs(dl)

    def H_op(self, x):
        """P2's payoff right after P1's optimal impulse from x."""
        p = self.params
        dl = self.delta(x)
        return self.W2(np.asarray(x, dtype=float) + dl) + p.d + p.gam * np.abs(dl)

    def gamma_fn(self, y):
        """y -> W1(y) - lambda*y, maximised by the landing point."""
        return self.W1(y) - self.params.lam * np.asarray(y, dtype=float)

    def jumps(self):
        """One-sided mismatches of W1, W2 and their slopes at x1_bar and x2_bar."""
        p = self.params
        land1, land2 = self._p1_landing_value(), self._p2_landing_value()
        xb1, xb2, t = self.x1_bar, self.x2_bar, self.x1_star
        return {
            "W1_c0_x1bar": float(self.phi1(xb1)) - (land1 - p.c - p.lam * (t - xb1)),
            "W1_c1_x1bar": float(self.phi1(xb1, 1)) - p.lam,
            "W1_c0_x2bar": float(self.phi1(xb2)) - p.a * xb2,
            "W2_c0_x1bar": float(self.phi2(xb1)) - (land2 + p.d + p.gam * (t - xb1)),
            "W2_c0_x2bar": float(self.phi2(xb2)) + p.b * xb2,
            "W2_c1_x2bar": float(self.phi2(xb2, 1)) + p.b,
        }
