"""Linear controller-vs-stopper game: parameters and the homogeneous ODE solutions.

P1 (the controller) earns ``x - s`` per unit time, pays ``c + lambda*|delta|``
per impulse and receives ``a*X`` when the game is stopped. P2 (the stopper)
earns ``q - x``, collects ``d + gamma*|delta|`` from each impulse and pays
``b*X`` on stopping. Both discount at rate ``r``; the uncontrolled state is
``x + sigma*W_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

PARAM_NAMES = ("r", "sigma", "c", "d", "lam", "gam", "a", "b", "s", "q")


class InvalidParams(ValueError):
    """Raised when a parameter set violates one of the game's standing constraints."""


@dataclass(frozen=True)
class GameParams:
    r: float
    sigma: float
    c: float
    d: float
    lam: float
    gam: float
    a: float
    b: float
    s: float
    q: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise InvalidParams(f"{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        for name in ("r", "sigma", "c", "d", "lam", "gam", "s"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("a", "b", "q"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.a < self.lam:
            raise InvalidParams(f"need a < lambda (terminal sensitivity below proportional cost), got a={self.a}, lambda={self.lam}")
        if not self.b < self.gam:
            raise InvalidParams(f"need b < gamma (terminal sensitivity below proportional gain), got b={self.b}, gamma={self.gam}")
        if not 1 - self.lam * self.r > 0:
            raise InvalidParams(f"need 1 - lambda*r > 0, got {1 - self.lam * self.r}")
        if not 1 - self.b * self.r > 0:
            raise InvalidParams(f"need 1 - b*r > 0, got {1 - self.b * self.r}")
        # both threshold formulas divide by (1 - a*r)
        if not 1 - self.a * self.r > 0:
            raise InvalidParams(f"need 1 - a*r > 0, got {1 - self.a * self.r}")

    @property
    def theta(self) -> float:
        return theta(self)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def replace(self, **changes) -> GameParams:
        d = self.as_dict()
        d.update(changes)
        return GameParams(**d)


@dataclass(frozen=True)
class OdeCoefficients:
    C11: float
    C12: float
    C21: float
    C22: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"coefficient {f.name} is not finite: {v!r}")
            object.__setattr__(self, f.name, float(v))

    def as_tuple(self):
        return (self.C11, self.C12, self.C21, self.C22)


def theta(p: GameParams) -> float:
    """Exponent sqrt(2r/sigma^2) of the homogeneous solutions."""
    return math.sqrt(2.0 * p.r / p.sigma**2)


def phi1(x, co: OdeCoefficients, p: GameParams):
    th = theta(p)
    return co.C11 * np.exp(th * x) + co.C12 * np.exp(-th * x) + (x - p.s) / p.r


def phi2(x, co: OdeCoefficients, p: GameParams):
    th = theta(p)
    return co.C21 * np.exp(th * x) + co.C22 * np.exp(-th * x) + (p.q - x) / p.r


def dphi1(x, co, p):
    th = theta(p)
    return th * (co.C11 * np.exp(th * x) - co.C12 * np.exp(-th * x)) + 1.0 / p.r


def dphi2(x, co, p):
    th = theta(p)
    return th * (co.C21 * np.exp(th * x) - co.C22 * np.exp(-th * x)) - 1.0 / p.r


def d2phi1(x, co, p):
    th = theta(p)
    return th * th * (co.C11 * np.exp(th * x) + co.C12 * np.exp(-th * x))


def d2phi2(x, co, p):
    th = theta(p)
    return th * th * (co.C21 * np.exp(th * x) + co.C22 * np.exp(-th * x))


def ode_residual1(x, co, p):
    """0.5*sigma^2*phi1'' - r*phi1 + (x - s); zero up to rounding."""
    return 0.5 * p.sigma**2 * d2phi1(x, co, p) - p.r * phi1(x, co, p) + (x - p.s)


def ode_residual2(x, co, p):
    return 0.5 * p.sigma**2 * d2phi2(x, co, p) - p.r * phi2(x, co, p) + (p.q - x)
