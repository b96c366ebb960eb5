"""Bracketed scalar root finding and sign-change root isolation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

DEFAULT_TOL = 1e-10
SOLVER_TOL = 1e-13
DEFAULT_NGRID = 4096
MAX_ITER = 200


class NoSignChange(ValueError):
    pass


class MaxIterations(RuntimeError):
    pass


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise NoSignChange(f"empty bracket [{self.lo}, {self.hi}]")
        if not self.f_lo * self.f_hi < 0:
            raise NoSignChange(
                f"no sign change on [{self.lo}, {self.hi}]: f={self.f_lo}, {self.f_hi}"
            )

    @classmethod
    def of(cls, f: Callable[[float], float], lo: float, hi: float) -> Bracket:
        return cls(lo, hi, float(f(lo)), float(f(hi)))


def find_root(f: Callable[[float], float], bracket: Bracket, tol: float = DEFAULT_TOL) -> float:
    """Brent's method on a sign-changing bracket.

    Converged when the bracket width is below ``tol * max(1, |x|)``; fails with
    MaxIterations after 200 iterations.
    """
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    try:
        x, info = brentq(
            f, bracket.lo, bracket.hi,
            xtol=tol, rtol=max(tol, 4 * np.finfo(float).eps),
            maxiter=MAX_ITER, full_output=True, disp=False,
        )
    except ValueError as exc:
        raise NoSignChange(str(exc)) from exc
    if not info.converged:
        raise MaxIterations(f"no convergence in {MAX_ITER} iterations ({info.flag})")
    return float(x)


def _evaluate(f, xs):
    try:
        ys = np.asarray(f(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except (TypeError, ValueError):
        pass
    return np.array([f(x) for x in xs], dtype=float)


def scan_roots(f: Callable, lo: float, hi: float, n_grid: int = DEFAULT_NGRID,
               tol: float = DEFAULT_TOL) -> list[float]:
    """All roots of ``f`` visible as sign changes on a uniform ``n_grid`` mesh of [lo, hi].

    Each sign-change cell (and each exact mesh zero) is refined with
    :func:`find_root`; results come back ascending with near-duplicates merged.
    Roots of even multiplicity and pairs of roots sharing a cell are invisible.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    xs = np.linspace(lo, hi, n_grid)
    ys = _evaluate(f, xs)
    roots = []
    for i in range(n_grid):
        if ys[i] == 0.0:
            roots.append(float(xs[i]))
    finite = np.isfinite(ys)
    for i in range(n_grid - 1):
        if not (finite[i] and finite[i + 1]):
            continue
        if ys[i] * ys[i + 1] < 0:
            roots.append(find_root(f, Bracket(xs[i], xs[i + 1], ys[i], ys[i + 1]), tol))
    roots.sort()
    merged: list[float] = []
    for x in roots:
        if merged and abs(x - merged[-1]) < 1e-8 * max(1.0, abs(x)):
            continue
        merged.append(x)
    return merged


def log_scan_roots(f: Callable, lo: float, hi: float, n_grid: int = DEFAULT_NGRID,
                   tol: float = DEFAULT_TOL) -> list[float]:
    """scan_roots in the variable u = ln(x), for 0 < lo < hi spanning decades."""
    if lo <= 0:
        raise ValueError("log scan needs lo > 0")
    us = scan_roots(lambda u: f(np.exp(u)), math.log(lo), math.log(hi), n_grid, tol)
    return [math.exp(u) for u in us]
