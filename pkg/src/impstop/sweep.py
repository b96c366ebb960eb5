"""Comparative statics: one-parameter sweeps and local bump signs."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .model import GameParams, InvalidParams
from .payoffs import TYPE_I, TYPE_II
from .type1 import diagnose_type1
from .type2 import diagnose_type2

# user-facing sweep names -> GameParams fields
SWEEP_PARAMS = {"c": "c", "d": "d", "lambda": "lam", "gamma": "gam", "a": "a", "b": "b",
                "s": "s", "q": "q", "r": "r", "sigma": "sigma", "lam": "lam", "gam": "gam"}

SWEEP_COLUMNS = ("param", "value", "type1", "type2",
                 "t1_x1_bar", "t1_x1_star", "t1_x2_bar", "z_tilde", "w_tilde", "t1_flags",
                 "t2_x1_bar", "t2_x2_bar", "w_hat", "t2_flags", "reason")


class UnknownParam(KeyError):
    pass


def field_name(param: str) -> str:
    try:
        return SWEEP_PARAMS[param]
    except KeyError:
        choices = ", ".join(k for k in SWEEP_PARAMS if k not in ("lam", "gam"))
        raise UnknownParam(f"unknown sweep parameter {param!r}; choose from {choices}") from None


@dataclass
class SweepRow:
    param: str
    value: float
    t1: object = None        # Type1Equilibrium or None
    t2: object = None        # Type2Equilibrium or None
    t1_flags: str = ""
    t2_flags: str = ""
    reason: str = ""

    def cells(self):
        def num(x):
            return repr(float(x)) if x is not None else ""

        t1, t2 = self.t1, self.t2
        valid_params = self.t1_flags != "" or self.t2_flags != ""
        return [
            self.param, repr(float(self.value)),
            ("yes" if t1 is not None else "no") if valid_params else "",
            ("yes" if t2 is not None else "no") if valid_params else "",
            num(t1 and t1.x1_bar), num(t1 and t1.x1_star), num(t1 and t1.x2_bar),
            num(t1 and t1.z_tilde), num(t1 and t1.w_tilde), self.t1_flags,
            num(t2 and t2.x1_bar), num(t2 and t2.x2_bar), num(t2 and t2.w_hat), self.t2_flags,
            self.reason,
        ]


def _flags(report, kind):
    if report.equilibrium is not None:
        return "ok"
    if not report.candidates:
        return "no_root"
    return "fail:" + "|".join(sorted({f for c in report.candidates for f in c.conditions.failed()}))


def sweep_point(base: GameParams, param: str, value: float, **solver_kw) -> SweepRow:
    name = field_name(param)
    row = SweepRow(param, value)
    try:
        p = base.replace(**{name: value})
    except InvalidParams as exc:
        row.reason = str(exc)
        return row
    r1 = diagnose_type1(p, **solver_kw)
    r2 = diagnose_type2(p, **solver_kw)
    row.t1, row.t2 = r1.equilibrium, r2.equilibrium
    row.t1_flags, row.t2_flags = _flags(r1, TYPE_I), _flags(r2, TYPE_II)
    return row


def sweep(base: GameParams, param: str, lo: float, hi: float, steps: int, **solver_kw) -> list[SweepRow]:
    field_name(param)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    values = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    return [sweep_point(base, param, float(v), **solver_kw) for v in values]


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def gap_variable(p: GameParams, kind: str) -> float:
    """w_tilde for Type I, w_hat for Type II; nan when that type has no equilibrium."""
    if kind == TYPE_I:
        eq = diagnose_type1(p).equilibrium
        return eq.w_tilde if eq is not None else math.nan
    eq = diagnose_type2(p).equilibrium
    return eq.w_hat if eq is not None else math.nan


def bump_sign(p: GameParams, kind: str, param: str, rel: float = 0.01) -> int:
    """Sign of the central difference of w under a +-rel relative bump of ``param``.

    Returns 0 when either bumped point has no equilibrium or the parameter is
    zero (a relative bump would not move it).
    """
    name = field_name(param)
    v = getattr(p, name)
    if v == 0:
        return 0
    try:
        up = gap_variable(p.replace(**{name: v * (1 + rel)}), kind)
        dn = gap_variable(p.replace(**{name: v * (1 - rel)}), kind)
    except InvalidParams:
        return 0
    if not (math.isfinite(up) and math.isfinite(dn)):
        return 0
    return int(np.sign(up - dn))
