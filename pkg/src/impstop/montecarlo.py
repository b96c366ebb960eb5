"""Monte Carlo estimation of the players' discounted payoffs under threshold strategies.

Each path has its own Philox stream keyed by ``(seed, path index)``, so an
estimate does not depend on batching, and two simulations with the same seed
share their Brownian increments path by path (common random numbers).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numba
import numpy as np

from .model import GameParams

CSV_COLUMNS = ("x0", "j1_mean", "j1_se", "j2_mean", "j2_se", "w1", "w2", "n_paths", "dt", "T", "seed")

# E[overshoot] of a discretely monitored Brownian path, in units of sigma*sqrt(dt):
# -zeta(1/2)/sqrt(2*pi)
BGK_BETA = 0.5826
BATCH = 1024
CHUNK = 2048


class InvalidStrategy(ValueError):
    pass


class InvalidSimConfig(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    T: float | None = None
    n_paths: int = 20_000
    seed: int = 12345
    antithetic: bool = True
    barrier_shift: bool = True

    def horizon(self, p: GameParams) -> float:
        """Truncation time; defaults to the time where the discount factor reaches 1e-3."""
        return self.T if self.T is not None else math.log(1e3) / p.r

    def validate(self, p: GameParams):
        if not self.dt > 0:
            raise InvalidSimConfig(f"dt must be > 0, got {self.dt}")
        if self.n_paths < 100:
            raise InvalidSimConfig(f"n_paths must be >= 100, got {self.n_paths}")
        if self.antithetic and self.n_paths % 2:
            raise InvalidSimConfig("antithetic sampling needs an even n_paths")
        if not 0 <= self.seed < 2**64:
            raise InvalidSimConfig("seed must fit in 64 bits")
        T = self.horizon(p)
        # equality allowed so that the default horizon ln(1e3)/r is accepted
        if math.exp(-p.r * T) > 1e-3 * (1 + 1e-9):
            raise InvalidSimConfig(f"horizon T={T} leaves discount weight {math.exp(-p.r * T):.3g} > 1e-3")


@dataclass(frozen=True)
class Strategy:
    """P1 restores the state to ``target`` whenever it is at or below ``x1_bar``;
    P2 stops once it is at or above ``x2_bar``. A target at or beyond
    ``x2_bar`` is allowed: the impulse then ends the game at once."""

    x1_bar: float
    target: float
    x2_bar: float

    def __post_init__(self):
        if not (self.x1_bar < self.x2_bar and self.x1_bar < self.target):
            raise InvalidStrategy(
                f"need x1_bar < target and x1_bar < x2_bar, got "
                f"({self.x1_bar}, {self.target}, {self.x2_bar})"
            )

    @classmethod
    def from_payoff(cls, pp) -> Strategy:
        return cls(pp.x1_bar, pp.x1_star, pp.x2_bar)


@dataclass(frozen=True)
class SimEstimate:
    x0: float
    j1_mean: float
    j1_se: float
    j2_mean: float
    j2_se: float
    n_interventions_mean: float
    stop_time_mean: float
    censored_frac: float
    truncation_bias_bound: float
    n_paths: int
    dt: float
    T: float
    seed: int


@dataclass
class PathSample:
    """Per-path outcomes; with antithetic sampling rows come in (+, -) pairs."""

    j1: np.ndarray
    j2: np.ndarray
    n_int: np.ndarray
    stop_time: np.ndarray
    censored: np.ndarray
    antithetic: bool

    def units(self, values):
        """Independent sampling units: pair averages under antithetic sampling."""
        return 0.5 * (values[0::2] + values[1::2]) if self.antithetic else values


def _stream_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def path_generator(seed: int, index: int) -> np.random.Generator:
    """Independent stream for path (or antithetic pair) ``index``: its own 2**128 counter block."""
    return np.random.Generator(np.random.Philox(key=_stream_key(seed), counter=[0, 0, index, 0]))


@numba.njit(cache=True)
def _advance(X, t, disc, j1, j2, nint, done, Z, sign, x1b, tgt, x2b,
             sigma, r, c, d, lam, gam, a, b, s, q, dt, n_max, step):
    """Advance each live path through the increments in Z; returns the new step index."""
    sq = sigma * math.sqrt(dt)
    edt = math.exp(-r * dt)
    n_rows, n_cols = Z.shape
    for i in range(n_rows):
        if done[i]:
            continue
        x, tt, dc, p1, p2, k = X[i], t[i], disc[i], j1[i], j2[i], nint[i]
        fin = False
        for jcol in range(n_cols):
            if step + jcol >= n_max:
                break
            if x >= x2b:
                p1 += dc * a * x
                p2 -= dc * b * x
                fin = True
                break
            if x <= x1b:
                dl = tgt - x
                p1 -= dc * (c + lam * dl)
                p2 += dc * (d + gam * dl)
                k += 1
                x = tgt
                if x >= x2b:
                    p1 += dc * a * x
                    p2 -= dc * b * x
                    fin = True
                    break
            p1 += dc * (x - s) * dt
            p2 += dc * (q - x) * dt
            x += sign[i] * sq * Z[i, jcol]
            tt += dt
            dc *= edt
        X[i], t[i], disc[i], j1[i], j2[i], nint[i] = x, tt, dc, p1, p2, k
        if fin:
            done[i] = 1
    return step + n_cols


def _bias_bound(x0, strat: Strategy, p: GameParams, T: float) -> float:
    m = max(abs(x0), abs(strat.x1_bar), abs(strat.x2_bar))
    return math.exp(-p.r * T) * (max(p.a, p.b) * m + (m + max(p.s, p.q)) / p.r)


def simulate_paths(x0: float, strat: Strategy, p: GameParams, cfg: SimConfig) -> PathSample:
    """Simulate every path and keep the per-path outcomes."""
    if not isinstance(strat, Strategy):
        strat = Strategy(*strat)
    cfg.validate(p)
    T = cfg.horizon(p)
    n_max = int(math.ceil(T / cfg.dt - 1e-9))
    n = cfg.n_paths
    j1 = np.zeros(n)
    j2 = np.zeros(n)
    nint = np.zeros(n, dtype=np.int64)
    stop = np.zeros(n)
    cens = np.zeros(n, dtype=np.bool_)
    shift = BGK_BETA * p.sigma * math.sqrt(cfg.dt) if cfg.barrier_shift else 0.0
    x1_mon, x2_mon = strat.x1_bar + shift, strat.x2_bar - shift
    n_streams = n // 2 if cfg.antithetic else n
    rep = 2 if cfg.antithetic else 1
    for start in range(0, n_streams, BATCH):
        streams = list(range(start, min(start + BATCH, n_streams)))
        gens = [path_generator(cfg.seed, k) for k in streams]
        m = len(streams) * rep
        X = np.full(m, float(x0))
        t = np.zeros(m)
        disc = np.ones(m)
        a1 = np.zeros(m)
        a2 = np.zeros(m)
        k_int = np.zeros(m, dtype=np.int64)
        done = np.zeros(m, dtype=np.int8)
        sign = np.tile(np.array([1.0, -1.0][:rep]), len(streams))
        step = 0
        while step < n_max and not done.all():
            width = min(CHUNK, n_max - step)
            live = np.flatnonzero(done.reshape(-1, rep).min(axis=1) == 0)
            Zs = np.empty((len(live), width))
            for row, g in enumerate(live):
                gens[g].standard_normal(out=Zs[row])
            rows = (live[:, None] * rep + np.arange(rep)).ravel()
            Z = np.repeat(Zs, rep, axis=0)
            sub = [arr[rows] for arr in (X, t, disc, a1, a2, k_int, done)]
            _advance(*sub, Z, sign[rows], x1_mon, strat.target, x2_mon,
                     p.sigma, p.r, p.c, p.d, p.lam, p.gam, p.a, p.b, p.s, p.q,
                     cfg.dt, n_max, step)
            for arr, new in zip((X, t, disc, a1, a2, k_int, done), sub):
                arr[rows] = new
            step += width
        lo, hi = start * rep, start * rep + m
        j1[lo:hi], j2[lo:hi], nint[lo:hi], stop[lo:hi] = a1, a2, k_int, t
        cens[lo:hi] = done == 0
    return PathSample(j1, j2, nint, stop, cens, cfg.antithetic)


def _mean_se(u):
    # centring on the first unit keeps constant samples exact (mean = value, se = 0)
    n = len(u)
    dev = u - u[0]
    mean = float(u[0] + np.mean(dev))
    return mean, float(np.std(dev, ddof=1) / math.sqrt(n)) if n > 1 else 0.0


def summarize(x0, sample: PathSample, strat: Strategy, p: GameParams, cfg: SimConfig) -> SimEstimate:
    m1, s1 = _mean_se(sample.units(sample.j1))
    m2, s2 = _mean_se(sample.units(sample.j2))
    T = cfg.horizon(p)
    return SimEstimate(
        x0=float(x0), j1_mean=m1, j1_se=s1, j2_mean=m2, j2_se=s2,
        n_interventions_mean=float(np.mean(sample.n_int)),
        stop_time_mean=float(np.mean(sample.stop_time)),
        censored_frac=float(np.mean(sample.censored)),
        truncation_bias_bound=_bias_bound(x0, strat, p, T),
        n_paths=cfg.n_paths, dt=cfg.dt, T=T, seed=cfg.seed,
    )


def simulate(x0: float, strategy, p: GameParams, cfg: SimConfig) -> SimEstimate:
    """Estimate J1, J2 from ``x0`` when both players follow the threshold ``strategy``.

    Per step: stop if X >= x2_bar; otherwise if X <= x1_bar move X to the
    target (charging P1, crediting P2) and stop at once if the target is in
    P2's region; then accrue running payoffs and take an Euler step. Paths
    alive at T are truncated with no terminal payoff.
    """
    strat = strategy if isinstance(strategy, Strategy) else Strategy(*strategy)
    return summarize(x0, simulate_paths(x0, strat, p, cfg), strat, p, cfg)


@dataclass(frozen=True)
class Deviation:
    player: int
    lever: str
    shift: float
    estimate: float
    baseline: float
    diff: float
    diff_se: float

    @property
    def improves(self) -> bool:
        """True when the deviation gains more than three standard errors."""
        return self.diff > 3.0 * self.diff_se


LEVERS = {"x1_bar": 1, "target": 1, "x2_bar": 2}


def perturbed_strategy(strat: Strategy, lever: str, shift: float) -> Strategy:
    vals = dict(x1_bar=strat.x1_bar, target=strat.target, x2_bar=strat.x2_bar)
    if lever not in vals:
        raise ValueError(f"unknown lever {lever!r}; choose from {sorted(vals)}")
    vals[lever] += shift
    return Strategy(vals["x1_bar"], vals["target"], vals["x2_bar"])


def best_response_scan(x0: float, pp, p: GameParams, cfg: SimConfig, perturbations) -> list[Deviation]:
    """Unilateral threshold deviations, each compared to equilibrium play on common random numbers.

    ``perturbations`` holds ``(lever, shift)`` pairs; levers ``x1_bar`` and
    ``target`` belong to P1, ``x2_bar`` to P2. Only the deviating player's
    payoff is reported.
    """
    base_strat = Strategy.from_payoff(pp)
    base = simulate_paths(x0, base_strat, p, cfg)
    out = []
    for lever, shift in perturbations:
        strat = perturbed_strategy(base_strat, lever, shift)
        dev = simulate_paths(x0, strat, p, cfg)
        player = LEVERS[lever]
        yb = base.j1 if player == 1 else base.j2
        yd = dev.j1 if player == 1 else dev.j2
        diff, diff_se = _mean_se(base.units(yd - yb))
        out.append(Deviation(player, lever, float(shift), float(np.mean(yd)),
                             float(np.mean(yb)), diff, diff_se))
    return out


def estimates_to_csv(rows) -> str:
    """``rows``: iterable of (SimEstimate, w1, w2)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for est, w1, w2 in rows:
        w.writerow([repr(est.x0), repr(est.j1_mean), repr(est.j1_se), repr(est.j2_mean),
                    repr(est.j2_se), repr(float(w1)), repr(float(w2)), est.n_paths,
                    repr(est.dt), repr(est.T), est.seed])
    return buf.getvalue()
