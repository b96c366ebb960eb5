"""Flat ``key = value`` config files.

One pair per line, ``#`` starts a comment. Game keys are the parameter names
(``lambda``/``gamma`` and ``lam``/``gam`` are both accepted); simulation and
grid settings use the keys in ``RUN_KEYS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import PARAM_NAMES, GameParams

ALIASES = {"lambda": "lam", "gamma": "gam"}
DUMP_NAMES = {"lam": "lambda", "gam": "gamma"}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


RUN_KEYS = {
    "seed": int,
    "n_paths": int,
    "dt": float,
    "T": float,
    "antithetic": _parse_bool,
    "barrier_shift": _parse_bool,
    "grid": int,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: GameParams
    run: dict = field(default_factory=dict)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    game: dict[str, float] = {}
    run: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        name = ALIASES.get(key, key)
        if name in game or name in run:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            if name in PARAM_NAMES:
                game[name] = float(val)
            elif name in RUN_KEYS:
                run[name] = RUN_KEYS[name](val)
            else:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {val!r}") from None
    missing = [DUMP_NAMES.get(n, n) for n in PARAM_NAMES if n not in game]
    if missing:
        raise ConfigError(f"{source}: missing parameter(s): {', '.join(missing)}")
    # InvalidParams propagates with its constraint message
    return RunConfig(GameParams(**game), run)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def dump_config(params: GameParams, run: dict | None = None) -> str:
    lines = [f"{DUMP_NAMES.get(n, n)} = {getattr(params, n)!r}" for n in PARAM_NAMES]
    for k, v in (run or {}).items():
        if k not in RUN_KEYS:
            raise ConfigError(f"unknown run key {k!r}")
        text = str(v).lower() if isinstance(v, bool) else repr(v)
        lines.append(f"{k} = {text}")
    return "\n".join(lines) + "\n"
