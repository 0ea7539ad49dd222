"""Flat ``key=value`` configuration files.

Run config keys (all optional; defaults are the ``GaConfig`` defaults)::

    strategy              one | two
    offspring             children per generation, strategy one (>= 1)
    generations           >= 1
    mutations_min         >= 0
    mutations_max         >= mutations_min
    link_failure_prob     [0, 1]
    node_failure_prob     [0, 1]
    repair_time           >= 1 generations
    n_clients, n_servers  >= 1
    grid_width, grid_height  >= 1
    min_spacing           > 0
    t_max                 > 0, client traffic is uniform on (0, t_max)
    server_capacity       > 0; omit to derive it from target_utilization
    target_utilization    > 0, nominal utilization the derived capacity gives
    cost_per_unit_length  > 0
    n_pairs               >= 1 reliability samples
    low, high             utilization band
    server_prob           [0, 1]
    shared_environment    true | false
    in_band_moves         true | false
    master_seed           >= 0

Scenario files accept the same keys plus ``name``, ``replicates``,
``window`` (``start,end``), ``scenario_seed`` and any number of
``sweep.<key>=v1,v2,...`` lines. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Any, Callable

from .errors import ConfigError
from .experiments import Scenario
from .ga import GaConfig, Strategy

_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def _bool(text: str) -> bool:
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _prob(x: float) -> bool:
    return 0.0 <= x <= 1.0


def _positive(x: float) -> bool:
    return x > 0


def _at_least(n: int) -> Callable[[int], bool]:
    return lambda x: x >= n


# key -> (config path, parser, check, requirement text)
KEYS: dict[str, tuple[str, Callable[[str], Any], Callable[[Any], bool], str]] = {
    "strategy": ("strategy", Strategy.parse, lambda _: True, "one or two"),
    "offspring": ("offspring", int, _at_least(1), ">= 1"),
    "generations": ("generations", int, _at_least(1), ">= 1"),
    "mutations_min": ("mutations_min", int, _at_least(0), ">= 0"),
    "mutations_max": ("mutations_max", int, _at_least(0), ">= 0"),
    "link_failure_prob": ("env.link_failure_prob", float, _prob, "in [0, 1]"),
    "node_failure_prob": ("env.node_failure_prob", float, _prob, "in [0, 1]"),
    "repair_time": ("env.repair_time", int, _at_least(1), ">= 1"),
    "n_clients": ("n_clients", int, _at_least(1), ">= 1"),
    "n_servers": ("n_servers", int, _at_least(1), ">= 1"),
    "grid_width": ("grid_width", int, _at_least(1), ">= 1"),
    "grid_height": ("grid_height", int, _at_least(1), ">= 1"),
    "min_spacing": ("min_spacing", float, _positive, "> 0"),
    "t_max": ("t_max", float, _positive, "> 0"),
    "server_capacity": ("server_capacity", float, _positive, "> 0"),
    "target_utilization": ("target_utilization", float, _positive, "> 0"),
    "cost_per_unit_length": ("cost_per_unit_length", float, _positive, "> 0"),
    "n_pairs": ("n_pairs", int, _at_least(1), ">= 1"),
    "low": ("low", float, _positive, "> 0"),
    "high": ("high", float, _positive, "> 0"),
    "server_prob": ("server_prob", float, _prob, "in [0, 1]"),
    "shared_environment": ("shared_environment", _bool, lambda _: True, "true or false"),
    "in_band_moves": ("in_band_moves", _bool, lambda _: True, "true or false"),
    "master_seed": ("master_seed", int, _at_least(0), ">= 0"),
}
SCENARIO_KEYS = {"name", "replicates", "window", "scenario_seed"}


def parse_value(key: str, text: str) -> Any:
    if key not in KEYS:
        raise ConfigError(key, "unknown key")
    _, parser, check, requirement = KEYS[key]
    try:
        value = parser(text.strip())
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {text!r}: {exc}") from exc
    if not check(value):
        raise ConfigError(key, f"must be {requirement}, got {text.strip()!r}")
    return value


def parse_lines(text: str) -> list[tuple[int, str, str]]:
    """(line number, key, value) for every assignment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out.append((lineno, key, value))
    return out


def apply_overrides(cfg: GaConfig, values: dict[str, Any]) -> GaConfig:
    """Apply already-parsed ``{key: value}`` settings to ``cfg``."""
    fields: dict[str, Any] = {}
    env: dict[str, Any] = {}
    lo, hi = cfg.mutations_per_offspring
    width, height = cfg.grid
    for key, value in values.items():
        path = KEYS[key][0]
        if path.startswith("env."):
            env[path[4:]] = value
        elif path == "mutations_min":
            lo = value
        elif path == "mutations_max":
            hi = value
        elif path == "grid_width":
            width = value
        elif path == "grid_height":
            height = value
        else:
            fields[path] = value
    if lo > hi:
        raise ConfigError("mutations_max", f"must be >= mutations_min ({lo}), got {hi}")
    try:
        return replace(
            cfg,
            env=replace(cfg.env, **env),
            mutations_per_offspring=(lo, hi),
            grid=(width, height),
            **fields,
        )
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from exc


def parse_config(text: str, base: GaConfig | None = None) -> GaConfig:
    values = {}
    for _, key, value in parse_lines(text):
        values[key] = parse_value(key, value)
    return apply_overrides(base or GaConfig(), values)


def load_config(path: str | Path) -> GaConfig:
    """Read a run config; missing keys keep their defaults."""
    return parse_config(Path(path).read_text(encoding="utf-8"))


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    values: dict[str, Any] = {}
    sweeps: list[tuple[str, tuple[Any, ...]]] = []
    options: dict[str, Any] = {"name": Path(path).stem}
    for _, key, value in parse_lines(text):
        if key.startswith("sweep."):
            inner = key[len("sweep."):]
            if inner not in KEYS or KEYS[inner][0] in ("mutations_min", "mutations_max",
                                                      "grid_width", "grid_height"):
                raise ConfigError(key, "not a sweepable key")
            items = [v for v in value.split(",") if v.strip()]
            if not items:
                raise ConfigError(key, "needs at least one value")
            sweeps.append((KEYS[inner][0], tuple(parse_value(inner, v) for v in items)))
        elif key in SCENARIO_KEYS:
            options[key] = value
        else:
            values[key] = parse_value(key, value)
    base = apply_overrides(GaConfig(), values)
    try:
        kwargs: dict[str, Any] = {"name": options["name"], "base": base, "sweeps": tuple(sweeps)}
        if "replicates" in options:
            kwargs["replicates"] = int(options["replicates"])
        if "window" in options:
            start, end = (int(v) for v in options["window"].split(","))
            kwargs["stats_window"] = (start, end)
        if "scenario_seed" in options:
            kwargs["master_seed"] = int(options["scenario_seed"])
        return Scenario(**kwargs)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from exc

