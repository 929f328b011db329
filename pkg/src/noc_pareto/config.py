"""Flat key=value run configuration.

The config file mirrors the simulator's flat-variable style: one `key =
value` per line, `#` comments, dotted keys for the power and annealing
sections. Unknown keys are rejected so typos fail loudly instead of
silently running defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from noc_pareto.evaluator import NetworkEvaluator
from noc_pareto.layout import DEFAULT_CHIP_MM, DEFAULT_CYCLES_PER_MM, TiledLayout
from noc_pareto.netsim import RouterParams, TrafficConfig
from noc_pareto.optimize import AnnealSchedule
from noc_pareto.powermodel import PowerParams

DEFAULT_WEIGHTS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


class ConfigError(ValueError):
    """Raised for unparseable files, unknown keys, or bad values."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs to build an evaluator and run."""

    routers: int | None = None
    grid: tuple[int, int] | None = None
    chip_mm: tuple[float, float] = (DEFAULT_CHIP_MM, DEFAULT_CHIP_MM)
    cycles_per_mm: float = DEFAULT_CYCLES_PER_MM
    injection_rate: float = 0.1
    sample_period: int = 1000
    warmup: int = 1000
    buffer_depth: int = 8
    packet_size: int = 1
    power: PowerParams = field(default_factory=PowerParams)
    anneal_t_start: float | None = None
    anneal_t_end: float | None = None
    anneal_lambda: float | None = None
    anneal_budget: int = 10_000
    anneal_compare: str = "best"
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    seed: int = 0

    def layout(self, n: int | None = None) -> TiledLayout:
        n = n if n is not None else self.routers
        if n is None:
            raise ConfigError("router count not set (config key 'routers' or --n)")
        return TiledLayout.for_routers(n, grid=self.grid, chip_mm=self.chip_mm,
                                       cycles_per_mm=self.cycles_per_mm)

    def traffic(self) -> TrafficConfig:
        return TrafficConfig(
            injection_rate=self.injection_rate,
            packet_size_flits=self.packet_size,
            sample_period_cycles=self.sample_period,
            warmup_cycles=self.warmup,
            max_drain_cycles=2 * self.sample_period,
        )

    def router_params(self) -> RouterParams:
        return RouterParams(buffer_depth_flits=self.buffer_depth)

    def evaluator(self, n: int | None = None) -> NetworkEvaluator:
        return NetworkEvaluator(
            layout=self.layout(n),
            traffic=self.traffic(),
            router=self.router_params(),
            power=self.power,
            base_seed=self.seed,
        )

    def schedule(self) -> AnnealSchedule | None:
        """Explicit schedule when the config pins temperatures, else None
        (the annealer then derives a self-scaled one from its budget)."""
        if self.anneal_t_start is None:
            return None
        t_end = self.anneal_t_end if self.anneal_t_end is not None else self.anneal_t_start * 1e-3
        if self.anneal_lambda is not None:
            return AnnealSchedule(self.anneal_t_start, t_end, self.anneal_lambda)
        return AnnealSchedule.for_budget(self.anneal_t_start, self.anneal_budget,
                                         t_end_ratio=t_end / self.anneal_t_start)


def _parse_int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"expected an integer, got {s!r}") from None


def _parse_float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"expected a number, got {s!r}") from None


def _parse_grid(s: str) -> tuple[int, int]:
    parts = s.lower().replace("×", "x").split("x")
    if len(parts) != 2:
        raise ConfigError(f"expected ROWSxCOLS, got {s!r}")
    return _parse_int(parts[0]), _parse_int(parts[1])


def _parse_pair(s: str) -> tuple[float, float]:
    parts = s.split(",")
    if len(parts) == 1:
        v = _parse_float(parts[0])
        return v, v
    if len(parts) != 2:
        raise ConfigError(f"expected WIDTH,HEIGHT got {s!r}")
    return _parse_float(parts[0]), _parse_float(parts[1])


def _parse_weights(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(w) for w in s.split(","))
    except ValueError:
        raise ConfigError(f"bad weights list {s!r}") from None


# key -> (RunConfig field, parser); power.* handled separately
_KEYS = {
    "routers": ("routers", _parse_int),
    "grid": ("grid", _parse_grid),
    "chip_mm": ("chip_mm", _parse_pair),
    "cycles_per_mm": ("cycles_per_mm", _parse_float),
    "injection_rate": ("injection_rate", _parse_float),
    "sample_period": ("sample_period", _parse_int),
    "warmup": ("warmup", _parse_int),
    "buffer_depth": ("buffer_depth", _parse_int),
    "packet_size": ("packet_size", _parse_int),
    "anneal.t_start": ("anneal_t_start", _parse_float),
    "anneal.t_end": ("anneal_t_end", _parse_float),
    "anneal.lambda": ("anneal_lambda", _parse_float),
    "anneal.budget": ("anneal_budget", _parse_int),
    "anneal.compare": ("anneal_compare", str),
    "weights": ("weights", _parse_weights),
    "seed": ("seed", _parse_int),
}

_POWER_KEYS = {f.name for f in fields(PowerParams)}


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    power_kwargs: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("power."):
            pkey = key.removeprefix("power.")
            if pkey not in _POWER_KEYS:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            power_kwargs[pkey] = _parse_float(value)
        elif key in _KEYS:
            attr, parser = _KEYS[key]
            cfg = replace(cfg, **{attr: parser(value)})
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    if power_kwargs:
        cfg = replace(cfg, power=replace(cfg.power, **power_kwargs))
    try:
        validate(cfg)
    except ValueError as e:
        raise ConfigError(f"{source}: {e}") from None
    return cfg


def parse_config_file(path: str | Path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(), source=str(p))


def validate(cfg: RunConfig) -> None:
    """Run the referenced module validations eagerly."""
    cfg.traffic()
    cfg.router_params()
    cfg.schedule()
    if cfg.anneal_compare not in ("best", "current"):
        raise ConfigError(f"anneal.compare must be best or current, got {cfg.anneal_compare!r}")
    if cfg.anneal_budget < 1:
        raise ConfigError("anneal.budget must be >= 1")
    if not cfg.weights:
        raise ConfigError("weights list must not be empty")
    if cfg.routers is not None and cfg.routers < 2:
        raise ConfigError("routers must be >= 2")


def format_config(cfg: RunConfig) -> str:
    """Emit the full configuration in the accepted key=value form."""
    lines = []
    if cfg.routers is not None:
        lines.append(f"routers = {cfg.routers}")
    if cfg.grid is not None:
        lines.append(f"grid = {cfg.grid[0]}x{cfg.grid[1]}")
    lines.append(f"chip_mm = {cfg.chip_mm[0]},{cfg.chip_mm[1]}")
    lines.append(f"cycles_per_mm = {cfg.cycles_per_mm}")
    lines.append(f"injection_rate = {cfg.injection_rate}")
    lines.append(f"sample_period = {cfg.sample_period}")
    lines.append(f"warmup = {cfg.warmup}")
    lines.append(f"buffer_depth = {cfg.buffer_depth}")
    lines.append(f"packet_size = {cfg.packet_size}")
    for f in fields(PowerParams):
        lines.append(f"power.{f.name} = {getattr(cfg.power, f.name)}")
    if cfg.anneal_t_start is not None:
        lines.append(f"anneal.t_start = {cfg.anneal_t_start}")
    if cfg.anneal_t_end is not None:
        lines.append(f"anneal.t_end = {cfg.anneal_t_end}")
    if cfg.anneal_lambda is not None:
        lines.append(f"anneal.lambda = {cfg.anneal_lambda}")
    lines.append(f"anneal.budget = {cfg.anneal_budget}")
    lines.append(f"anneal.compare = {cfg.anneal_compare}")
    lines.append("weights = " + ",".join(str(w) for w in cfg.weights))
    lines.append(f"seed = {cfg.seed}")
    return "\n".join(lines) + "\n"
