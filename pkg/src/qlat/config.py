"""Fabric and technology parameters.

Defaults describe a 60x60 tile grid with channel capacity 5, qubit speed
0.001 ULB/us, 100 us per neighbour hop, and per-gate delays in microseconds
(H 5440, T and T-dagger 10940, X/Y/Z 5240, CNOT 4930).  No measured delay is
available for the S gate; it defaults to the X/Y/Z class value and reports
flag it as assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

from .circuit import FT_GATES, GateKind


class ConfigError(ValueError):
    """Raised on invalid fabric configuration."""


DEFAULT_DELAYS_US: Mapping[GateKind, float] = MappingProxyType({
    GateKind.H: 5440.0,
    GateKind.T: 10940.0,
    GateKind.TDAG: 10940.0,
    GateKind.X: 5240.0,
    GateKind.Y: 5240.0,
    GateKind.Z: 5240.0,
    GateKind.S: 5240.0,   # assumed: same class as X/Y/Z
    GateKind.CNOT: 4930.0,
})


@dataclass(frozen=True)
class FabricConfig:
    """Tiled-architecture parameters.

    ``width`` x ``length`` tiles, each a 1x1 ULB; ``channel_capacity`` qubits
    fit a routing channel before queueing starts; ``qubit_speed`` is in ULB
    per microsecond; ``move_time_us`` is the cost of one neighbour hop;
    ``q_max`` truncates the per-occupancy coverage series.
    """

    width: int = 60
    length: int = 60
    channel_capacity: int = 5
    qubit_speed: float = 0.001
    move_time_us: float = 100.0
    delays_us: Mapping[GateKind, float] = field(default=DEFAULT_DELAYS_US)
    q_max: int = 20
    d_s_assumed: bool = True

    def __post_init__(self) -> None:
        if self.width < 1 or self.length < 1:
            raise ConfigError(f"fabric must be at least 1x1, got {self.width}x{self.length}")
        if self.channel_capacity < 1:
            raise ConfigError("channel_capacity must be >= 1")
        if self.qubit_speed <= 0:
            raise ConfigError("qubit_speed must be > 0")
        if self.move_time_us <= 0:
            raise ConfigError("move_time_us must be > 0")
        if self.q_max < 1:
            raise ConfigError("q_max must be >= 1")
        for kind in FT_GATES:
            d = self.delays_us.get(kind)
            if d is None:
                raise ConfigError(f"missing delay for gate kind {kind.value!r}")
            if d <= 0:
                raise ConfigError(f"delay for {kind.value!r} must be > 0, got {d}")

    @property
    def area(self) -> int:
        return self.width * self.length

    def delay(self, kind: GateKind) -> float:
        try:
            return self.delays_us[kind]
        except KeyError:
            raise ConfigError(f"no delay configured for gate kind {kind.value!r}") from None


_DELAY_KEYS = {
    "d_h": GateKind.H,
    "d_t": GateKind.T,
    "d_tdag": GateKind.TDAG,
    "d_s": GateKind.S,
    "d_x": GateKind.X,
    "d_y": GateKind.Y,
    "d_z": GateKind.Z,
    "d_cnot": GateKind.CNOT,
}

_INT_KEYS = {"a": "width", "b": "length", "n_c": "channel_capacity", "q_max": "q_max"}
_FLOAT_KEYS = {"v": "qubit_speed", "t_move": "move_time_us"}


def apply_settings(cfg: FabricConfig, settings: Mapping[str, str]) -> FabricConfig:
    """Apply flat ``key = value`` settings (config-file keys) to a config."""
    kwargs: dict = {}
    delays = dict(cfg.delays_us)
    d_s_assumed = cfg.d_s_assumed
    for raw_key, raw_val in settings.items():
        key = raw_key.strip().lower()
        val = raw_val.strip()
        try:
            if key in _INT_KEYS:
                kwargs[_INT_KEYS[key]] = int(val)
            elif key in _FLOAT_KEYS:
                kwargs[_FLOAT_KEYS[key]] = float(val)
            elif key in _DELAY_KEYS:
                delays[_DELAY_KEYS[key]] = float(val)
                if key == "d_s":
                    d_s_assumed = False
            else:
                raise ConfigError(f"unknown configuration key {raw_key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {raw_key!r}: {raw_val!r}") from None
    return replace(cfg, delays_us=MappingProxyType(delays),
                   d_s_assumed=d_s_assumed, **kwargs)


def load_fabric_config(path: str, base: FabricConfig | None = None) -> FabricConfig:
    """Read a flat ``key = value`` configuration file (# starts a comment)."""
    settings: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, val = line.partition("=")
            settings[key.strip()] = val.strip()
    return apply_settings(base if base is not None else FabricConfig(), settings)
