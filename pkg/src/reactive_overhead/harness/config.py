"""Scenario configuration and the desk-scale presets."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

from ..constants import Protocol, ProtocolConstants


class ConfigError(ValueError):
    """A scenario file or override could not be turned into a valid config."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    area: tuple = (500.0, 500.0)
    nodes: int = 20
    speed: float = 15.0
    pause: float = 2.0
    duration: float = 120.0
    flows: int = 6
    packet_size: int = 512
    link_rate: float = 2e6
    protocol: str = "AODV"
    seed: int = 1
    runs: int = 5
    radio_range: float = 200.0
    packet_interval: float = 0.25
    hop_delay: float = 0.003
    x_axis: str = "pause"             # "pause", "nodes" or "hops"

    def __post_init__(self):
        w, h = self.area
        positive = dict(width=w, height=h, nodes=self.nodes, duration=self.duration,
                        flows=self.flows, packet_size=self.packet_size, link_rate=self.link_rate,
                        runs=self.runs, radio_range=self.radio_range,
                        packet_interval=self.packet_interval)
        for key, value in positive.items():
            if not value > 0:
                raise ConfigError(f"{key} must be > 0, got {value}")
        if self.speed < 0 or self.pause < 0 or self.hop_delay < 0:
            raise ConfigError("speed, pause and hop_delay must be >= 0")
        if self.nodes < 2:
            raise ConfigError("need at least 2 nodes for a flow")
        if self.x_axis not in ("pause", "nodes", "hops"):
            raise ConfigError(f"unknown x axis {self.x_axis!r}")
        Protocol.parse(self.protocol)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    @property
    def x_value(self) -> float:
        return {"pause": self.pause, "nodes": self.nodes}.get(self.x_axis, float("nan"))


def scenario1(protocol="AODV", seed=1, runs=5) -> ScenarioConfig:
    return ScenarioConfig("scenario1", (400.0, 300.0), 20, 5.0, 2.0, 60.0, 5,
                          protocol=protocol, seed=seed, runs=runs, x_axis="hops")


def scenario2(pause=0.0, protocol="AODV", seed=1, runs=5) -> ScenarioConfig:
    return ScenarioConfig("scenario2", (500.0, 500.0), 20, 15.0, pause, 120.0, 6,
                          protocol=protocol, seed=seed, runs=runs, x_axis="pause")


def scenario3(nodes=20, protocol="AODV", seed=1, runs=5) -> ScenarioConfig:
    return ScenarioConfig("scenario3", (500.0, 500.0), nodes, 15.0, 2.0, 120.0, 6,
                          protocol=protocol, seed=seed, runs=runs, x_axis="nodes")


SCENARIO2_PAUSES = (0.0, 30.0, 60.0, 120.0)
SCENARIO3_NODES = (5, 10, 20, 30)


def scenario_points(name: str, protocol="AODV", seed=1, runs=5) -> list:
    """Every x-axis point of a named desk scenario."""
    if name == "scenario1":
        return [scenario1(protocol, seed, runs)]
    if name == "scenario2":
        return [scenario2(p, protocol, seed, runs) for p in SCENARIO2_PAUSES]
    if name == "scenario3":
        return [scenario3(n, protocol, seed, runs) for n in SCENARIO3_NODES]
    raise ConfigError(f"unknown scenario {name!r}")


def _coerce(raw: str, kind):
    if kind in (bool, "bool"):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind in (int, "int"):
        return int(raw)
    if kind in (float, "float"):
        return float(raw)
    return raw.strip()


_SCENARIO_TYPES = {"nodes": int, "flows": int, "packet_size": int, "seed": int, "runs": int,
                   "speed": float, "pause": float, "duration": float, "link_rate": float,
                   "radio_range": float, "packet_interval": float, "hop_delay": float,
                   "protocol": str, "x_axis": str}


def load_config(path) -> dict:
    """Read an INI file: one section per scenario, plus optional ``[constants.<PROTOCOL>]`` sections.

    Returns ``{"scenarios": {name: ScenarioConfig}, "constants": {Protocol: {field: value}}}``.
    A scenario section may set ``width`` and ``height`` for the area.
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    scenarios, constants = {}, {}
    const_types = ProtocolConstants.field_types()
    for section in parser.sections():
        items = dict(parser.items(section))
        try:
            if section.startswith("constants."):
                proto = Protocol.parse(section.split(".", 1)[1])
                overrides = {}
                for key, raw in items.items():
                    if key not in const_types or key == "protocol":
                        raise ConfigError(f"[{section}] unknown constant {key!r}")
                    overrides[key] = _coerce(raw, const_types[key])
                ProtocolConstants.for_protocol(proto, **overrides)
                constants[proto] = overrides
                continue
            kwargs = {}
            w = float(items.pop("width", 500.0))
            h = float(items.pop("height", 500.0))
            for key, raw in items.items():
                if key not in _SCENARIO_TYPES:
                    raise ConfigError(f"[{section}] unknown key {key!r}")
                kwargs[key] = _coerce(raw, _SCENARIO_TYPES[key])
            scenarios[section] = ScenarioConfig(section, (w, h), **kwargs)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}] {exc}") from exc
    return {"scenarios": scenarios, "constants": constants}


SCENARIO_FIELDS = tuple(f.name for f in fields(ScenarioConfig))
