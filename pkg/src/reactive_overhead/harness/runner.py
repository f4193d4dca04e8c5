"""Seeded scenario runs and the metrics computed from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Optional

from ..constants import Protocol, ProtocolConstants
from ..netsim import RandomWaypoint, generate_topology, random_flows
from ..protocols import Network, rng_streams
from .config import ScenarioConfig

CONTROL = ("rreq", "rrep", "rerr", "hello")


@dataclass
class HelloCheck:
    """HELLOs one node sent against the count its active time predicts."""

    node: int
    sent: int
    active_time: float
    intervals: int
    interval: float

    @property
    def expected(self) -> float:
        return self.active_time / self.interval

    @property
    def ok(self) -> bool:
        return abs(self.sent - self.expected) <= max(self.intervals, 1)


@dataclass
class RunMetrics:
    protocol: str
    scenario: str
    x: float
    seed: int
    rreq: int = 0
    rrep: int = 0
    rerr: int = 0
    hello: int = 0
    data_sent: int = 0
    data_delivered: int = 0
    e2ed: float = float("nan")        # seconds, over delivered packets
    mean_hops: float = float("nan")
    violations: list = field(default_factory=list, repr=False)
    hello_checks: list = field(default_factory=list, repr=False)
    drops: dict = field(default_factory=dict, repr=False)

    @property
    def control(self) -> int:
        return self.rreq + self.rrep + self.rerr + self.hello

    @property
    def nrl(self) -> float:
        # undefined (NaN) when nothing got through
        if self.data_delivered == 0:
            return float("nan")
        return self.control / self.data_delivered

    @property
    def e2ed_ms(self) -> float:
        return self.e2ed * 1000.0


NUMERIC = ("rreq", "rrep", "rerr", "hello", "data_sent", "data_delivered", "e2ed", "nrl", "mean_hops")


@dataclass
class Metrics:
    """Per-run metrics for one (scenario point, protocol) and their arithmetic means."""

    config: ScenarioConfig
    runs: list

    def mean(self, name: str) -> float:
        values = [float(getattr(r, name)) for r in self.runs]
        return math.fsum(values) / len(values)

    @property
    def rreq_count(self) -> float:
        return self.mean("rreq")

    @property
    def nrl(self) -> float:
        return self.mean("nrl")

    @property
    def e2ed_mean(self) -> float:
        return self.mean("e2ed")

    def summary(self) -> dict:
        return {name: self.mean(name) for name in NUMERIC}


def build_network(config: ScenarioConfig, seed: int, protocol=None,
                  constants: Optional[ProtocolConstants] = None, trace=None) -> Network:
    protocol = Protocol.parse(protocol or config.protocol)
    streams = rng_streams(seed)
    w, h = config.area
    topology = generate_topology(config.nodes, w, h, config.radio_range, streams["placement"])
    mobility = RandomWaypoint((w, h), config.speed, config.speed, config.pause, streams["waypoints"])
    window = (0.0, min(5.0, config.duration / 4))
    flows = random_flows(config.nodes, config.flows, streams["traffic"], config.packet_size,
                         config.packet_interval, start_window=window, stop=config.duration)
    constants = constants or ProtocolConstants.for_protocol(protocol)
    return Network(topology, protocol, constants, flows, mobility, rng=streams["protocol"],
                   link_rate=config.link_rate, hop_delay=config.hop_delay, trace=trace)


def collect(net: Network, config: ScenarioConfig, seed: int) -> RunMetrics:
    ledger = net.ledger
    stats = net.stats
    delays, hops = stats.delays, stats.hops
    m = RunMetrics(net.protocol.value, config.name, config.x_value, seed,
                   rreq=ledger["RREQ"], rrep=ledger["RREP"], rerr=ledger["RERR"],
                   hello=ledger["HELLO"], data_sent=stats.data_sent,
                   data_delivered=stats.data_delivered,
                   e2ed=math.fsum(delays) / len(delays) if delays else float("nan"),
                   mean_hops=math.fsum(hops) / len(hops) if hops else float("nan"),
                   violations=list(net.violations), drops=dict(stats.drops))
    if config.x_axis == "hops":
        m.x = m.mean_hops
    if net.protocol is not Protocol.DSR:
        m.hello_checks = [HelloCheck(n.id, n.hellos_sent, n.active_time, n.active_intervals,
                                     net.constants.hello_interval) for n in net.nodes]
    return m


def run_once(config: ScenarioConfig, seed: int, protocol=None,
             constants: Optional[ProtocolConstants] = None, trace=None) -> RunMetrics:
    net = build_network(config, seed, protocol, constants, trace)
    net.run(config.duration)
    return collect(net, config, seed)


def run_scenario(config: ScenarioConfig, protocol=None, constants=None) -> Metrics:
    """``config.runs`` independent runs with seeds ``seed, seed+1, ...``."""
    runs = [run_once(config, config.seed + i, protocol, constants) for i in range(config.runs)]
    if protocol is not None:
        config = config.with_(protocol=Protocol.parse(protocol).value)
    return Metrics(config, runs)


RUN_FIELDS = tuple(f.name for f in fields(RunMetrics))
