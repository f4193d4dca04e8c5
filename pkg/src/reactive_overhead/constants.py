"""Protocol tags and per-protocol constants shared by the cost model and the simulator."""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace


class Protocol(str, enum.Enum):
    AODV = "AODV"
    DSR = "DSR"
    DYMO = "DYMO"

    @classmethod
    def parse(cls, value: "str | Protocol") -> "Protocol":
        if isinstance(value, Protocol):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown protocol {value!r}; expected one of AODV, DSR, DYMO") from None


@dataclass(frozen=True)
class ProtocolConstants:
    """Timers, TTL ladder and retry budget for one reactive protocol.

    The first block of fields parameterizes the analytic cost model and the
    ERS schedule. The second block only matters to the simulator.
    """

    protocol: Protocol
    ttl_start: int = 2
    ttl_increment: int = 2
    ttl_threshold: int = 7
    net_diameter: int = 35
    rreq_retries: int = 2
    nonprop_request_timeout: float = 0.030
    discovery_hop_limit: int = 255
    node_traversal_time: float = 0.040
    timeout_buffer: float = 2.0
    local_add_ttl: int = 2
    hello_interval: float = 1.0
    ps_check_time_per_node: float = 0.001

    link_layer_feedback: bool = False
    p_forward: float = 1.0
    allowed_hello_loss: int = 2
    route_lifetime: float = 10.0
    active_route_timeout: float = 3.0
    max_salvage: int = 3
    queue_cap: int = 64

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        if self.ttl_start < 1 or self.ttl_increment < 1:
            raise ValueError("ttl_start and ttl_increment must be >= 1")
        if self.ttl_threshold > self.net_diameter:
            raise ValueError(
                f"ttl_threshold ({self.ttl_threshold}) exceeds net_diameter ({self.net_diameter})"
            )
        if self.rreq_retries < 0:
            raise ValueError("rreq_retries must be >= 0")
        if self.discovery_hop_limit < 1:
            raise ValueError("discovery_hop_limit must be >= 1")
        for name in ("nonprop_request_timeout", "node_traversal_time", "timeout_buffer",
                     "hello_interval", "ps_check_time_per_node", "route_lifetime",
                     "active_route_timeout"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= self.p_forward <= 1.0:
            raise ValueError("p_forward must lie in [0, 1]")

    @classmethod
    def for_protocol(cls, protocol: "str | Protocol", link_layer_feedback: bool = False,
                     **overrides) -> "ProtocolConstants":
        """Defaults for ``protocol`` with optional field overrides.

        AODV: NET_DIAMETER 35, 2 retries after the first full-diameter ring.
        DYMO: NET_DIAMETER 10, 3 retries.
        DSR:  a non-propagating ring then DiscoveryHopLimit rings, MaxMainRexmt 2.
        """
        protocol = Protocol.parse(protocol)
        base = dict(protocol=protocol, link_layer_feedback=link_layer_feedback,
                    ttl_start=1 if link_layer_feedback else 2)
        if protocol is Protocol.DYMO:
            base.update(net_diameter=10, rreq_retries=3)
        elif protocol is Protocol.DSR:
            base.update(rreq_retries=2)
        base.update(overrides)
        return cls(**base)

    def with_overrides(self, **overrides) -> "ProtocolConstants":
        return replace(self, **overrides)

    @classmethod
    def field_types(cls) -> dict:
        return {f.name: f.type for f in fields(cls)}
