"""Expanding-ring-search schedules: the ordered TTL rings, their timeouts and retry budget."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constants import Protocol, ProtocolConstants


@dataclass(frozen=True)
class RingSchedule:
    protocol: Protocol
    ttls: tuple
    timeouts: tuple
    retries_at_max: int
    max_ttl_cap: int

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        object.__setattr__(self, "ttls", tuple(int(t) for t in self.ttls))
        object.__setattr__(self, "timeouts", tuple(float(t) for t in self.timeouts))
        if not self.ttls:
            raise ValueError("a schedule needs at least one ring")
        if len(self.ttls) != len(self.timeouts):
            raise ValueError("ttls and timeouts must have the same length")
        if any(t < 1 for t in self.ttls):
            raise ValueError("ring TTLs must be >= 1")
        if any(b < a for a, b in zip(self.ttls, self.ttls[1:])):
            raise ValueError(f"ring TTLs must be non-decreasing: {self.ttls}")
        if max(self.ttls) > self.max_ttl_cap:
            raise ValueError(f"ring TTL exceeds cap {self.max_ttl_cap}")
        if any(t < 0 for t in self.timeouts):
            raise ValueError("timeouts must be >= 0")

    def __len__(self) -> int:
        return len(self.ttls)

    def table(self) -> str:
        lines = [f"# {self.protocol.value} ERS schedule (cap {self.max_ttl_cap}, "
                 f"{self.retries_at_max} retries at max)",
                 "ring\tttl\ttimeout_s"]
        for i, (ttl, timeout) in enumerate(zip(self.ttls, self.timeouts), start=1):
            lines.append(f"{i}\t{ttl}\t{timeout:.6g}")
        return "\n".join(lines)


def beb_timeout(ring_index: int, tau: float) -> float:
    """Binary exponential backoff timeout for 1-based ``ring_index``: ``2**(i-1) * tau``."""
    if ring_index < 1:
        raise ValueError(f"ring index must be >= 1, got {ring_index}")
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    return float(2 ** (ring_index - 1)) * tau


def ring_timeout(ttl: int, constants: ProtocolConstants) -> float:
    """AODV/DYMO ring traversal timeout ``2 * NODE_TRAVERSAL_TIME * (ttl + TIMEOUT_BUFFER)``."""
    return 2.0 * constants.node_traversal_time * (ttl + constants.timeout_buffer)


def _ladder(constants: ProtocolConstants) -> list:
    ttls = []
    ttl = constants.ttl_start
    while ttl <= constants.ttl_threshold:
        ttls.append(ttl)
        ttl += constants.ttl_increment
    ttls.append(constants.net_diameter)
    ttls.extend([constants.net_diameter] * constants.rreq_retries)
    return ttls


def build_schedule(constants: ProtocolConstants) -> RingSchedule:
    """Build the ring schedule a protocol walks through during one route discovery.

    AODV/DYMO climb from TTL_START by TTL_INCREMENT while at or below
    TTL_THRESHOLD, jump to NET_DIAMETER, then repeat NET_DIAMETER once per
    retry. DSR sends one non-propagating request and then propagating
    requests at DiscoveryHopLimit, with ring ``i`` waiting ``2**(i-1)`` times
    NonpropRequestTimeout.
    """
    if constants.ttl_threshold > constants.net_diameter:
        raise ValueError("ttl_threshold exceeds net_diameter")
    if constants.protocol is Protocol.DSR:
        tau = constants.nonprop_request_timeout
        cap = constants.discovery_hop_limit
        ttls = [1] + [cap] * (1 + constants.rreq_retries)
        timeouts = [beb_timeout(i, tau) for i in range(1, len(ttls) + 1)]
        return RingSchedule(Protocol.DSR, ttls, timeouts, constants.rreq_retries, cap)
    ttls = _ladder(constants)
    timeouts = [ring_timeout(t, constants) for t in ttls]
    return RingSchedule(constants.protocol, ttls, timeouts, constants.rreq_retries,
                        constants.net_diameter)


def custom_schedule(protocol, ttls: Sequence[int], constants: ProtocolConstants,
                    max_ttl_cap: int | None = None) -> RingSchedule:
    """Schedule with explicit TTLs and AODV-style ring timeouts."""
    ttls = list(ttls)
    return RingSchedule(protocol, ttls, [ring_timeout(t, constants) for t in ttls], 0,
                        max_ttl_cap if max_ttl_cap is not None else max(ttls))
