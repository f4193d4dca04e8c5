"""Analytic energy/time overhead model for AODV, DSR and DYMO.

Energy is counted in control-packet transmissions, time in seconds. Every
function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .constants import Protocol, ProtocolConstants
from .ers_schedule import RingSchedule


class ProfileMismatchError(ValueError):
    """The network profile cannot be evaluated at the requested hop count."""


class EventMismatchError(ValueError):
    """A maintenance event does not fit the protocol it is evaluated for."""


@dataclass(frozen=True)
class NetworkProfile:
    """Flooding statistics: forwarding probability, mean degree, per-hop forward degrees.

    ``d_f[0]`` is the forward degree at hop 1.
    """

    p_broadcast: float
    d_avg: float
    d_f: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "d_f", tuple(float(x) for x in self.d_f))
        if not 0.0 <= self.p_broadcast <= 1.0:
            raise ValueError(f"p_broadcast must lie in [0, 1], got {self.p_broadcast}")
        if self.d_avg < 0:
            raise ValueError(f"d_avg must be >= 0, got {self.d_avg}")
        if any(x < 0 for x in self.d_f):
            raise ValueError("forward degrees must be >= 0")

    def with_p(self, p_broadcast: float) -> "NetworkProfile":
        return NetworkProfile(p_broadcast, self.d_avg, self.d_f)


@dataclass(frozen=True)
class DiscoveryOutcome:
    """Result of one ERS discovery: the replying ring (None for no reply) and reply path lengths."""

    ring: Optional[int] = None
    replier_hop_counts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "replier_hop_counts", tuple(int(h) for h in self.replier_hop_counts))
        if self.ring is None and self.replier_hop_counts:
            raise ValueError("a NoReply outcome cannot carry repliers")
        if self.ring is not None and self.ring < 1:
            raise ValueError(f"ring index must be >= 1, got {self.ring}")
        if any(h < 1 for h in self.replier_hop_counts):
            raise ValueError("replier hop counts must be >= 1")

    @classmethod
    def no_reply(cls) -> "DiscoveryOutcome":
        return cls(None, ())

    @classmethod
    def reply_at(cls, ring: int, hops: Sequence[int] = ()) -> "DiscoveryOutcome":
        return cls(int(ring), tuple(hops))

    @property
    def replied(self) -> bool:
        return self.ring is not None

    @property
    def n_rrep(self) -> int:
        return len(self.replier_hop_counts)


@dataclass(frozen=True)
class LlrRecord:
    min_repair_ttl: int
    hops_to_sender: int
    succeeded: bool


@dataclass(frozen=True)
class PsRecord:
    nodes_checked_to_salvor: int
    nodes_checked_to_origin: int
    succeeded: bool

    def __post_init__(self):
        if self.nodes_checked_to_salvor < 0 or self.nodes_checked_to_origin < 0:
            raise ValueError("node counts must be >= 0")


@dataclass(frozen=True)
class MaintenanceEvent:
    """One link break and what each protocol did about it."""

    link_active_time: float = 0.0
    route_hop_count: int = 0
    rerr_transmissions: int = 0
    llr: Optional[LlrRecord] = None
    ps: Optional[PsRecord] = None
    rerr_receive_time: float = 0.0
    rediscovery: Optional[DiscoveryOutcome] = None

    def __post_init__(self):
        if self.link_active_time < 0 or self.route_hop_count < 0 or self.rerr_transmissions < 0:
            raise ValueError("maintenance counts and times must be >= 0")
        if self.rerr_receive_time < 0:
            raise ValueError("rerr_receive_time must be >= 0")
        if self.llr is not None and self.ps is not None:
            raise EventMismatchError("an event carries either an LLR or a PS record, not both")


@dataclass(frozen=True)
class CostBreakdown:
    e_rd: float
    e_rm: float
    t_rd: float
    t_rm: float
    e_total: float
    t_total: float
    c_total: float


def blind_flood_cost(h: int, profile: NetworkProfile) -> float:
    """Expected relay transmissions of a blind flood limited to ``h`` hops.

    ``P*d_avg`` for one hop, otherwise
    ``P*d_avg + d_avg * sum_{i=1}^{h-1} P**(i+1) * prod_{j<=i} d_f[j]``.
    """
    if h < 1:
        raise ProfileMismatchError(f"hop count must be >= 1, got {h}")
    if len(profile.d_f) < h - 1:
        raise ProfileMismatchError(
            f"profile has {len(profile.d_f)} forward degrees, {h - 1} needed for h={h}"
        )
    p = profile.p_broadcast
    cost = p * profile.d_avg
    reach = 1.0
    for i in range(1, h):
        reach *= profile.d_f[i - 1]
        cost += profile.d_avg * p ** (i + 1) * reach
    return cost


def ring_energy_cost(ttl: int, profile: NetworkProfile) -> float:
    """Cost of one ERS ring: the blind-flood cost with the hop count set to the ring TTL."""
    return blind_flood_cost(ttl, profile)


def _rings_used(schedule: RingSchedule, outcome: DiscoveryOutcome) -> int:
    if outcome.ring is None:
        return len(schedule)
    if outcome.ring > len(schedule):
        raise ValueError(f"reply at ring {outcome.ring} but schedule has {len(schedule)} rings")
    return outcome.ring


def ers_rreq_energy_cost(schedule: RingSchedule, outcome: DiscoveryOutcome,
                         profile: NetworkProfile) -> float:
    k = _rings_used(schedule, outcome)
    return sum(ring_energy_cost(ttl, profile) for ttl in schedule.ttls[:k])


def rrep_cost(hop_count: int) -> float:
    """One RREP costs one transmission per hop of the reply path."""
    return float(hop_count)


def rd_energy_cost(schedule: RingSchedule, outcome: DiscoveryOutcome,
                   profile: NetworkProfile) -> float:
    """RREQ rings plus the RREPs that came back."""
    rreq = ers_rreq_energy_cost(schedule, outcome, profile)
    return rreq + sum(rrep_cost(h) for h in outcome.replier_hop_counts)


def link_monitor_cost(event: MaintenanceEvent, constants: ProtocolConstants) -> float:
    if constants.protocol is Protocol.DSR:
        return 0.0
    if constants.hello_interval <= 0:
        raise ValueError("hello_interval must be > 0")
    return event.link_active_time / constants.hello_interval * event.route_hop_count


def llr_ttl(min_repair_ttl: int, hops_to_sender: int, constants: ProtocolConstants) -> int:
    """TTL of the local-repair ring: ``max(MIN_REPAIR_TTL, ceil(hops/2)) + LOCAL_ADD_TTL``."""
    if min_repair_ttl < 0 or hops_to_sender < 0:
        raise ValueError("llr_ttl inputs must be >= 0")
    half = math.ceil(0.5 * hops_to_sender)
    return int(max(min_repair_ttl, half) + constants.local_add_ttl)


def llr_energy_cost(llr_ttl_value: int, profile: NetworkProfile) -> float:
    return ring_energy_cost(llr_ttl_value, profile)


def _check_event(protocol: Protocol, event: MaintenanceEvent) -> None:
    if event.llr is not None and protocol is not Protocol.AODV:
        raise EventMismatchError(f"local link repair record given for {protocol.value}")
    if event.ps is not None and protocol is not Protocol.DSR:
        raise EventMismatchError(f"packet salvaging record given for {protocol.value}")


def ps_energy_cost(ps: Optional[PsRecord]) -> float:
    """Salvage probes, one per node walked: up to the salvor, or to the origin on failure."""
    if ps is None:
        return 0.0
    return float(ps.nodes_checked_to_salvor if ps.succeeded else ps.nodes_checked_to_origin)


def rm_energy_cost(protocol, event: MaintenanceEvent, profile: NetworkProfile,
                   constants: ProtocolConstants) -> float:
    protocol = Protocol.parse(protocol)
    _check_event(protocol, event)
    rerr = float(event.rerr_transmissions)
    if protocol is Protocol.DSR:
        return ps_energy_cost(event.ps) + rerr
    monitor = link_monitor_cost(event, constants.with_overrides(protocol=protocol))
    if protocol is Protocol.DYMO:
        return monitor + rerr
    llr = 0.0
    if event.llr is not None:
        ttl = llr_ttl(event.llr.min_repair_ttl, event.llr.hops_to_sender, constants)
        llr = llr_energy_cost(ttl, profile)
    return monitor + llr + rerr


def rd_time_cost_dsr(schedule: RingSchedule, outcome: DiscoveryOutcome,
                     constants: ProtocolConstants) -> float:
    tau = constants.nonprop_request_timeout
    k = _rings_used(schedule, outcome)
    return sum(2.0 ** (i - 1) * tau for i in range(1, k + 1))


def rd_time_cost_aodv_dymo(schedule: RingSchedule, outcome: DiscoveryOutcome,
                           constants: ProtocolConstants) -> float:
    tau1 = 2.0 * constants.node_traversal_time
    tau2 = constants.timeout_buffer
    k = _rings_used(schedule, outcome)
    return sum(tau1 * (ttl + tau2) for ttl in schedule.ttls[:k])


def rd_time_cost(protocol, schedule: RingSchedule, outcome: DiscoveryOutcome,
                 constants: ProtocolConstants) -> float:
    if Protocol.parse(protocol) is Protocol.DSR:
        return rd_time_cost_dsr(schedule, outcome, constants)
    return rd_time_cost_aodv_dymo(schedule, outcome, constants)


def llr_time_cost(llr_ttl_value: int, constants: ProtocolConstants) -> float:
    return 2.0 * constants.node_traversal_time * (llr_ttl_value + constants.timeout_buffer)


def rm_time_cost(protocol, event: MaintenanceEvent, schedule: Optional[RingSchedule],
                 constants: ProtocolConstants) -> float:
    """Route-maintenance time.

    AODV: repair ring (A), plus RERR travel when repair fails (B), plus a
    fresh discovery when retries remain (C). DSR: salvage walk, plus a
    fresh discovery when salvaging fails. DYMO: RERR travel, plus a fresh
    discovery unless retries are exhausted. A present ``event.rediscovery``
    selects the re-discovery branch.
    """
    protocol = Protocol.parse(protocol)
    _check_event(protocol, event)

    def rediscovery_time(fn):
        if schedule is None:
            raise ValueError("re-discovery branch needs a ring schedule")
        return fn(schedule, event.rediscovery, constants)

    if protocol is Protocol.DSR:
        if event.ps is None:
            raise EventMismatchError("DSR maintenance needs a PS record")
        per_node = constants.ps_check_time_per_node
        if event.ps.succeeded:
            return event.ps.nodes_checked_to_salvor * per_node
        if event.rediscovery is None:
            raise ValueError("failed packet salvaging needs re-discovery data")
        return event.ps.nodes_checked_to_origin * per_node + rediscovery_time(rd_time_cost_dsr)

    if protocol is Protocol.DYMO:
        if event.rediscovery is None:
            return event.rerr_receive_time
        return event.rerr_receive_time + rediscovery_time(rd_time_cost_aodv_dymo)

    if event.llr is None:
        raise EventMismatchError("AODV maintenance needs an LLR record")
    repair = llr_time_cost(llr_ttl(event.llr.min_repair_ttl, event.llr.hops_to_sender, constants),
                           constants)
    if event.llr.succeeded:
        return repair
    if event.rediscovery is None:
        return repair + event.rerr_receive_time
    return repair + event.rerr_receive_time + rediscovery_time(rd_time_cost_aodv_dymo)


def aggregate_costs(e_rd: float, e_rm: float, t_rd: float, t_rm: float) -> CostBreakdown:
    if min(e_rd, e_rm, t_rd, t_rm) < 0:
        raise ValueError("cost components must be >= 0")
    e_total = e_rd + e_rm
    t_total = t_rd + t_rm
    return CostBreakdown(e_rd, e_rm, t_rd, t_rm, e_total, t_total, e_total * t_total)


def protocol_cost(protocol, schedule: RingSchedule, outcome: DiscoveryOutcome,
                  event: Optional[MaintenanceEvent], profile: NetworkProfile,
                  constants: ProtocolConstants) -> CostBreakdown:
    """Full breakdown for one discovery plus (optionally) one maintenance event."""
    protocol = Protocol.parse(protocol)
    e_rd = rd_energy_cost(schedule, outcome, profile)
    t_rd = rd_time_cost(protocol, schedule, outcome, constants)
    if event is None:
        return aggregate_costs(e_rd, 0.0, t_rd, 0.0)
    e_rm = rm_energy_cost(protocol, event, profile, constants)
    t_rm = rm_time_cost(protocol, event, schedule, constants)
    return aggregate_costs(e_rd, e_rm, t_rd, t_rm)
