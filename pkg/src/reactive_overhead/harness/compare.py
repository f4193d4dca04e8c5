"""Analytic discovery cost next to what one simulated discovery actually transmitted."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..constants import Protocol, ProtocolConstants
from ..cost_model import (CostBreakdown, DiscoveryOutcome, NetworkProfile, ers_rreq_energy_cost,
                          protocol_cost)
from ..ers_schedule import build_schedule
from ..netsim import DEFAULT_HOP_DELAY, Topology, measure_profile
from ..protocols import Network


def relative_error(sim: float, analytic: float) -> float:
    return abs(sim - analytic) / max(abs(analytic), 1.0)


def pad_profile(profile: NetworkProfile, h: int) -> NetworkProfile:
    """Extend the forward degrees with zeros: nothing lies beyond the deepest measured layer."""
    missing = (h - 1) - len(profile.d_f)
    if missing <= 0:
        return profile
    return replace(profile, d_f=tuple(profile.d_f) + (0.0,) * missing)


@dataclass
class ComparisonReport:
    protocol: str
    source: int
    target: int
    outcome: DiscoveryOutcome
    profile: NetworkProfile
    analytic: CostBreakdown
    analytic_counts: dict
    simulated: dict
    relative_error: dict = field(default_factory=dict)

    def rows(self) -> list:
        return [(k, self.analytic_counts[k], self.simulated[k], self.relative_error[k])
                for k in self.analytic_counts]


def compare_model_vs_sim(topology: Topology, protocol, source: int, target: int,
                         constants: ProtocolConstants = None,
                         hop_delay: float = DEFAULT_HOP_DELAY) -> ComparisonReport:
    """Run one discovery from ``source`` to ``target`` on a static topology and price it analytically.

    The profile is measured from ``source``. Simulated RREQs include the
    originator's own broadcasts, the analytic ring cost counts relays, so a
    gap of about one transmission per ring is expected.
    """
    protocol = Protocol.parse(protocol)
    constants = constants or ProtocolConstants.for_protocol(protocol)
    schedule = build_schedule(constants)
    net = Network(topology.copy(), protocol, constants, hop_delay=hop_delay)
    net.send(source, target)
    net.settle(limit=sum(schedule.timeouts) + 5.0)
    records = [r for r in net.discoveries if r.originator == source and r.dest == target]
    if records:
        rec = records[0]
        outcome = (DiscoveryOutcome.reply_at(rec.reply_ring, rec.replier_hops) if rec.succeeded
                   else DiscoveryOutcome.no_reply())
        sim_rreq = sum(net.rreq_tx[(source, i)] for i in rec.rreq_ids)
    else:
        # the route was already known: no discovery ran
        outcome = DiscoveryOutcome.reply_at(1, ())
        sim_rreq = 0
    profile = pad_profile(measure_profile(topology, source, constants.p_forward),
                          max(schedule.ttls))
    breakdown = protocol_cost(protocol, schedule, outcome, None, profile, constants)
    analytic = {"rreq": ers_rreq_energy_cost(schedule, outcome, profile),
                "rrep": float(sum(outcome.replier_hop_counts)),
                "e_rd": breakdown.e_rd}
    simulated = {"rreq": float(sim_rreq), "rrep": float(net.ledger["RREP"]),
                 "e_rd": float(sim_rreq + net.ledger["RREP"])}
    errors = {k: relative_error(simulated[k], analytic[k]) for k in analytic}
    return ComparisonReport(protocol.value, source, target, outcome, profile, breakdown,
                            analytic, simulated, errors)
