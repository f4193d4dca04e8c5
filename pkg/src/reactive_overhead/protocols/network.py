"""A simulated network: nodes running one protocol over the netsim radio, with mobility and CBR traffic."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..constants import Protocol, ProtocolConstants
from ..ers_schedule import build_schedule
from ..netsim import (BROADCAST, DEFAULT_HOP_DELAY, DEFAULT_LINK_RATE, EventQueue, Radio,
                      RandomWaypoint, step_mobility)
from .aodv import AodvNode, DymoNode
from .dsr import DsrNode, loop_free
from .packets import Data, Rrep, Rreq

MOBILITY_STEP = 0.1
NODE_CLASSES = {Protocol.AODV: AodvNode, Protocol.DSR: DsrNode, Protocol.DYMO: DymoNode}


def node_class(protocol):
    return NODE_CLASSES[Protocol.parse(protocol)]


def rng_streams(seed: int) -> dict:
    """Independent generators per concern, so changing one never shifts another."""
    names = ("placement", "waypoints", "traffic", "protocol")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


@dataclass
class TrafficStats:
    data_sent: int = 0
    data_delivered: int = 0
    delays: list = field(default_factory=list)
    hops: list = field(default_factory=list)
    drops: Counter = field(default_factory=Counter)
    delivered_uids: set = field(default_factory=set)


class Network:
    """Owns the event queue, topology, radio and one protocol instance per node."""

    def __init__(self, topology, protocol, constants: Optional[ProtocolConstants] = None,
                 flows=(), mobility: Optional[RandomWaypoint] = None, rng=None,
                 link_rate: float = DEFAULT_LINK_RATE, hop_delay: float = DEFAULT_HOP_DELAY,
                 trace=None, schedule=None):
        self.protocol = Protocol.parse(protocol)
        self.constants = constants or ProtocolConstants.for_protocol(self.protocol)
        self.schedule = schedule or build_schedule(self.constants)
        self.queue = EventQueue()
        self.topology = topology
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.trace = trace
        self.radio = Radio(self.queue, topology, self._deliver, self._link_failure,
                           link_rate=link_rate, hop_delay=hop_delay, trace=trace)
        self.flows = list(flows)
        self.mobility = mobility
        self._mobility_state = mobility.init_state(topology) if mobility is not None else None
        self.stats = TrafficStats()
        self.discoveries: list = []
        self.maintenance: list = []
        self.violations: list = []
        self.rreq_tx: Counter = Counter()
        self._relayed: set = set()
        self._uids = 0
        self._last_time = 0.0
        cls = node_class(self.protocol)
        self.nodes = [cls(i, self) for i in range(topology.n)]
        self.started = False

    @property
    def now(self) -> float:
        return self.queue.now

    # callbacks from nodes

    def on_transmit(self, sender: int, packet, to: int) -> None:
        ttl = getattr(packet, "ttl", 0)
        if ttl < 0:
            self.violations.append(f"t={self.now:.6f} negative ttl from {sender}: {packet!r}")
        if isinstance(packet, Rreq):
            key = (sender, packet.originator, packet.rreq_id)
            if key in self._relayed:
                self.violations.append(f"t={self.now:.6f} node {sender} sent RREQ {key[1:]} twice")
            self._relayed.add(key)
            self.rreq_tx[(packet.originator, packet.rreq_id)] += 1
        route = getattr(packet, "route", ())
        if route and not loop_free(route):
            self.violations.append(f"t={self.now:.6f} looping source route {route}")
        if isinstance(packet, (Data, Rrep)) and self.protocol is Protocol.DSR and to == BROADCAST:
            self.violations.append(f"t={self.now:.6f} unicast packet broadcast by {sender}")

    def check_route_loops(self, dest: int) -> None:
        """Follow next hops toward ``dest`` from every node; a revisit is a routing loop."""
        for start in self.nodes:
            seen = {start.id}
            node = start
            while node.id != dest:
                entry = node.route(dest)
                if entry is None:
                    break
                nxt = entry.next_hop
                if nxt in seen:
                    self.violations.append(f"t={self.now:.6f} routing loop toward {dest} via {sorted(seen)}")
                    return
                seen.add(nxt)
                node = self.nodes[nxt]

    def forward_coin(self) -> bool:
        p = self.constants.p_forward
        if p >= 1.0:
            return True
        return bool(self.rng.random() < p)

    def hello_phase(self, node_id: int) -> float:
        return float(self.rng.uniform(0.0, self.constants.hello_interval))

    def record_delivery(self, packet: Data) -> None:
        if packet.uid in self.stats.delivered_uids:
            self.violations.append(f"t={self.now:.6f} data {packet.uid} delivered twice")
            return
        self.stats.delivered_uids.add(packet.uid)
        self.stats.data_delivered += 1
        self.stats.delays.append(self.now - packet.created)
        self.stats.hops.append(packet.hops)

    def record_drop(self, reason: str) -> None:
        self.stats.drops[reason] += 1

    def install_route(self, path, seq: int = 1) -> None:
        """Seed routing state along ``path`` in both directions, as a finished discovery would."""
        path = list(path)
        if self.protocol is Protocol.DSR:
            for i, node in enumerate(path):
                if i + 1 < len(path):
                    self.nodes[node].learn(path[i:])
                if i > 0:
                    self.nodes[node].learn(path[i::-1])
            return
        src, dst = path[0], path[-1]
        for end in (src, dst):
            # entries carry ``seq`` as if the endpoints had issued it themselves
            self.nodes[end].own_seq = max(self.nodes[end].own_seq, seq)
        for i, node in enumerate(path):
            n = self.nodes[node]
            if i + 1 < len(path):
                n.update_route(dst, path[i + 1], len(path) - 1 - i, seq)
                if i > 0:
                    n.table[dst].precursors.add(path[i - 1])
            if i > 0:
                n.update_route(src, path[i - 1], i, seq)
                if i + 1 < len(path):
                    n.table[src].precursors.add(path[i + 1])

    # radio callbacks

    def _deliver(self, node: int, sender: int, packet) -> None:
        self.nodes[node].receive(sender, packet)

    def _link_failure(self, sender: int, receiver: int, packet) -> None:
        self.nodes[sender].on_link_failure(receiver, packet)

    # traffic and mobility

    def send(self, source: int, dest: int, size: int = 512, flow: int = -1) -> Data:
        """Hand one data packet to ``source`` right now."""
        self._uids += 1
        packet = Data(self._uids, source, dest, self.now, size, flow=flow)
        self.stats.data_sent += 1
        self.nodes[source].originate_data(packet)
        return packet

    def _cbr_tick(self, payload) -> None:
        k, end = payload
        flow = self.flows[k]
        self.send(flow.source, flow.destination, flow.packet_size, k)
        nxt = self.now + flow.interval
        if nxt < min(flow.stop, end):
            self.queue.schedule(nxt, "cbr", (k, end), lambda ev: self._cbr_tick(ev.payload))

    def _mobility_tick(self, end) -> None:
        step_mobility(self._mobility_state, self.topology, self.now, MOBILITY_STEP, self.mobility)
        adj = self.topology.adjacency
        if not np.array_equal(adj, adj.T):
            self.violations.append(f"t={self.now:.6f} asymmetric adjacency")
        nxt = self.now + MOBILITY_STEP
        if nxt < end:
            self.queue.schedule(nxt, "move", end, lambda ev: self._mobility_tick(ev.payload))

    # running

    def start(self, end: float) -> None:
        if self.started:
            return
        self.started = True
        for node in self.nodes:
            node.start()
        for k, flow in enumerate(self.flows):
            if flow.start < end:
                self.queue.schedule(flow.start, "cbr", (k, end), lambda ev: self._cbr_tick(ev.payload))
        if self.mobility is not None and self.mobility.max_speed > 0:
            self.queue.schedule(MOBILITY_STEP, "move", end, lambda ev: self._mobility_tick(ev.payload))

    def run(self, until: float) -> "Network":
        """Process every event up to and including time ``until``."""
        self.start(until)
        while True:
            t = self.queue.peek_time()
            if t is None or t > until:
                break
            event = self.queue.advance()
            if event.time < self._last_time:
                self.violations.append(f"clock went back from {self._last_time} to {event.time}")
            self._last_time = event.time
            if event.action is not None:
                event.action(event)
        self.queue.now = max(self.queue.now, until)
        for node in self.nodes:
            node.finish(until)
        return self

    def settle(self, limit: float = 60.0) -> "Network":
        """Run until nothing but periodic timers remain, or ``limit`` seconds pass."""
        end = self.now + limit
        self.start(end)
        while True:
            t = self.queue.peek_time()
            if t is None or t > end:
                break
            pending = [e for e in self.queue._heap if not e.cancelled and e.kind != "hello"]
            if not pending:
                break
            event = self.queue.advance()
            self._last_time = event.time
            if event.action is not None:
                event.action(event)
        return self

    # summaries

    @property
    def ledger(self) -> Counter:
        return self.radio.ledger

    def control_count(self) -> int:
        return sum(self.ledger[k] for k in ("RREQ", "RREP", "RERR", "HELLO"))
