"""Behaviour shared by the three reactive protocols: data queues and ERS discovery sessions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..netsim import BROADCAST, SimEvent
from .packets import Data, Hello, Rerr, Rrep, Rreq, SalvageProbe


@dataclass
class DiscoverySession:
    dest: int
    started: float
    ring: int = 0                     # 0-based index into the ring schedule
    rreq_ids: list = field(default_factory=list)
    timer: Optional[SimEvent] = None
    piggyback: tuple = ()
    record: Optional["DiscoveryRecord"] = None


@dataclass
class DiscoveryRecord:
    """What one discovery session did; used to feed the analytic model."""

    originator: int
    dest: int
    started: float
    rreq_ids: list = field(default_factory=list)
    finished: Optional[float] = None
    reply_ring: Optional[int] = None
    replier_hops: list = field(default_factory=list)
    rings_sent: int = 0
    rediscovery: bool = False

    @property
    def succeeded(self) -> bool:
        return self.reply_ring is not None


class ReactiveNode:
    """One node running an on-demand protocol inside a :class:`Network`."""

    protocol = None

    def __init__(self, node_id: int, net):
        self.id = node_id
        self.net = net
        self.constants = net.constants
        self.schedule = net.schedule
        self.queues: dict = {}
        self.sessions: dict = {}
        self.completed: dict = {}
        self.seen_rreqs: set = set()
        self.last_heard: dict = {}
        self._rreq_ids = 0

    @property
    def now(self) -> float:
        return self.net.queue.now

    # plumbing

    def transmit(self, packet, to: int = BROADCAST):
        self.net.on_transmit(self.id, packet, to)
        return self.net.radio.transmit(packet, self.id, to)

    def timer(self, delay: float, kind: str, callback, payload=None) -> SimEvent:
        return self.net.queue.schedule(self.now + delay, kind, payload, lambda ev: callback(ev.payload))

    def receive(self, sender: int, packet) -> None:
        self.last_heard[sender] = self.now
        if isinstance(packet, Data):
            self.handle_data(sender, packet)
        elif isinstance(packet, Rreq):
            self.handle_rreq(sender, packet)
        elif isinstance(packet, Rrep):
            self.handle_rrep(sender, packet)
        elif isinstance(packet, Rerr):
            self.handle_rerr(sender, packet)
        elif isinstance(packet, Hello):
            self.handle_hello(sender, packet)
        elif isinstance(packet, SalvageProbe):
            self.handle_probe(sender, packet)
        else:
            raise TypeError(f"unexpected packet {packet!r}")

    def next_rreq_id(self) -> int:
        self._rreq_ids += 1
        return self._rreq_ids

    # data path

    def originate_data(self, packet: Data) -> None:
        if packet.dest == self.id:
            self.net.record_delivery(packet)
            return
        if not self.send_data(packet):
            self.enqueue(packet)
            self.originate_discovery(packet.dest)

    def enqueue(self, packet: Data) -> None:
        q = self.queues.setdefault(packet.dest, deque())
        if len(q) >= self.constants.queue_cap:
            q.popleft()
            self.net.record_drop("queue-overflow")
        q.append(packet)

    def flush_queue(self, dest: int) -> None:
        q = self.queues.get(dest)
        while q:
            packet = q.popleft()
            if not self.send_data(packet):
                q.appendleft(packet)
                if dest not in self.sessions:
                    self.originate_discovery(dest)
                break

    def drop_queue(self, dest: int, reason: str) -> None:
        q = self.queues.pop(dest, None)
        for _ in q or ():
            self.net.record_drop(reason)

    def handle_data(self, sender: int, packet: Data) -> None:
        if packet.dest == self.id:
            self.on_data_received(sender, packet)
            self.net.record_delivery(packet)
            return
        self.on_data_received(sender, packet)
        self.forward_data(sender, packet)

    def on_data_received(self, sender: int, packet: Data) -> None:
        pass

    # route discovery

    def originate_discovery(self, dest: int, piggyback: tuple = (), rediscovery: bool = False) -> None:
        session = self.sessions.get(dest)
        if session is not None:
            if piggyback:
                session.piggyback = tuple(dict.fromkeys(session.piggyback + tuple(piggyback)))
            return
        session = DiscoverySession(dest, self.now, piggyback=tuple(piggyback))
        session.record = DiscoveryRecord(self.id, dest, self.now, rediscovery=rediscovery)
        self.net.discoveries.append(session.record)
        self.sessions[dest] = session
        self._send_ring(session)

    def _send_ring(self, session: DiscoverySession) -> None:
        ttl = self.schedule.ttls[session.ring]
        rreq_id = self.next_rreq_id()
        session.rreq_ids.append(rreq_id)
        session.record.rreq_ids.append(rreq_id)
        session.record.rings_sent += 1
        self.seen_rreqs.add((self.id, rreq_id))
        self.transmit(self.make_rreq(session, ttl, rreq_id))
        session.timer = self.timer(self.schedule.timeouts[session.ring], "ring-timeout",
                                   self._on_ring_timeout, session)

    def _on_ring_timeout(self, session: DiscoverySession) -> None:
        if self.sessions.get(session.dest) is not session:
            return
        session.ring += 1
        if session.ring >= len(self.schedule):
            del self.sessions[session.dest]
            session.record.finished = self.now
            self.drop_queue(session.dest, "discovery-failed")
            return
        self._send_ring(session)

    def complete_discovery(self, dest: int, reply_path_len: int) -> None:
        session = self.sessions.pop(dest, None)
        if session is not None:
            if session.timer is not None:
                session.timer.cancel()
            session.record.finished = self.now
            session.record.reply_ring = session.ring + 1
            session.record.replier_hops.append(reply_path_len)
            self.completed[dest] = session.record
        elif dest in self.completed:
            # a later reply to the session that already succeeded
            self.completed[dest].replier_hops.append(reply_path_len)
        self.flush_queue(dest)

    # protocol hooks

    def make_rreq(self, session: DiscoverySession, ttl: int, rreq_id: int) -> Rreq:
        raise NotImplementedError

    def send_data(self, packet: Data) -> bool:
        """Send an own packet if a route exists; return False when it must wait for discovery."""
        raise NotImplementedError

    def forward_data(self, sender: int, packet: Data) -> None:
        raise NotImplementedError

    def handle_rreq(self, sender: int, packet: Rreq) -> None:
        raise NotImplementedError

    def handle_rrep(self, sender: int, packet: Rrep) -> None:
        raise NotImplementedError

    def handle_rerr(self, sender: int, packet: Rerr) -> None:
        raise NotImplementedError

    def handle_hello(self, sender: int, packet: Hello) -> None:
        pass

    def handle_probe(self, sender: int, packet: SalvageProbe) -> None:
        pass

    def on_link_failure(self, receiver: int, packet) -> None:
        raise NotImplementedError

    def start(self) -> None:
        pass

    def finish(self, end_time: float) -> None:
        pass
