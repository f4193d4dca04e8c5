"""AODV and DYMO: next-hop routing tables, HELLO monitoring, RERRs; AODV adds
gratuitous replies and local link repair."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from ..constants import Protocol
from ..cost_model import llr_time_cost, llr_ttl
from .base import ReactiveNode
from .packets import Data, Hello, Rerr, Rrep, Rreq


@dataclass
class RouteEntry:
    dest: int
    next_hop: int
    hop_count: int
    seq: int
    expires: float
    valid: bool = True
    repairing: bool = False
    precursors: set = field(default_factory=set)
    last_used: float = float("-inf")


@dataclass
class RepairSession:
    dest: int
    started: float
    ttl: int
    min_repair_ttl: int
    hops_to_sender: int
    buffered: list = field(default_factory=list)
    timer: object = None
    rreq_id: int = 0
    record: object = None


@dataclass
class MaintenanceRecord:
    """One link break handled by a node; mirrors the fields of ``cost_model.MaintenanceEvent``."""

    protocol: str
    node: int
    time: float
    dest: int
    kind: str                         # "llr", "salvage", "rerr" or "source"
    succeeded: Optional[bool] = None
    llr_ttl: int = 0
    min_repair_ttl: int = 0
    hops_to_sender: int = 0
    probes: int = 0
    finished: Optional[float] = None


class AodvNode(ReactiveNode):
    protocol = Protocol.AODV
    gratuitous_replies = True
    local_repair = True
    hello_routes = True

    def __init__(self, node_id: int, net):
        super().__init__(node_id, net)
        self.table: dict = {}
        self.own_seq = 0
        self.repairs: dict = {}
        self.active_until = float("-inf")
        self.active_time = 0.0
        self.active_intervals = 0
        self.hellos_sent = 0
        self._rerr_ids = 0

    # routing table

    def usable(self, entry: Optional[RouteEntry]) -> bool:
        return entry is not None and entry.valid and not entry.repairing and entry.expires > self.now

    def route(self, dest: int) -> Optional[RouteEntry]:
        entry = self.table.get(dest)
        return entry if self.usable(entry) else None

    def update_route(self, dest: int, next_hop: int, hop_count: int, seq: Optional[int],
                     lifetime: Optional[float] = None) -> bool:
        """Apply the sequence-number/hop-count rule; returns True when the entry now points at ``next_hop``."""
        if dest == self.id:
            return False
        lifetime = self.now + (self.constants.route_lifetime if lifetime is None else lifetime)
        entry = self.table.get(dest)
        seq = entry.seq if seq is None and entry is not None else (seq or 0)
        if entry is None:
            self.table[dest] = RouteEntry(dest, next_hop, hop_count, seq, lifetime)
        elif seq < entry.seq:
            return False
        elif (seq > entry.seq or not self.usable(entry) or hop_count < entry.hop_count):
            if entry.repairing:
                return False
            if entry.next_hop != next_hop:
                entry.precursors = set()
            entry.next_hop, entry.hop_count, entry.seq = next_hop, hop_count, seq
            entry.expires, entry.valid = lifetime, True
        elif entry.next_hop == next_hop and hop_count == entry.hop_count:
            entry.expires = max(entry.expires, lifetime)
        else:
            return False
        self.net.check_route_loops(dest)
        return True

    def invalidate(self, entry: RouteEntry) -> None:
        if entry.valid:
            entry.valid = False
            entry.seq += 1

    # discovery

    def make_rreq(self, session, ttl: int, rreq_id: int) -> Rreq:
        self.own_seq += 1
        known = self.table.get(session.dest)
        return Rreq(self.id, rreq_id, session.dest, ttl, 0, session.ring + 1, self.own_seq,
                    known.seq if known is not None else None)

    def handle_rreq(self, sender: int, q: Rreq) -> None:
        if q.originator == self.id:
            return
        self.update_route(q.originator, sender, q.hop_count + 1, q.orig_seq)
        key = (q.originator, q.rreq_id)
        if key in self.seen_rreqs:
            return
        self.seen_rreqs.add(key)
        if q.target == self.id:
            if q.target_seq is not None and q.target_seq > self.own_seq:
                self.own_seq = q.target_seq
            self.send_rrep(sender, Rrep(q.originator, self.id, 0, self.own_seq, self.id))
            return
        if self.gratuitous_replies:
            entry = self.route(q.target)
            if (entry is not None and entry.next_hop not in (sender, q.originator)
                    and (q.target_seq is None or entry.seq >= q.target_seq)):
                entry.precursors.add(sender)
                self.send_rrep(sender, Rrep(q.originator, q.target, entry.hop_count, entry.seq,
                                            self.id, gratuitous=True))
                return
        if q.ttl - 1 >= 1 and self.net.forward_coin():
            self.transmit(replace(q, ttl=q.ttl - 1, hop_count=q.hop_count + 1))

    def send_rrep(self, to: int, rrep: Rrep) -> None:
        self.transmit(rrep, to)

    def handle_rrep(self, sender: int, r: Rrep) -> None:
        hop = r.hop_count + 1
        repair = self.repairs.get(r.target) if r.originator == self.id else None
        if repair is not None:
            self.table[r.target].repairing = False
            if self.update_route(r.target, sender, hop, r.target_seq):
                self._finish_repair(r.target, succeeded=True)
            else:
                self.table[r.target].repairing = True
            return
        installed = self.update_route(r.target, sender, hop, r.target_seq)
        entry = self.table.get(r.target)
        if r.originator == self.id:
            if not installed and not self.usable(entry):
                return
            self.complete_discovery(r.target, r.travelled + 1)
            return
        if not installed:
            return
        back = self.route(r.originator)
        if back is None:
            return
        entry.precursors.add(back.next_hop)
        back.precursors.add(sender)
        self.transmit(replace(r, hop_count=hop, travelled=r.travelled + 1), back.next_hop)

    # data

    def send_data(self, packet: Data) -> bool:
        entry = self.route(packet.dest)
        if entry is None:
            return False
        self._use(entry)
        self._mark_active()
        self.transmit(replace(packet, hops=packet.hops + 1), entry.next_hop)
        return True

    def _use(self, entry: RouteEntry) -> None:
        entry.last_used = self.now
        # silence from a next hop is measured from when we started relying on it
        self.last_heard.setdefault(entry.next_hop, self.now)
        entry.expires = max(entry.expires, self.now + self.constants.route_lifetime)

    def _mark_active(self) -> None:
        # this node is on an active route for the next ACTIVE_ROUTE_TIMEOUT seconds
        t = self.now
        art = self.constants.active_route_timeout
        if t > self.active_until:
            self.active_intervals += 1
            self.active_time += art
        else:
            self.active_time += t + art - self.active_until
        self.active_until = t + art

    def on_data_received(self, sender: int, packet: Data) -> None:
        self._mark_active()
        t = self.now
        back = self.table.get(packet.source)
        if back is not None and self.usable(back):
            back.expires = max(back.expires, t + self.constants.route_lifetime)

    def forward_data(self, sender: int, packet: Data) -> None:
        dest = packet.dest
        if dest in self.repairs:
            self.repairs[dest].buffered.append(packet)
            return
        entry = self.route(dest)
        if entry is None:
            self.net.record_drop("no-route")
            stale = self.table.get(dest)
            self._send_rerr([(dest, stale.seq if stale else 0)])
            return
        if sender >= 0:
            entry.precursors.add(sender)
        self._use(entry)
        self.transmit(replace(packet, hops=packet.hops + 1), entry.next_hop)

    # maintenance

    def on_link_failure(self, receiver: int, packet) -> None:
        if isinstance(packet, Data):
            # undo the hop counted for the transmission that failed
            packet = replace(packet, hops=max(packet.hops - 1, 0))
        self.handle_break(receiver, packet)

    def handle_break(self, neighbor: int, packet=None) -> None:
        self.last_heard.pop(neighbor, None)
        broken = [e for e in self.table.values() if e.valid and e.next_hop == neighbor]
        repair_dest = None
        if isinstance(packet, Data):
            dest = packet.dest
            if packet.source == self.id:
                self.net.maintenance.append(MaintenanceRecord(
                    self.protocol.value, self.id, self.now, dest, "source"))
                for e in broken:
                    self.invalidate(e)
                self.enqueue(packet)
                self.originate_discovery(dest, rediscovery=True)
            elif self.local_repair and (dest in self.repairs or any(e.dest == dest for e in broken)):
                repair_dest = dest
                for e in broken:
                    self.invalidate(e)
                self._start_repair(packet)
            else:
                self.net.record_drop("link-break")
                for e in broken:
                    self.invalidate(e)
                self.net.maintenance.append(MaintenanceRecord(
                    self.protocol.value, self.id, self.now, dest, "rerr"))
        else:
            for e in broken:
                self.invalidate(e)
        unreachable = [(e.dest, e.seq) for e in broken if e.dest != repair_dest and e.precursors]
        if unreachable:
            self._send_rerr(unreachable)

    def _send_rerr(self, unreachable) -> None:
        if not unreachable:
            return
        self._rerr_ids += 1
        self.transmit(Rerr(self.id, self._rerr_ids, tuple(unreachable)))

    def handle_rerr(self, sender: int, r: Rerr) -> None:
        passed_on = []
        for dest, seq in r.unreachable:
            entry = self.table.get(dest)
            if entry is None or not entry.valid or entry.next_hop != sender:
                continue
            entry.valid = False
            entry.seq = max(entry.seq, seq)
            if entry.precursors:
                passed_on.append((dest, entry.seq))
        if passed_on:
            self._send_rerr(passed_on)

    def _start_repair(self, packet: Data) -> None:
        dest = packet.dest
        repair = self.repairs.get(dest)
        if repair is not None:
            repair.buffered.append(packet)
            return
        old = self.table[dest]
        ttl = llr_ttl(old.hop_count, packet.hops, self.constants)
        repair = RepairSession(dest, self.now, ttl, old.hop_count, packet.hops, [packet])
        self.repairs[dest] = repair
        old.repairing = True
        repair.rreq_id = self.next_rreq_id()
        self.seen_rreqs.add((self.id, repair.rreq_id))
        self.own_seq += 1
        repair.record = MaintenanceRecord(self.protocol.value, self.id, self.now, dest, "llr",
                                          llr_ttl=ttl, min_repair_ttl=old.hop_count,
                                          hops_to_sender=packet.hops)
        self.net.maintenance.append(repair.record)
        self.transmit(Rreq(self.id, repair.rreq_id, dest, ttl, 0, 1, self.own_seq, old.seq,
                           local_repair=True))
        repair.timer = self.timer(llr_time_cost(ttl, self.constants), "llr-timeout",
                                  lambda d: self._finish_repair(d, succeeded=False), dest)

    def _finish_repair(self, dest: int, succeeded: bool) -> None:
        repair = self.repairs.pop(dest, None)
        if repair is None:
            return
        repair.timer.cancel()
        repair.record.succeeded = succeeded
        repair.record.finished = self.now
        entry = self.table.get(dest)
        if entry is not None:
            entry.repairing = False
        if succeeded:
            self.flush_queue(dest)
            for packet in repair.buffered:
                self.forward_data(-1, packet)
            return
        for _ in repair.buffered:
            self.net.record_drop("repair-failed")
        if entry is not None:
            entry.valid = False
            if entry.precursors:
                self._send_rerr([(dest, entry.seq)])

    # HELLO link monitoring

    def start(self) -> None:
        phase = self.net.hello_phase(self.id)
        self.timer(phase, "hello", self._hello_tick)

    def hello_active(self) -> bool:
        return self.now < self.active_until

    def _hello_tick(self, _payload=None) -> None:
        if self.hello_active():
            self.hellos_sent += 1
            self.transmit(Hello(self.id, self.own_seq))
        self.monitor_links()
        self.timer(self.constants.hello_interval, "hello", self._hello_tick)

    def monitor_links(self) -> list:
        """Declare broken every next hop of a recently used route that has gone quiet."""
        limit = self.constants.allowed_hello_loss * self.constants.hello_interval
        recent = self.now - self.constants.active_route_timeout
        suspects = {e.next_hop for e in self.table.values()
                    if self.usable(e) and e.last_used >= recent}
        broken = [v for v in sorted(suspects)
                  if self.now - self.last_heard.get(v, float("-inf")) > limit]
        for v in broken:
            self.handle_break(v)
        return broken

    def handle_hello(self, sender: int, packet: Hello) -> None:
        if self.hello_routes:
            # a HELLO doubles as a one-hop route to its sender
            life = self.constants.allowed_hello_loss * self.constants.hello_interval
            self.update_route(sender, sender, 1, packet.seq, lifetime=life)

    def finish(self, end_time: float) -> None:
        if self.active_until > end_time:
            self.active_time -= self.active_until - end_time


class DymoNode(AodvNode):
    """DYMO as characterized here: ERS discovery and RERRs, no gratuitous replies, no local repair."""

    protocol = Protocol.DYMO
    gratuitous_replies = False
    local_repair = False
    hello_routes = False
