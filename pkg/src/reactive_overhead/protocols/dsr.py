"""DSR: source routes, a path cache fed by overheard requests and forwarded packets,
cached replies, and packet salvaging after link-layer feedback."""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from ..constants import Protocol
from .aodv import MaintenanceRecord
from .base import ReactiveNode
from .packets import Data, Rerr, Rrep, Rreq, SalvageProbe


def loop_free(path) -> bool:
    return len(set(path)) == len(path)


class RouteCache:
    """Path cache: every stored path starts at the owner, and every prefix of it is a usable route."""

    def __init__(self, owner: int, capacity: int = 64):
        self.owner = owner
        self.capacity = capacity
        self.paths: dict = {}

    def __len__(self) -> int:
        return len(self.paths)

    def add(self, path, now: float) -> bool:
        path = tuple(path)
        if len(path) < 2 or path[0] != self.owner or not loop_free(path):
            return False
        for other in list(self.paths):
            if len(other) >= len(path) and other[: len(path)] == path:
                self.paths[other] = now
                return False
            if other == path[: len(other)]:
                del self.paths[other]
        self.paths[path] = now
        if len(self.paths) > self.capacity:
            oldest = min(self.paths, key=lambda p: (self.paths[p], p))
            del self.paths[oldest]
        return True

    def find(self, dest: int) -> Optional[tuple]:
        best = None
        for path, stamp in self.paths.items():
            if dest in path:
                route = path[: path.index(dest) + 1]
                key = (len(route), -stamp, route)
                if best is None or key < best[0]:
                    best = (key, route)
        return None if best is None else best[1]

    def remove_link(self, a: int, b: int) -> int:
        removed = 0
        for path in list(self.paths):
            for i in range(len(path) - 1):
                if {path[i], path[i + 1]} == {a, b}:
                    stamp = self.paths.pop(path)
                    removed += 1
                    if i >= 1:
                        self.paths.setdefault(path[: i + 1], stamp)
                    break
        return removed

    def contains_link(self, a: int, b: int) -> bool:
        return any({p[i], p[i + 1]} == {a, b} for p in self.paths for i in range(len(p) - 1))


class DsrNode(ReactiveNode):
    protocol = Protocol.DSR

    def __init__(self, node_id: int, net):
        super().__init__(node_id, net)
        self.cache = RouteCache(node_id)
        self.seen_rerrs: set = set()
        self._rerr_ids = 0

    def learn(self, path) -> None:
        self.cache.add(path, self.now)

    # discovery

    def originate_discovery(self, dest: int, piggyback: tuple = (), rediscovery: bool = False) -> None:
        # the cache is searched before any request goes out
        if dest not in self.sessions and self.cache.find(dest) is not None:
            self.flush_queue(dest)
            return
        super().originate_discovery(dest, piggyback, rediscovery)

    def make_rreq(self, session, ttl: int, rreq_id: int) -> Rreq:
        return Rreq(self.id, rreq_id, session.dest, ttl, 0, session.ring + 1,
                    route=(self.id,), piggyback_rerr=session.piggyback)

    def handle_rreq(self, sender: int, q: Rreq) -> None:
        if q.originator == self.id or self.id in q.route:
            return
        for a, b in q.piggyback_rerr:
            self.cache.remove_link(a, b)
        self.learn((self.id,) + tuple(reversed(q.route)))
        key = (q.originator, q.rreq_id)
        if key in self.seen_rreqs:
            return
        self.seen_rreqs.add(key)
        full = q.route + (self.id,)
        if q.target == self.id:
            self.send_rrep(full, gratuitous=False)
            return
        cached = self.cache.find(q.target)
        if cached is not None and not set(cached[1:]) & set(full):
            self.send_rrep(full + cached[1:], gratuitous=True)
            return
        if q.ttl - 1 >= 1 and self.net.forward_coin():
            self.transmit(replace(q, ttl=q.ttl - 1, hop_count=q.hop_count + 1, route=full))

    def send_rrep(self, route: tuple, gratuitous: bool) -> None:
        here = route.index(self.id)
        rrep = Rrep(route[0], route[-1], len(route) - 1, responder=self.id,
                    gratuitous=gratuitous, route=route, position=here - 1)
        self.transmit(rrep, route[here - 1])

    def handle_rrep(self, sender: int, r: Rrep) -> None:
        i = r.position
        if r.route[i] != self.id:
            return
        self.learn(r.route[i:])
        self.learn(tuple(reversed(r.route[: i + 1])))
        if i == 0:
            self.complete_discovery(r.target, r.travelled + 1)
            return
        self.transmit(replace(r, position=i - 1, travelled=r.travelled + 1), r.route[i - 1])

    # data

    def send_data(self, packet: Data) -> bool:
        path = self.cache.find(packet.dest)
        if path is None:
            return False
        self.transmit(replace(packet, route=path, position=1, hops=packet.hops + 1), path[1])
        return True

    def on_data_received(self, sender: int, packet: Data) -> None:
        i = packet.position
        self.learn(packet.route[i:])
        self.learn(tuple(reversed(packet.route[: i + 1])))

    def forward_data(self, sender: int, packet: Data) -> None:
        i = packet.position
        if packet.route[i] != self.id or i + 1 >= len(packet.route):
            self.net.record_drop("bad-source-route")
            return
        self.transmit(replace(packet, position=i + 1, hops=packet.hops + 1), packet.route[i + 1])

    # maintenance

    def on_link_failure(self, receiver: int, packet) -> None:
        self.cache.remove_link(self.id, receiver)
        if isinstance(packet, Data):
            held = replace(packet, position=packet.position - 1, hops=max(packet.hops - 1, 0))
            self.salvage(held, (self.id, receiver), probes=0)
        elif isinstance(packet, SalvageProbe):
            self.net.record_drop("salvage-probe-lost")

    def salvage(self, packet: Data, link: tuple, probes: int) -> None:
        """Try this node's cache for another route; otherwise hand the packet one hop upstream."""
        here = packet.position
        alt = self.cache.find(packet.dest)
        at_source = here == 0 and packet.source == self.id
        if alt is not None and at_source and probes == 0:
            # the originator simply picks another cached route
            self.net.maintenance.append(MaintenanceRecord(
                "DSR", self.id, self.now, packet.dest, "source", succeeded=True))
            self.transmit(replace(packet, route=alt, position=1, hops=packet.hops + 1), alt[1])
            return
        if alt is not None and (packet.salvaged < self.constants.max_salvage or at_source):
            self.net.maintenance.append(MaintenanceRecord(
                "DSR", self.id, self.now, packet.dest, "salvage", succeeded=True, probes=probes))
            salvaged = packet.salvaged + (0 if at_source else 1)
            self.transmit(replace(packet, route=alt, position=1, hops=packet.hops + 1,
                                  salvaged=salvaged), alt[1])
            self.send_rerr(link, packet.route[:here])
            return
        if here == 0:
            if packet.source != self.id:
                self.net.record_drop("salvage-failed")
                return
            self.net.maintenance.append(MaintenanceRecord(
                "DSR", self.id, self.now, packet.dest, "salvage", succeeded=False, probes=probes))
            self.enqueue(replace(packet, route=(), position=0))
            self.originate_discovery(packet.dest, piggyback=(link,), rediscovery=True)
            return
        if packet.salvaged >= self.constants.max_salvage:
            self.net.record_drop("salvage-limit")
            return
        back = replace(packet, position=here - 1)
        self.transmit(SalvageProbe(back, link, probes + 1, link[0]), packet.route[here - 1])

    def handle_probe(self, sender: int, probe: SalvageProbe) -> None:
        self.cache.remove_link(*probe.broken_link)
        self.timer(self.constants.ps_check_time_per_node, "ps-check",
                   lambda p: self.salvage(p.data, p.broken_link, p.probes), probe)

    def send_rerr(self, link: tuple, upstream: tuple) -> None:
        self._rerr_ids += 1
        self.seen_rerrs.add((self.id, self._rerr_ids))
        self.transmit(Rerr(self.id, self._rerr_ids, broken_link=link, upstream=tuple(upstream)))

    def handle_rerr(self, sender: int, r: Rerr) -> None:
        key = (r.sender, r.rerr_id)
        if key in self.seen_rerrs:
            return
        self.seen_rerrs.add(key)
        self.cache.remove_link(*r.broken_link)
        if self.id in r.upstream and self.id != r.upstream[0]:
            self.transmit(r)
