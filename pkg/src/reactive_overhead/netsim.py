"""Discrete-event substrate: clock, event queue, unit-disk topology, mobility and radio."""

from __future__ import annotations

import heapq
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .cost_model import NetworkProfile

BROADCAST = -1
DEFAULT_LINK_RATE = 2_000_000.0
DEFAULT_HOP_DELAY = 0.040


class SchedulingError(ValueError):
    """An event was scheduled before the current simulation time."""


@dataclass(order=True)
class SimEvent:
    time: float
    seq: int
    kind: str = field(compare=False)
    payload: Any = field(compare=False, default=None)
    action: Optional[Callable] = field(compare=False, default=None, repr=False)
    cancelled: bool = field(compare=False, default=False)

    def cancel(self) -> None:
        self.cancelled = True


class EventQueue:
    """Time-ordered event queue; ties break by insertion order."""

    def __init__(self):
        self._heap: list = []
        self._seq = itertools.count()
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time: float, kind: str, payload: Any = None,
                 action: Optional[Callable] = None) -> SimEvent:
        if time < self.now:
            raise SchedulingError(f"cannot schedule {kind} at t={time} before now={self.now}")
        event = SimEvent(float(time), next(self._seq), kind, payload, action)
        heapq.heappush(self._heap, event)
        return event

    def advance(self) -> Optional[SimEvent]:
        """Pop the next live event and move the clock to it; ``None`` once the queue is empty."""
        while self._heap:
            event = heapq.heappop(self._heap)
            if event.cancelled:
                continue
            self.now = event.time
            return event
        return None

    def peek_time(self) -> Optional[float]:
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0].time if self._heap else None


class Topology:
    """Node positions in a rectangle with unit-disk adjacency."""

    def __init__(self, positions, radio_range: float, area=(None, None)):
        self.positions = np.array(positions, dtype=float).reshape(-1, 2)
        self.radio_range = float(radio_range)
        w, h = area
        if w is None:
            w = float(self.positions[:, 0].max(initial=0.0))
        if h is None:
            h = float(self.positions[:, 1].max(initial=0.0))
        self.area = (float(w), float(h))
        self.present = np.ones(len(self.positions), dtype=bool)
        self.base_adjacency = None
        self.refresh()

    @property
    def n(self) -> int:
        return len(self.positions)

    def refresh(self) -> None:
        if self.base_adjacency is not None:
            adj = self.base_adjacency.copy()
        else:
            diff = self.positions[:, None, :] - self.positions[None, :, :]
            dist = np.sqrt((diff ** 2).sum(axis=-1))
            adj = dist <= self.radio_range
        np.fill_diagonal(adj, False)
        adj &= self.present[:, None] & self.present[None, :]
        self.adjacency = adj
        self._neighbors = [np.flatnonzero(row) for row in adj]

    def neighbors(self, node: int) -> np.ndarray:
        return self._neighbors[node]

    def adjacent(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a, b])

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def move(self, node: int, xy) -> None:
        self.positions[node] = xy
        self.refresh()

    def remove(self, node: int) -> None:
        """Switch a node off: it keeps its id but has no links."""
        self.present[node] = False
        self.refresh()

    def cut_link(self, a: int, b: int) -> None:
        """Remove one link for good; the graph stops following node positions."""
        if self.base_adjacency is None:
            self.base_adjacency = self.adjacency.copy()
        self.base_adjacency[a, b] = self.base_adjacency[b, a] = False
        self.refresh()

    def edges(self) -> list:
        a, b = np.nonzero(np.triu(self.adjacency))
        return list(zip(a.tolist(), b.tolist()))

    def bfs_depths(self, source: int) -> np.ndarray:
        depth = np.full(self.n, -1, dtype=int)
        depth[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self._neighbors[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    queue.append(v)
        return depth

    def copy(self) -> "Topology":
        topo = Topology(self.positions.copy(), self.radio_range, self.area)
        topo.present = self.present.copy()
        topo.base_adjacency = None if self.base_adjacency is None else self.base_adjacency.copy()
        topo.refresh()
        return topo

    @classmethod
    def from_edges(cls, n: int, edges) -> "Topology":
        """Abstract graph with the given edges (positions are placeholders)."""
        topo = cls(np.zeros((n, 2)), radio_range=0.0, area=(1.0, 1.0))
        adj = np.zeros((n, n), dtype=bool)
        for a, b in edges:
            if a != b:
                adj[a, b] = adj[b, a] = True
        topo.base_adjacency = adj
        topo.refresh()
        return topo


def generate_topology(n: int, area_w: float, area_h: float, radio_range: float,
                      seed) -> Topology:
    if n < 1:
        raise ValueError("n must be >= 1")
    if area_w <= 0 or area_h <= 0:
        raise ValueError("area dimensions must be > 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    positions = rng.uniform((0.0, 0.0), (area_w, area_h), size=(n, 2))
    return Topology(positions, radio_range, (area_w, area_h))


def _forward_degrees(counts: np.ndarray) -> list:
    # counts[j] = nodes first reached at depth j; forward degree at j = counts[j+1] / counts[j]
    max_depth = len(counts) - 1
    if max_depth < 1:
        return []
    d_f = []
    for j in range(1, max(max_depth - 1, 1) + 1):
        nxt = counts[j + 1] if j + 1 <= max_depth else 0
        d_f.append(float(nxt / counts[j]) if counts[j] else 0.0)
    return d_f


def measure_profile(topology: Topology, source: Optional[int] = None,
                    p_broadcast: float = 1.0) -> NetworkProfile:
    """Measure the flooding statistics of a topology.

    ``d_avg`` is the mean degree over present nodes. The forward degree at
    hop ``j`` is the number of nodes first reached at hop ``j+1`` per node at
    hop ``j``, i.e. the mean child count of the BFS tree. With ``source``
    given, the BFS runs from that node; with ``source=None`` the layer sizes
    are pooled over every present node as source, which is the profile of a
    flood from a uniformly random source.
    """
    present = np.flatnonzero(topology.present)
    if len(present) == 0:
        return NetworkProfile(p_broadcast, 0.0, ())
    d_avg = float(topology.degree()[present].mean())
    sources = present if source is None else [source]
    if source is not None and not topology.present[source]:
        raise ValueError(f"source {source} is not in the topology")
    totals = np.zeros(topology.n + 1)
    for s in sources:
        depth = topology.bfs_depths(int(s))
        totals += np.bincount(depth[depth >= 0], minlength=topology.n + 1)[: topology.n + 1]
    max_depth = int(np.max(np.nonzero(totals)[0]))
    return NetworkProfile(p_broadcast, d_avg, _forward_degrees(totals[: max_depth + 1]))


def eccentricity(topology: Topology, source: Optional[int] = None) -> int:
    """Deepest BFS layer from ``source`` (or from any node when ``source`` is None)."""
    sources = np.flatnonzero(topology.present) if source is None else [source]
    return max((int(topology.bfs_depths(int(s)).max()) for s in sources), default=0)


@dataclass
class MobilityState:
    targets: np.ndarray
    speeds: np.ndarray
    pause_until: np.ndarray
    min_speed: float
    max_speed: float
    pause_time: float


class RandomWaypoint:
    """Random waypoint mobility: pause, pick a uniform target and speed, walk there, repeat."""

    def __init__(self, area, min_speed: float, max_speed: float, pause_time: float, rng):
        if min_speed < 0 or max_speed < min_speed:
            raise ValueError("need 0 <= min_speed <= max_speed")
        self.area = area
        self.rng = rng
        self.min_speed = float(min_speed)
        self.max_speed = float(max_speed)
        self.pause_time = float(pause_time)

    def init_state(self, topology: Topology, start_paused: bool = True) -> MobilityState:
        n = topology.n
        state = MobilityState(
            targets=topology.positions.copy(),
            speeds=np.zeros(n),
            pause_until=np.full(n, self.pause_time if start_paused else 0.0),
            min_speed=self.min_speed,
            max_speed=self.max_speed,
            pause_time=self.pause_time,
        )
        return state

    def new_waypoint(self, state: MobilityState, node: int) -> None:
        w, h = self.area
        state.targets[node] = self.rng.uniform((0.0, 0.0), (w, h))
        state.speeds[node] = self.rng.uniform(self.min_speed, self.max_speed)


def step_mobility(state: MobilityState, topology: Topology, now: float, dt: float,
                  model: RandomWaypoint) -> np.ndarray:
    """Advance every node by ``dt`` seconds from time ``now`` and refresh adjacency."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if state.max_speed <= 0:
        return topology.positions
    pos = topology.positions
    for i in range(topology.n):
        t, end = now, now + dt
        while end - t > 1e-12:
            if state.speeds[i] <= 0:
                if state.pause_until[i] > t:
                    t = min(end, state.pause_until[i])
                    continue
                model.new_waypoint(state, i)
                if state.speeds[i] <= 0:
                    break
            delta = state.targets[i] - pos[i]
            dist = float(np.hypot(delta[0], delta[1]))
            reach = state.speeds[i] * (end - t)
            if reach >= dist:
                pos[i] = state.targets[i]
                t += dist / state.speeds[i]
                state.speeds[i] = 0.0
                state.pause_until[i] = t + state.pause_time
            else:
                pos[i] = pos[i] + delta * (reach / dist)
                t = end
    topology.refresh()
    return pos


@dataclass(frozen=True)
class CbrFlow:
    source: int
    destination: int
    packet_size: int = 512
    interval: float = 0.25
    start: float = 0.0
    stop: float = float("inf")

    def __post_init__(self):
        if self.source == self.destination:
            raise ValueError("a flow needs distinct source and destination")
        if self.interval <= 0:
            raise ValueError("interval must be > 0")


def random_flows(n_nodes: int, count: int, rng, packet_size: int = 512, interval: float = 0.25,
                 start_window=(0.0, 5.0), stop: float = float("inf")) -> list:
    """Distinct random source/destination pairs with staggered start times."""
    pairs = [(s, d) for s in range(n_nodes) for d in range(n_nodes) if s != d]
    if not pairs:
        return []
    picks = rng.permutation(len(pairs))[:count]
    flows = []
    for k in picks:
        s, d = pairs[int(k)]
        start = float(rng.uniform(*start_window))
        flows.append(CbrFlow(s, d, packet_size, interval, start, stop))
    return flows


class Radio:
    """Loss-free unit-disk channel with fixed per-hop latency.

    Latency per hop is serialization (``size * 8 / link_rate``) plus a fixed
    processing delay. Every call to :meth:`transmit` is one transmission in
    the ledger, whatever the number of receivers.
    """

    def __init__(self, queue: EventQueue, topology: Topology,
                 deliver: Callable, link_failure: Callable,
                 link_rate: float = DEFAULT_LINK_RATE, hop_delay: float = DEFAULT_HOP_DELAY,
                 trace=None):
        self.queue = queue
        self.topology = topology
        self.deliver = deliver
        self.link_failure = link_failure
        self.link_rate = float(link_rate)
        self.hop_delay = float(hop_delay)
        self.trace = trace
        self.ledger: Counter = Counter()
        self.deliveries = 0
        self._uid = itertools.count(1)

    def latency(self, size_bytes: int) -> float:
        return size_bytes * 8.0 / self.link_rate + self.hop_delay

    def transmit(self, packet, sender: int, receiver: int = BROADCAST) -> list:
        """Send ``packet`` from ``sender``; returns the scheduled delivery events."""
        now = self.queue.now
        uid = next(self._uid)
        kind = packet.kind
        self.ledger[kind] += 1
        delay = self.latency(packet.size)
        if self.trace is not None:
            self.trace.write(f"{now:.6f}\tTX-{kind}\t{sender}->{'*' if receiver == BROADCAST else receiver}\t{uid}\n")
        if receiver == BROADCAST:
            targets = self.topology.neighbors(sender).tolist()
        elif self.topology.adjacent(sender, receiver):
            targets = [receiver]
        else:
            event = self.queue.schedule(now + delay, "link-failure", (sender, receiver, packet),
                                        lambda ev: self.link_failure(*ev.payload))
            return [event]
        events = []
        for node in targets:
            events.append(self.queue.schedule(now + delay, "deliver", (node, sender, packet, uid),
                                              self._on_deliver))
        return events

    def _on_deliver(self, event: SimEvent) -> None:
        node, sender, packet, uid = event.payload
        self.deliveries += 1
        if self.trace is not None:
            self.trace.write(f"{event.time:.6f}\tRX-{packet.kind}\t{sender}->{node}\t{uid}\n")
        self.deliver(node, sender, packet)
