from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reactive_overhead.constants import ProtocolConstants
from reactive_overhead.netsim import Topology, generate_topology
from reactive_overhead.protocols import Network

ALL = ["AODV", "DSR", "DYMO"]


def chain(n):
    return Topology.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid(r, c):
    edges = [(i * c + j, i * c + j + 1) for i in range(r) for j in range(c - 1)]
    edges += [(i * c + j, (i + 1) * c + j) for i in range(r - 1) for j in range(c)]
    return Topology.from_edges(r * c, edges)


def net_for(topo, proto, **kw):
    kw.setdefault("hop_delay", 0.002)
    return Network(topo, proto, **kw)


def one_packet(topo, proto, src, dst, **kw):
    net = net_for(topo, proto, **kw)
    net.send(src, dst)
    net.settle()
    return net


# hand traces

def test_dymo_three_chain_discovery():
    net = one_packet(chain(3), "DYMO", 0, 2)
    assert net.ledger["RREQ"] == 2
    assert net.ledger["RREP"] == 2
    assert net.stats.data_delivered == 1
    rec, = net.discoveries
    assert rec.reply_ring == 1 and rec.rings_sent == 1


@pytest.mark.parametrize("proto,expected", [("DYMO", 14), ("AODV", 12), ("DSR", 7)])
def test_unreachable_target_exhausts_every_ring(proto, expected):
    t = chain(3)
    t.remove(2)
    net = one_packet(t, proto, 0, 2)
    assert net.ledger["RREQ"] == expected
    assert net.stats.data_delivered == 0
    assert net.stats.drops["discovery-failed"] == 1
    assert not net.discoveries[0].succeeded


def test_aodv_gratuitous_reply_stops_the_flood():
    net = net_for(chain(4), "AODV")
    net.install_route([1, 2, 3])
    net.send(0, 3)
    net.settle()
    assert net.ledger["RREQ"] == 1 and net.ledger["RREP"] == 1
    assert net.stats.data_delivered == 1


def test_aodv_local_repair_on_grid():
    t = grid(3, 3)
    net = net_for(t, "AODV")
    net.install_route([0, 3, 6, 7, 8, 5])
    t.cut_link(7, 8)
    net.send(0, 5)
    net.settle()
    repair, = [m for m in net.maintenance if m.kind == "llr"]
    assert repair.node == 7 and repair.llr_ttl == 4 and repair.succeeded
    assert net.ledger["RREQ"] == 7
    assert net.ledger["RREP"] == 2
    assert net.ledger["DATA"] == 6
    assert net.stats.data_delivered == 1
    assert net.violations == []


def test_dsr_salvage_uses_cached_detour():
    t = Topology.from_edges(5, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 3)])
    net = net_for(t, "DSR")
    net.install_route([0, 1, 2, 3])
    net.nodes[1].learn((1, 4, 3))
    t.cut_link(1, 2)
    net.send(0, 3)
    net.settle()
    assert net.ledger["DATA"] == 4
    assert net.ledger["RERR"] == 1
    assert net.ledger["RREQ"] == 0
    assert net.discoveries == []
    assert net.stats.data_delivered == 1
    assert [m.kind for m in net.maintenance] == ["salvage"]
    assert not net.nodes[0].cache.contains_link(1, 2)


# discovery behaviour

def test_dymo_intermediate_with_route_forwards_instead_of_replying():
    net = net_for(chain(4), "DYMO")
    net.install_route([1, 2, 3])
    net.send(0, 3)
    net.settle()
    # node 1 knows the way but DYMO has no gratuitous replies, so ring 1 (0, 1) dies
    # out and ring 2 (0, 1, 2) reaches node 3
    assert net.ledger["RREQ"] == 5
    assert net.discoveries[0].reply_ring == 2
    assert net.stats.data_delivered == 1


def test_rreq_ttl_limits_flood_depth():
    t = chain(6)
    net = net_for(t, "DYMO")
    net.send(0, 5)
    net.run(0.5)
    # first ring has ttl 2: only the originator and node 1 transmit it
    first = net.discoveries[0].rreq_ids[0]
    assert net.rreq_tx[(0, first)] == 2


def test_aodv_prefers_shorter_route_with_equal_seq():
    # diamond 0-1-3 and 0-2-4-3: both replies carry the same sequence number
    t = Topology.from_edges(5, [(0, 1), (1, 3), (0, 2), (2, 4), (4, 3)])
    net = one_packet(t, "AODV", 0, 3)
    entry = net.nodes[0].route(3)
    assert entry.next_hop == 1 and entry.hop_count == 2
    assert net.nodes[0].update_route(3, 2, 3, entry.seq) is False
    assert net.nodes[0].update_route(3, 2, 1, entry.seq) is True


def test_dsr_reply_fills_cache_and_next_packet_needs_no_discovery():
    net = one_packet(chain(4), "DSR", 0, 3)
    assert net.nodes[0].cache.find(3) == (0, 1, 2, 3)
    before = net.ledger["RREQ"]
    net.send(0, 3)
    net.settle()
    assert net.ledger["RREQ"] == before
    assert net.stats.data_delivered == 2
    assert len(net.discoveries) == 1


def test_coalesced_sends_share_one_discovery():
    for proto in ALL:
        net = net_for(chain(4), proto)
        for _ in range(3):
            net.send(0, 3)
        net.settle()
        assert len(net.discoveries) == 1, proto
        assert net.stats.data_delivered == 3, proto


@pytest.mark.parametrize("proto", ALL)
def test_packet_to_self_costs_nothing(proto):
    net = one_packet(chain(3), proto, 1, 1)
    assert sum(net.ledger.values()) == 0
    assert net.stats.data_delivered == 1


def test_queue_cap_drops_oldest():
    consts = ProtocolConstants.for_protocol("DYMO", queue_cap=2)
    t = chain(3)
    t.remove(2)
    net = net_for(t, "DYMO", constants=consts)
    for _ in range(3):
        net.send(0, 2)
    assert net.stats.drops["queue-overflow"] == 1
    assert len(net.nodes[0].queues[2]) == 2


@pytest.mark.parametrize("topo", [chain(5), grid(3, 3), grid(2, 4)])
def test_gratuitous_replies_never_cost_more_requests(topo):
    def rreqs(proto):
        net = net_for(topo.copy(), proto)
        net.install_route(list(range(1, topo.n)) if topo.n == 5 else [1, 2])
        net.send(0, topo.n - 1)
        net.settle()
        return net.ledger["RREQ"]
    assert rreqs("AODV") <= rreqs("DYMO")


# HELLO messages

def test_dsr_sends_no_hellos():
    net = net_for(chain(3), "DSR")
    net.install_route([0, 1, 2])
    for k in range(20):
        net.queue.schedule(k * 0.5, "tick", None, lambda ev: net.send(0, 2))
    net.run(10.0)
    assert net.ledger["HELLO"] == 0


@pytest.mark.parametrize("proto", ["AODV", "DYMO"])
def test_idle_network_sends_no_hellos(proto):
    net = net_for(chain(4), proto)
    net.run(30.0)
    assert net.ledger["HELLO"] == 0


@pytest.mark.parametrize("proto", ["AODV", "DYMO"])
def test_hello_count_on_active_route(proto):
    net = net_for(chain(3), proto)
    net.install_route([0, 1, 2])
    # a packet every 0.5 s keeps all three nodes on an active route for 10 s
    for k in range(20):
        net.queue.schedule(k * 0.5, "tick", None, lambda ev: net.send(0, 2))
    net.run(10.0)
    interval = net.constants.hello_interval
    for node in net.nodes:
        expected = node.active_time / interval
        assert abs(node.hellos_sent - expected) <= max(node.active_intervals, 1)
    assert net.stats.data_delivered == 20


# delay

@pytest.mark.parametrize("proto", ALL)
def test_three_chain_delay_is_two_hop_latencies(proto):
    net = net_for(chain(3), proto)
    net.install_route([0, 1, 2])
    pkt = net.send(0, 2)
    net.settle()
    sent = replace(pkt, route=(0, 1, 2)) if proto == "DSR" else pkt
    per_hop = net.radio.latency(sent.size)
    assert net.stats.delays == [pytest.approx(2 * per_hop, rel=1e-9)]
    assert net.stats.hops == [2]


# properties on random static graphs

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(ALL), st.integers(4, 12))
def test_discovery_floods_terminate_and_stay_duplicate_free(seed, proto, n):
    rng = np.random.default_rng(seed)
    topo = generate_topology(n, 300, 300, 130, rng)
    net = net_for(topo, proto)
    src, dst = (int(v) for v in rng.choice(n, 2, replace=False))
    net.send(src, dst)
    net.settle(limit=120.0)
    # every request id is relayed at most once per node
    assert all(c <= n for c in net.rreq_tx.values())
    assert net.ledger["RREQ"] <= n * len(net.schedule)
    assert net.violations == []
    reachable = topo.bfs_depths(src)[dst] >= 0
    assert net.stats.data_delivered == (1 if reachable else 0)
    assert not any(node.sessions for node in net.nodes)
