"""
What a flood costs
==================

Closed-form flood cost next to a Monte-Carlo count, then the price of each
expanding-ring ladder.
"""

# %%
# A random 20-node unit-disk graph and its BFS profile, pooled over every source.
from reactive_overhead.cost_model import DiscoveryOutcome, blind_flood_cost, ers_rreq_energy_cost
from reactive_overhead.constants import ProtocolConstants
from reactive_overhead.ers_schedule import build_schedule
from reactive_overhead.harness import flooding_oracle
from reactive_overhead.harness.compare import pad_profile
from reactive_overhead.netsim import eccentricity, generate_topology, measure_profile

topo = generate_topology(20, 400.0, 300.0, 250.0, seed=3)
h = eccentricity(topo, None)
print(f"{len(topo.edges())} links, deepest layer {h}")

# %%
# The formula multiplies average degrees layer by layer. With every node
# rebroadcasting it matches exactly; with gossip it drifts, since redundant
# paths are not independent.
for p in (1.0, 0.7, 0.4):
    formula = blind_flood_cost(h, measure_profile(topo, None, p))
    mc = flooding_oracle(topo, None, p, trials=10_000, seed=1)
    print(f"p={p:.1f}  formula {formula:6.2f}   simulated {mc.relays:6.2f} +/- {mc.stderr:.2f}")

# %%
# The same on a sparser field, where floods take several hops.
sparse = generate_topology(20, 500.0, 500.0, 200.0, seed=5)
hs = eccentricity(sparse, None)
print(f"sparse graph: {len(sparse.edges())} links, deepest layer {hs}")
for p in (1.0, 0.7, 0.4):
    formula = blind_flood_cost(hs, measure_profile(sparse, None, p))
    mc = flooding_oracle(sparse, None, p, trials=10_000, seed=1)
    print(f"p={p:.1f}  formula {formula:6.2f}   simulated {mc.relays:6.2f} +/- {mc.stderr:.2f}")

# %%
# Ring ladders on the sparse graph. A reply found in an early ring saves the wide floods.
profile = measure_profile(sparse, None)
for proto in ("AODV", "DYMO", "DSR"):
    sched = build_schedule(ProtocolConstants.for_protocol(proto))
    # nothing lives past the deepest layer, so pad the profile with zeros
    prof = pad_profile(profile, max(sched.ttls))
    costs = [ers_rreq_energy_cost(sched, DiscoveryOutcome.reply_at(k), prof) for k in range(1, len(sched) + 1)]
    miss = ers_rreq_energy_cost(sched, DiscoveryOutcome.no_reply(), prof)
    print(proto, "ttls", list(sched.ttls))
    print("   cost if answered in ring k:", [round(c, 1) for c in costs], " no reply:", round(miss, 1))
