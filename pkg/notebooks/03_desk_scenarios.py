"""
Three protocols under mobility
==============================

The desk scenarios, shortened so the script finishes in under half a minute.
Use ``python -m reactive_overhead run`` for the full-length runs.
"""

# %%
from reactive_overhead.harness import Metrics, run_once
from reactive_overhead.harness.config import scenario_points

PROTOCOLS = ("AODV", "DSR", "DYMO")
SEEDS = (1, 2)


def table(scenario, duration):
    print(f"\n{scenario} ({duration:.0f} s per run, seeds {SEEDS})")
    print(f"{'proto':6s} {'x':>6s} {'rreq':>8s} {'nrl':>7s} {'e2ed ms':>8s} {'pdr':>6s}")
    for proto in PROTOCOLS:
        for cfg in scenario_points(scenario, proto):
            cfg = cfg.with_(duration=duration)
            m = Metrics(cfg, [run_once(cfg, s) for s in SEEDS])
            pdr = m.mean("data_delivered") / max(m.mean("data_sent"), 1)
            print(f"{proto:6s} {m.mean('x'):6.2f} {m.rreq_count:8.1f} {m.nrl:7.3f} "
                  f"{m.e2ed_mean * 1000:8.2f} {pdr:6.3f}")


# %%
# Scenario 1: slow nodes in a small field. The x column is the mean route length.
table("scenario1", 30.0)

# %%
# Scenario 2: faster nodes, x is the pause time. Runs here are shorter than
# the longest pauses, so the 60 s and 120 s rows describe the same static network.
table("scenario2", 40.0)

# %%
# Scenario 3: the number of nodes grows, x is the node count.
table("scenario3", 40.0)
