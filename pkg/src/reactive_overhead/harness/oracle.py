"""Monte-Carlo blind flooding, used as an independent check on the closed-form flood cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class OracleResult:
    mean: float
    stderr: float
    trials: int

    @property
    def relays(self) -> float:
        """Mean transmissions excluding the source's own broadcast."""
        return self.mean - 1.0


def flooding_oracle(topology, source: Optional[int] = 0, p_broadcast: float = 1.0,
                    trials: int = 10_000, seed=0, max_hops: Optional[int] = None) -> OracleResult:
    """Simulate ``trials`` blind floods and count every transmission, the source's included.

    The source always transmits. A node that hears the packet for the first
    time rebroadcasts it with probability ``p_broadcast``. With ``source=None``
    each trial starts at a uniformly chosen node. ``max_hops`` bounds how far
    the packet may travel (a TTL).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0.0 <= p_broadcast <= 1.0:
        raise ValueError("p_broadcast must lie in [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    present = np.flatnonzero(topology.present)
    n = topology.n
    adj = topology.adjacency.astype(np.int32)
    if source is None:
        starts = rng.choice(present, size=trials)
    else:
        starts = np.full(trials, int(source))
    # one coin per node per trial: a node only ever decides once
    forwards = rng.random((trials, n)) < p_broadcast
    rows = np.arange(trials)
    heard = np.zeros((trials, n), dtype=bool)
    heard[rows, starts] = True
    sending = np.zeros((trials, n), dtype=bool)
    sending[rows, starts] = True
    counts = np.ones(trials)
    hop = 0
    while sending.any() and (max_hops is None or hop < max_hops):
        hop += 1
        reached = (sending.astype(np.int32) @ adj) > 0
        fresh = reached & ~heard
        heard |= fresh
        if max_hops is not None and hop >= max_hops:
            break
        sending = fresh & forwards
        counts += sending.sum(axis=1)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return OracleResult(mean, stderr, trials)
