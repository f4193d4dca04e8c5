"""Control and data packets. Packets are immutable; forwarding makes a modified copy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

CONTROL_KINDS = ("RREQ", "RREP", "RERR", "HELLO")


@dataclass(frozen=True)
class Rreq:
    originator: int
    rreq_id: int
    target: int
    ttl: int
    hop_count: int = 0
    ring: int = 1
    orig_seq: int = 0
    target_seq: Optional[int] = None
    route: tuple = ()                 # DSR route record, originator first
    piggyback_rerr: tuple = ()        # DSR broken links riding on the request
    local_repair: bool = False

    kind = "RREQ"

    @property
    def size(self) -> int:
        return 24 + 4 * len(self.route) + 8 * len(self.piggyback_rerr)


@dataclass(frozen=True)
class SalvageProbe:
    """DSR salvage query handed one hop upstream; it carries the undeliverable packet."""

    data: "Data"
    broken_link: tuple
    probes: int
    n_blb: int

    kind = "RREQ"

    @property
    def size(self) -> int:
        return 16 + self.data.size

    @property
    def ttl(self) -> int:
        return 1


@dataclass(frozen=True)
class Rrep:
    originator: int
    target: int
    hop_count: int
    target_seq: int = 0
    responder: int = -1
    gratuitous: bool = False
    route: tuple = ()                 # DSR: complete route originator -> target
    position: int = 0                 # DSR: index in route of the node this copy is addressed to
    travelled: int = 0                # transmissions so far on the way back

    kind = "RREP"

    @property
    def size(self) -> int:
        return 20 + 4 * len(self.route)


@dataclass(frozen=True)
class Rerr:
    sender: int
    rerr_id: int
    unreachable: tuple = ()           # AODV/DYMO: ((dest, seq), ...)
    broken_link: Optional[tuple] = None   # DSR
    upstream: tuple = ()              # DSR: nodes that should pass the notice on

    kind = "RERR"

    @property
    def size(self) -> int:
        return 12 + 8 * len(self.unreachable)


@dataclass(frozen=True)
class Hello:
    sender: int
    seq: int = 0

    kind = "HELLO"
    size = 20


@dataclass(frozen=True)
class Data:
    uid: int
    source: int
    dest: int
    created: float
    payload_size: int = 512
    hops: int = 0
    route: tuple = ()                 # DSR source route
    position: int = 0                 # DSR: index of the current holder in ``route``
    salvaged: int = 0
    flow: int = -1

    kind = "DATA"

    @property
    def size(self) -> int:
        return self.payload_size + 4 * len(self.route)
