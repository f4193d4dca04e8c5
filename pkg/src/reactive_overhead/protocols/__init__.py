"""Protocol state machines and the network that runs them."""

from .aodv import AodvNode, DymoNode, MaintenanceRecord, RouteEntry
from .base import DiscoveryRecord, ReactiveNode
from .dsr import DsrNode, RouteCache
from .network import Network, node_class, rng_streams

__all__ = ["AodvNode", "DymoNode", "DsrNode", "RouteCache", "RouteEntry", "MaintenanceRecord",
           "DiscoveryRecord", "ReactiveNode", "Network", "node_class", "rng_streams"]
