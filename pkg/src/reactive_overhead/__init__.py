"""Routing-overhead models and a packet-level simulator for reactive MANET protocols."""
