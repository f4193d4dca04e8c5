"""Command line: ``python -m reactive_overhead {run,compare,oracle,dump-schedule}``."""

from __future__ import annotations

import argparse
import sys
from contextlib import ExitStack

from .constants import Protocol, ProtocolConstants
from .cost_model import blind_flood_cost
from .ers_schedule import build_schedule
from .harness.compare import compare_model_vs_sim, pad_profile
from .harness.config import ConfigError, load_config, scenario_points
from .harness.oracle import flooding_oracle
from .harness.output import emit_csv, emit_dat, fmt
from .harness.runner import Metrics, run_once
from .netsim import Topology, eccentricity, generate_topology, measure_profile

PROTOCOLS = [p.value for p in Protocol]


def named_topology(text: str) -> Topology:
    """``chain:N``, ``ring:N``, ``complete:N``, ``grid:RxC`` or ``random:N[:seed[:range]]`` on 400x300 m."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "chain":
            n = int(arg)
            return Topology.from_edges(n, [(i, i + 1) for i in range(n - 1)])
        if kind == "ring":
            n = int(arg)
            return Topology.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
        if kind == "complete":
            n = int(arg)
            return Topology.from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n)])
        if kind == "grid":
            r, c = (int(v) for v in arg.lower().split("x"))
            edges = [(i * c + j, i * c + j + 1) for i in range(r) for j in range(c - 1)]
            edges += [(i * c + j, (i + 1) * c + j) for i in range(r - 1) for j in range(c)]
            return Topology.from_edges(r * c, edges)
        if kind == "random":
            parts = arg.split(":")
            seed = int(parts[1]) if len(parts) > 1 else 0
            radio = float(parts[2]) if len(parts) > 2 else 250.0
            return generate_topology(int(parts[0]), 400.0, 300.0, radio, seed)
    except ValueError as exc:
        raise ConfigError(f"bad topology {text!r}: {exc}") from exc
    raise ConfigError(f"unknown topology {text!r}")


def _constants(protocol, config_constants):
    return ProtocolConstants.for_protocol(protocol, **config_constants.get(Protocol.parse(protocol), {}))


def cmd_run(args) -> int:
    loaded = load_config(args.config) if args.config else {"scenarios": {}, "constants": {}}
    protocols = [args.protocol] if args.protocol else PROTOCOLS
    results = []
    with ExitStack() as stack:
        trace = stack.enter_context(open(args.trace, "w", encoding="utf-8")) if args.trace else None
        for proto in protocols:
            if args.scenario in loaded["scenarios"]:
                base = loaded["scenarios"][args.scenario]
                points = [base.with_(protocol=proto, seed=args.seed or base.seed,
                                     runs=args.runs or base.runs)]
            else:
                points = scenario_points(args.scenario, proto, args.seed or 1, args.runs or 5)
            consts = _constants(proto, loaded["constants"])
            for cfg in points:
                runs = [run_once(cfg, cfg.seed + i, proto, consts, trace) for i in range(cfg.runs)]
                m = Metrics(cfg, runs)
                results.append(m)
                print(f"{proto}\t{cfg.name}\tx={fmt(m.mean('x'))}\trreq={fmt(m.rreq_count)}"
                      f"\tnrl={fmt(m.nrl)}\te2ed_ms={fmt(m.e2ed_mean * 1000)}", file=sys.stderr)
    if args.out:
        emit_csv(results, args.out)
    else:
        emit_csv(results, "/dev/stdout")
    if args.dat:
        emit_dat(results, args.dat)
    return 0


def cmd_compare(args) -> int:
    topo = named_topology(args.topology)
    target = args.target if args.target is not None else topo.n - 1
    report = compare_model_vs_sim(topo, args.protocol, args.source, target)
    d_f = list(report.profile.d_f)
    while d_f and d_f[-1] == 0.0:
        d_f.pop()
    outcome = f"reply at ring {report.outcome.ring}" if report.outcome.replied else "no reply"
    print(f"# {report.protocol} {args.source}->{target}: {outcome}; d_avg={fmt(report.profile.d_avg)}"
          f" d_f={[round(x, 4) for x in d_f]}")
    print("quantity\tanalytic\tsimulated\trelative_error")
    for name, a, s, e in report.rows():
        print(f"{name}\t{fmt(a)}\t{fmt(s)}\t{fmt(e)}")
    if args.out:
        emit_csv(report, args.out)
    return 0


def cmd_oracle(args) -> int:
    topo = named_topology(args.topology)
    source = None if args.source < 0 else args.source
    res = flooding_oracle(topo, source, args.p, args.trials, args.seed)
    h = eccentricity(topo, source)
    profile = pad_profile(measure_profile(topo, source, args.p), h)
    formula = blind_flood_cost(h, profile) if h >= 1 else 0.0
    print(f"oracle mean transmissions {fmt(res.mean)} +/- {fmt(res.stderr)} ({res.trials} trials)")
    print(f"relays {fmt(res.relays)}  closed form {fmt(formula)}  h={h}")
    return 0


def cmd_dump_schedule(args) -> int:
    sched = build_schedule(ProtocolConstants.for_protocol(args.protocol,
                                                          link_layer_feedback=args.link_layer_feedback))
    print(sched.table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reactive_overhead",
                                     description="Routing overhead of AODV, DSR and DYMO: models and simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a desk scenario and write per-run metrics as CSV")
    run.add_argument("--scenario", default="scenario2")
    run.add_argument("--protocol", type=str.upper, choices=PROTOCOLS)
    run.add_argument("--seed", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--out")
    run.add_argument("--dat", help="also write whitespace-separated columns for plotting")
    run.add_argument("--config", help="INI file with scenario and constants sections")
    run.add_argument("--trace", help="write one line per transmission and reception")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="one discovery on a static topology vs the cost model")
    cmp_.add_argument("--topology", default="chain:3")
    cmp_.add_argument("--protocol", type=str.upper, choices=PROTOCOLS, default="DYMO")
    cmp_.add_argument("--source", type=int, default=0)
    cmp_.add_argument("--target", type=int)
    cmp_.add_argument("--out")
    cmp_.set_defaults(func=cmd_compare)

    orc = sub.add_parser("oracle", help="Monte-Carlo blind flood vs the closed form")
    orc.add_argument("--topology", default="random:20")
    orc.add_argument("--p", type=float, default=1.0)
    orc.add_argument("--trials", type=int, default=10_000)
    orc.add_argument("--source", type=int, default=-1, help="-1 picks a random source per trial")
    orc.add_argument("--seed", type=int, default=0)
    orc.set_defaults(func=cmd_oracle)

    dump = sub.add_parser("dump-schedule", help="print the ERS ring schedule")
    dump.add_argument("--protocol", type=str.upper, choices=PROTOCOLS, default="AODV")
    dump.add_argument("--link-layer-feedback", action="store_true")
    dump.set_defaults(func=cmd_dump_schedule)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
