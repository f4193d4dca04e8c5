import math

import numpy as np
import pytest

from reactive_overhead.cli import main, named_topology
from reactive_overhead.harness import (
    ConfigError, Metrics, ScenarioConfig, compare_model_vs_sim, emit_csv, flooding_oracle,
    load_config, run_once,
)
from reactive_overhead.harness.config import scenario_points, scenario3
from reactive_overhead.harness.output import CSV_COLUMNS
from reactive_overhead.netsim import Topology


# Monte-Carlo flooding oracle

def test_oracle_full_flood_on_chain_end():
    res = flooding_oracle(named_topology("chain:3"), 0, 1.0, trials=500)
    assert res.mean == 3.0 and res.stderr == 0.0


def test_oracle_zero_probability_only_source_sends():
    res = flooding_oracle(named_topology("chain:3"), 0, 0.0, trials=500)
    assert res.mean == 1.0 and res.relays == 0.0


def test_oracle_complete_graph():
    assert flooding_oracle(named_topology("complete:4"), 2, 1.0, trials=200).mean == 4.0


def test_oracle_stderr_shrinks_like_inverse_root():
    topo = named_topology("random:15:3")
    small = flooding_oracle(topo, 0, 0.6, trials=1_000, seed=1).stderr
    large = flooding_oracle(topo, 0, 0.6, trials=16_000, seed=1).stderr
    assert large < small
    assert small / large == pytest.approx(4.0, rel=0.25)


def test_oracle_hop_limit():
    res = flooding_oracle(named_topology("chain:6"), 0, 1.0, trials=50, max_hops=2)
    assert res.mean == 2.0


def test_oracle_rejects_bad_probability():
    with pytest.raises(ValueError):
        flooding_oracle(named_topology("chain:3"), 0, 1.5)


# model vs simulation

def test_compare_chain_shows_originator_bias():
    rep = compare_model_vs_sim(named_topology("chain:3"), "DYMO", 0, 2)
    assert rep.analytic_counts["rreq"] == pytest.approx(8 / 3, rel=1e-12)
    assert rep.simulated["rreq"] == 2.0
    assert rep.outcome.ring == 1


def test_compare_complete_graph_matches():
    rep = compare_model_vs_sim(named_topology("complete:4"), "DYMO", 0, 3)
    assert rep.analytic_counts["rreq"] == pytest.approx(3.0, rel=1e-12)
    assert rep.simulated["rreq"] == 3.0
    assert rep.relative_error["rreq"] == pytest.approx(0.0, abs=1e-12)


def test_compare_isolated_pair_is_no_reply():
    topo = Topology([(0, 0), (900, 0)], 100.0)
    rep = compare_model_vs_sim(topo, "AODV", 0, 1)
    assert not rep.outcome.replied
    assert rep.simulated["rrep"] == 0.0
    # six rings, nothing relays them
    assert rep.simulated["rreq"] == 6.0


# CSV output

def _run(runs, **kw):
    cfg = ScenarioConfig("tiny", (200.0, 200.0), 4, 0.0, 0.0, 5.0, 1, radio_range=150.0, runs=runs, **kw)
    return Metrics(cfg, [run_once(cfg, cfg.seed + i) for i in range(runs)])


def test_empty_results_write_header_only(tmp_path):
    path = emit_csv([], tmp_path / "out.csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_csv_has_one_row_per_run(tmp_path):
    runs = [_run(1).runs[0]] * 75
    lines = emit_csv(runs, tmp_path / "out.csv").read_text().splitlines()
    assert len(lines) == 76
    assert all(line.count(",") == len(CSV_COLUMNS) - 1 for line in lines)


def test_csv_reemit_is_byte_identical(tmp_path):
    a = emit_csv([_run(2)], tmp_path / "a.csv").read_bytes()
    b = emit_csv([_run(2)], tmp_path / "b.csv").read_bytes()
    assert a == b and b"\r" not in a


def test_csv_unwritable_path_raises(tmp_path):
    with pytest.raises(OSError):
        emit_csv([], tmp_path / "missing" / "out.csv")


# runs and aggregates

def test_static_pair_delivers_everything():
    cfg = ScenarioConfig("pair", (100.0, 100.0), 2, 0.0, 0.0, 10.0, 1, radio_range=200.0)
    m = run_once(cfg, 3)
    assert m.data_sent > 0
    assert m.data_delivered == m.data_sent
    assert m.rerr == 0 and m.violations == []


def test_same_seed_gives_identical_metrics():
    cfg = scenario3(5, "DYMO").with_(duration=20.0)
    assert run_once(cfg, 11) == run_once(cfg, 11)


def test_nrl_numerator_and_aggregate_mean():
    m = _run(3, protocol="AODV")
    for r in m.runs:
        assert r.control == r.rreq + r.rrep + r.rerr + r.hello
        if r.data_delivered:
            assert r.nrl == r.control / r.data_delivered
    assert m.nrl == pytest.approx(sum(r.nrl for r in m.runs) / 3, rel=1e-12)
    assert m.rreq_count == pytest.approx(sum(r.rreq for r in m.runs) / 3, rel=1e-12)


def test_nrl_is_nan_without_deliveries():
    cfg = ScenarioConfig("apart", (1000.0, 1000.0), 2, 0.0, 0.0, 5.0, 1, radio_range=1.0)
    m = run_once(cfg, 1, "DYMO")
    assert m.data_delivered == 0 and math.isnan(m.nrl)


def test_dymo_requests_grow_with_node_count():
    counts = []
    for n in (5, 10, 20, 30):
        cfg = scenario3(n, "DYMO").with_(duration=30.0)
        counts.append(np.mean([run_once(cfg, s).rreq for s in (1, 2)]))
    assert counts == sorted(counts)


def test_scenario_points():
    assert [c.pause for c in scenario_points("scenario2")] == [0.0, 30.0, 60.0, 120.0]
    assert [c.nodes for c in scenario_points("scenario3")] == [5, 10, 20, 30]
    with pytest.raises(ConfigError):
        scenario_points("scenario9")


# configuration

@pytest.mark.parametrize("kw", [dict(nodes=1), dict(duration=0.0), dict(speed=-1.0),
                                dict(protocol="OLSR"), dict(x_axis="time")])
def test_bad_scenario_values_rejected(kw):
    with pytest.raises(ValueError):
        ScenarioConfig("bad", **kw)


def test_load_config(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[tiny]\nwidth = 300\nheight = 200\nnodes = 6\nduration = 4\nprotocol = dsr\n"
                   "[constants.AODV]\nhello_interval = 2.0\n")
    loaded = load_config(ini)
    cfg = loaded["scenarios"]["tiny"]
    assert cfg.area == (300.0, 200.0) and cfg.nodes == 6 and cfg.protocol == "dsr"
    assert list(loaded["constants"].values()) == [{"hello_interval": 2.0}]


@pytest.mark.parametrize("text", ["[x]\nnodes = many\n", "[x]\ncolour = red\n",
                                  "[constants.AODV]\nwarp = 1\n", "not ini at all"])
def test_load_config_errors(tmp_path, text):
    ini = tmp_path / "bad.ini"
    ini.write_text(text)
    with pytest.raises(ConfigError):
        load_config(ini)


def test_missing_config_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/file.ini")


# command line

def test_cli_exit_codes(tmp_path, capsys):
    assert main(["dump-schedule", "--protocol", "dsr"]) == 0
    assert "255" in capsys.readouterr().out
    assert main(["run", "--scenario", "nowhere"]) == 2
    assert main(["compare", "--topology", "blob:3"]) == 2
    assert main(["oracle", "--topology", "chain:4", "--trials", "100", "--source", "0"]) == 0
    out = capsys.readouterr().out
    assert "oracle mean transmissions 4 +/- 0" in out and "h=3" in out


def test_cli_compare_writes_report(tmp_path):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--topology", "complete:4", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "quantity,analytic,simulated,relative_error"


def test_cli_run_from_config(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[tiny]\nwidth = 200\nheight = 200\nnodes = 4\nduration = 3\nflows = 1\n"
                   "speed = 0\nradio_range = 150\nruns = 1\n")
    out = tmp_path / "r.csv"
    assert main(["run", "--scenario", "tiny", "--config", str(ini), "--protocol", "dsr",
                 "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2 and rows[1].startswith("DSR,tiny,")
