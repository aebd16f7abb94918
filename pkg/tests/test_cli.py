from __future__ import annotations

import csv
import json

import pytest

from firefly_net.cli import main, parse_family
from firefly_net.dynamics import Configuration, TruncatedOrbitError, compute_orbit
from firefly_net.export import export_trace, trace_csv, trace_dict
from firefly_net.graph import build_family


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_simulate_trace(tmp_path, capsys):
    trace = tmp_path / "out.json"
    code, out = run(capsys, "simulate", "--family", "path:2", "--n", "6", "--config", "2,5", "--trace", str(trace))
    assert code == 0
    assert json.loads(out)["sync_time"] == 13
    data = json.loads(trace.read_text())
    assert data["sync_time"] == 13 and data["b"] == 2 and data["graph"]["edges"] == [[0, 1]]
    assert data["steps"][0] == [2, 5] and data["pulls"][0] == [0, 0, 1]
    assert set(data) == {"graph", "n", "b", "steps", "transient", "period", "sync_time", "pulls", "blinks", "truncated"}


def test_simulate_is_byte_identical(tmp_path, capsys):
    outs = []
    for _ in range(2):
        _, out = run(capsys, "simulate", "--family", "complete:3", "--n", "5", "--config", "0,2,4")
        outs.append(out)
    assert outs[0] == outs[1]


def test_named_scenario_k3(capsys):
    code, out = run(capsys, "paper-examples", "k3-three-states", "--q", "2")
    data = json.loads(out)
    assert code == 0
    assert data["sync_time"] is None and data["period"] == 6


def test_named_scenario_fig8(capsys):
    code, out = run(capsys, "paper-examples", "fig8-path", "--n", "6", "--m", "8")
    data = json.loads(out)
    assert code == 0 and data["sync_time"] == 49 and data["formula"] == 60.0


@pytest.mark.parametrize("scenario", ["n7-star", "high-degree-tree"])
def test_named_scenario_counterexamples(capsys, scenario):
    code, out = run(capsys, "paper-examples", scenario)
    assert code == 0 and json.loads(out)["as_expected"]


def test_verify_tree_csv(tmp_path, capsys):
    path = tmp_path / "trees.csv"
    code, out = run(capsys, "verify-tree", "--n", "4", "--max-vertices", "6", "--csv", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 14
    assert all(r["verdict"] == "pass" for r in rows)
    assert {"tree_id", "n", "maxdeg", "verdict", "max_sync_time"} <= set(rows[0])


def test_verify_blinking_fails_outside_range(capsys):
    code, _ = run(capsys, "verify-blinking", "--family", "star:4", "--n", "7")
    assert code == 2
    code, _ = run(capsys, "verify-blinking", "--family", "path:4", "--n", "5")
    assert code == 0


def test_check_sync_expectation(capsys):
    assert run(capsys, "check-sync", "--family", "complete:3", "--n", "5", "--expect", "sync")[0] == 2
    assert run(capsys, "check-sync", "--family", "complete:3", "--n", "5", "--expect", "nonsync")[0] == 0
    code, out = run(capsys, "check-sync", "--family", "path:3", "--n", "4")
    assert code == 0 and json.loads(out)["is_n_synchronizing"]


def test_usage_errors(capsys):
    assert main(["simulate", "--n", "6", "--config", "1"]) == 1
    assert main(["simulate", "--family", "path:2", "--n", "6", "--config", "2,9"]) == 1
    assert main(["simulate", "--family", "path:2", "--n", "6", "--config", "2,5,1"]) == 1
    assert main(["verify-degree", "--family", "star:4", "--n", "4", "--vertex", "0"]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["simulate", "--family", "blob:3", "--n", "6", "--config", "1"]) == 1
    capsys.readouterr()


def test_graph_sources(tmp_path, capsys):
    edges = tmp_path / "g.txt"
    edges.write_text("0 1\n1 2\n")
    code, out = run(capsys, "simulate", "--edges", str(edges), "--n", "4", "--config", "0,1,2")
    assert code == 0
    gj = tmp_path / "g.json"
    gj.write_text(json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2]]}))
    code, out2 = run(capsys, "simulate", "--graph-json", str(gj), "--n", "4", "--config", "0,1,2")
    assert out == out2
    assert main(["simulate", "--edges", str(tmp_path / "missing"), "--n", "4", "--config", "0"]) == 1
    capsys.readouterr()


def test_parse_family_tree():
    assert parse_family("tree:0-1,1-2,1-3").degree(1) == 3


def test_mc_and_chain(capsys):
    code, out = run(capsys, "mc", "--family", "complete:3", "--n", "5", "--config", "0,2,4", "--runs", "50", "--seed", "4")
    assert code == 0 and json.loads(out)["absorbed"] == 50
    _, again = run(capsys, "mc", "--family", "complete:3", "--n", "5", "--config", "0,2,4", "--runs", "50",
                   "--seed", "4", "--jobs", "2")
    assert again == out
    code, out = run(capsys, "chain", "--family", "path:2", "--n", "3")
    assert code == 0 and json.loads(out)["state_count"] == 7


def test_other_commands(capsys, tmp_path):
    assert run(capsys, "path-bounds", "--n", "3", "--m-max", "4", "--csv", str(tmp_path / "pb.csv"))[0] == 0
    assert run(capsys, "verify-degree", "--family", "path:5", "--n", "4", "--vertex", "2")[0] == 0
    assert run(capsys, "classify", "--family", "star:2", "--n", "5", "--config", "0,1,3", "--vertex", "0")[0] == 0
    code, out = run(capsys, "irreducible", "--family", "complete:3", "--n", "5", "--config", "0,2,4")
    assert code == 0 and json.loads(out)["irreducible"]
    assert run(capsys, "quotient", "--family", "star:3", "--n", "6", "--config", "5,2,2,2")[0] == 0
    assert run(capsys, "branch-width", "--family", "tree:0-1,0-2,0-3,3-4", "--n", "8",
               "--config", "0,1,1,2,6", "--center", "0")[0] == 0
    assert run(capsys, "branch-width", "--family", "path:4", "--n", "8", "--config", "0,1,1,2",
               "--center", "3")[0] == 1
    for kind in ("high-degree-tree", "k3-three-states", "n7-star-search"):
        assert run(capsys, "counterexample", "--kind", kind)[0] == 0
    code, out = run(capsys, "gen", "--trees", "5", "--format", "edges")
    assert code == 0 and out.count("n 5") == 3
    code, out = run(capsys, "gen", "--family", "star:3", "--format", "dot")
    assert "graph" in out


def test_export_formats(tmp_path):
    g = build_family("path", 2)
    o = compute_orbit(g, Configuration(6, (2, 5)))
    rows = trace_csv(o).strip().splitlines()
    assert rows[0].startswith("t,x0,x1")
    times = [int(r.split(",")[0]) for r in rows[1:]]
    assert times[: o.sync_time + 1] == list(range(o.sync_time + 1))
    frames = export_trace(g, o, "dot_frames", tmp_path / "frames")
    assert len(frames) == len(o.trajectory)
    assert '"0:2"' in frames[0].read_text()
    with pytest.raises(ValueError):
        export_trace(g, o, "png", tmp_path / "x")


def test_export_non_sync_and_truncated(tmp_path):
    k3 = build_family("complete", 3)
    o = compute_orbit(k3, Configuration(5, (0, 2, 4)))
    assert trace_dict(k3, o)["sync_time"] is None
    path = tmp_path / "k3.json"
    export_trace(k3, o, "json", path)
    assert '"sync_time": null' in path.read_text()
    cut = compute_orbit(k3, Configuration(5, (0, 2, 4)), cap=2)
    assert trace_dict(k3, cut)["truncated"] is True
    with pytest.raises(TruncatedOrbitError):
        trace_csv(cut)
    const = compute_orbit(k3, Configuration(5, (1, 1, 1)))
    assert len(trace_csv(const).strip().splitlines()) >= 2
