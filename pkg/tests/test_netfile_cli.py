import io
import json

import numpy as np
import pytest

from rcw.cli import main
from rcw.exceptions import ConfigError
from rcw.netfile import dump_network, load_network, network_from_description, parse_network
from rcw.topology import GridSpec, RingNetwork, build_grid

RINGS = """\
# three rings, uniform links
type = uniform_rings
ring_sizes = 1 4 8
delta = 4 2
gamma = 1 1
"""


def test_parse_header_and_sections():
    header, edges, weights = parse_network(
        "type = edge_list\nsource = 2\n[edges]\n0 1\n1 2  # trailing\n[weights]\n1 2.5\n")
    assert header == {"type": "edge_list", "source": "2"}
    assert edges == [(0, 1), (1, 2)]
    assert weights == {1: 2.5}


@pytest.mark.parametrize("text", ["radius = 3\n", "type = blob\n", "type = grid\n[nodes]\n",
                                  "type = edge_list\n[edges]\n0\n", "type grid\n"])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        network_from_description(*parse_network(text))


def test_uniform_rings_file(tmp_path):
    path = tmp_path / "r.net"
    path.write_text(RINGS)
    net = load_network(path)
    assert isinstance(net, RingNetwork)
    assert net.ring_sizes.tolist() == [1, 4, 8]


def test_dump_round_trip():
    grid = build_grid(GridSpec(3)).to_network()
    grid = grid.with_weights(np.arange(1, grid.n_nodes + 1, dtype=float))
    fh = io.StringIO()
    dump_network(grid, fh)
    back = network_from_description(*parse_network(fh.getvalue()))
    assert sorted(back.edges()) == sorted(grid.edges())
    assert np.array_equal(back.weights, grid.weights)


def _run(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_grid_csv_rows(capsys):
    code, out, err = _run(capsys, "grid", "--radius", 10, "--samples", 20000)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 222
    assert json.loads(err)["samples"] == 20000


def test_cli_deterministic(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"g{i}.csv"
        assert main(["grid", "--radius", "6", "--dist", "pid", "--p0", "0.1",
                     "--samples", "5000", "--seed", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
        assert (tmp_path / f"g{i}.csv.summary.json").exists()
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path, capsys):
    grid = tmp_path / "g.net"
    grid.write_text("type = grid\nradius = 3\n")
    assert _run(capsys, "rings", "--net", grid)[0] == 13
    assert _run(capsys, "rings", "--net", grid, "--force", "--samples", 100)[0] == 0
    rings = tmp_path / "r.net"
    rings.write_text(RINGS)
    # uniform mass on the source cannot go through a distance-2 walk
    rings2 = tmp_path / "r2.net"
    rings2.write_text(RINGS + "delta2 = compose\n")
    assert _run(capsys, "rings", "--net", rings2, "--mode", "d2")[0] == 20
    assert _run(capsys, "rings", "--net", rings2, "--mode", "d2", "--source-stay",
                "--samples", 100)[0] == 0
    assert _run(capsys, "rings", "--net", tmp_path / "missing.net")[0] == 40
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "other"}))
    assert _run(capsys, "experiment", bad)[0] == 40


def test_tree_columns(tmp_path, capsys):
    path = tmp_path / "t.net"
    path.write_text("type = edge_list\n[edges]\n0 1\n1 2\n2 3\n[weights]\n3 2\n")
    code, out, _ = _run(capsys, "tree", "--net", path, "--samples", 1000, "--exclude-source")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "node,expected_p,empirical_p,rel_error"
    assert float(lines[1].split(",")[1]) == 0.0
    assert float(lines[4].split(",")[1]) == pytest.approx(0.5)


def test_oracle_subcommand(capsys):
    code, out, _ = _run(capsys, "oracle", "--sampler", "grid", "--radius", 4)
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert len(rows) == 41
    assert max(float(r[4]) for r in rows) < 1e-12


def test_experiment_config(tmp_path):
    (tmp_path / "r.net").write_text(RINGS)
    cfg = {"schema": "rcw-experiment/1", "network": {"file": "r.net"},
           "distribution": {"kind": "pid", "p0": 0.1}, "sampler": "rings-d1",
           "samples": 3000, "seed": 5, "output": {"csv": "out.csv", "summary": "out.json"}}
    (tmp_path / "e.json").write_text(json.dumps(cfg))
    assert main(["experiment", str(tmp_path / "e.json")]) == 0
    a = (tmp_path / "out.csv").read_bytes()
    direct = tmp_path / "direct.csv"
    assert main(["rings", "--net", str(tmp_path / "r.net"), "--dist", "pid", "--p0", "0.1",
                 "--samples", "3000", "--seed", "5", "--out", str(direct)]) == 0
    assert a == direct.read_bytes()
    assert json.loads((tmp_path / "out.json").read_text())["samples"] == 3000


def test_experiment_inline_network(tmp_path):
    cfg = {"schema": "rcw-experiment/1", "sampler": "tree",
           "network": {"type": "edge_list", "edges": [[0, 1], [1, 2]]},
           "samples": 500, "output": {"csv": "t.csv"}, "options": {"source": 1}}
    (tmp_path / "e.json").write_text(json.dumps(cfg))
    assert main(["experiment", str(tmp_path / "e.json")]) == 0
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 4
    cfg["options"] = {"mode": "d2"}
    (tmp_path / "e.json").write_text(json.dumps(cfg))
    assert main(["experiment", str(tmp_path / "e.json")]) == 40


def test_experiment_policy_file(tmp_path):
    (tmp_path / "r.net").write_text(RINGS.replace("ring_sizes = 1 4 8", "ring_sizes = 1 4 4 8")
                                    .replace("delta = 4 2", "delta = 4 1 2")
                                    .replace("gamma = 1 1", "gamma = 1 1 1") + "delta2 = compose\n")
    (tmp_path / "s.txt").write_text("0.5 1.0\n")
    cfg = {"schema": "rcw-experiment/1", "network": {"file": "r.net"},
           "distribution": {"kind": "explicit", "p": [0.0, 0.0625, 0.0625, 0.0625]},
           "sampler": "rings-d2", "samples": 2000, "output": {"csv": "o.csv"},
           "options": {"policy": "s.txt"}}
    (tmp_path / "e.json").write_text(json.dumps(cfg))
    assert main(["experiment", str(tmp_path / "e.json")]) == 0
    assert len((tmp_path / "o.csv").read_text().splitlines()) == 18
