import json


from tripack.cli import main, parse_vertex_spec, read_packing
from tripack.graph import bits, read_edge_list


def test_parse_vertex_spec():
    assert parse_vertex_spec("0-3") == bits([0, 1, 2, 3])
    assert parse_vertex_spec("1,2,5-7") == bits([1, 2, 5, 6, 7])


def test_generate_and_read_back(tmp_path):
    out = tmp_path / "g.graph"
    assert main(["generate", "--model", "bipartite", "--n", "30", "--m", "10",
                 "--out", str(out)]) == 0
    g = read_edge_list(out)
    assert g.n == 30 and g.edge_count == 200


def test_generate_gnp_seeded(tmp_path):
    o1, o2 = tmp_path / "a.graph", tmp_path / "b.graph"
    main(["generate", "--model", "gnp", "--n", "40", "--p", "0.2", "--seed", "9", "--out", str(o1)])
    main(["generate", "--model", "gnp", "--n", "40", "--p", "0.2", "--seed", "9", "--out", str(o2)])
    assert o1.read_text() == o2.read_text()


def test_generate_stable_with_parts(tmp_path):
    out = tmp_path / "s.graph"
    parts = tmp_path / "parts.json"
    assert main(["generate", "--model", "stable", "--n", "60", "--alpha", "1/3",
                 "--beta", "1/15", "--defect", "0.02", "--seed", "3",
                 "--out", str(out), "--parts-out", str(parts)]) == 0
    data = json.loads(parts.read_text())
    assert len(data["a"]) == 20 and len(data["b"]) == 40


def test_pack_and_verify_roundtrip(tmp_path):
    graph = tmp_path / "g.graph"
    packing = tmp_path / "g.packing"
    main(["generate", "--model", "complete", "--n", "12", "--out", str(graph)])
    assert main(["pack", "--graph", str(graph), "--p", "0", "--algo", "auto",
                 "--out", str(packing)]) == 0
    assert read_packing(packing).size == 4
    assert main(["verify", "packing", str(graph), str(packing)]) == 0


def test_pack_with_overlay_roundtrip(tmp_path):
    graph = tmp_path / "g.graph"
    packing = tmp_path / "g.packing"
    revealed = tmp_path / "g.revealed"
    main(["generate", "--model", "bipartite", "--n", "300", "--m", "100", "--out", str(graph)])
    assert main(["pack", "--graph", str(graph), "--p", "0.152", "--seed", "7",
                 "--algo", "auto", "--out", str(packing),
                 "--revealed-out", str(revealed)]) == 0
    # the packing uses random edges, so the base graph alone rejects it
    assert main(["verify", "packing", str(graph), str(packing)]) == 1
    assert main(["verify", "packing", str(graph), str(packing),
                 "--overlay", str(revealed)]) == 0


def test_verify_rejects_corrupt_packing(tmp_path):
    graph = tmp_path / "g.graph"
    packing = tmp_path / "bad.packing"
    main(["generate", "--model", "bipartite", "--n", "9", "--m", "3", "--out", str(graph)])
    packing.write_text("1\n0 1 2\n")  # not a triangle in K_{3,6}
    assert main(["verify", "packing", str(graph), str(packing)]) == 1


def test_verify_factor(tmp_path, capsys):
    graph = tmp_path / "g.graph"
    main(["generate", "--model", "multipartite", "--sizes", "3,3,3", "--out", str(graph)])
    assert main(["verify", "factor", str(graph)]) == 0
    assert "max packing size 3" in capsys.readouterr().out


def test_verify_regular(tmp_path):
    graph = tmp_path / "g.graph"
    main(["generate", "--model", "bipartite", "--n", "12", "--m", "6", "--out", str(graph)])
    assert main(["verify", "regular", str(graph), "--a", "0-5", "--b", "6-11",
                 "--eps", "0.3", "--d", "0.9", "--exhaustive"]) == 0
    graph2 = tmp_path / "empty.graph"
    graph2.write_text("12 0\n")
    assert main(["verify", "regular", str(graph2), "--a", "0-5", "--b", "6-11",
                 "--eps", "0.3", "--d", "0.5", "--exhaustive"]) == 1


def test_verify_stable(tmp_path):
    graph = tmp_path / "g.graph"
    main(["generate", "--model", "bipartite", "--n", "30", "--m", "10", "--out", str(graph)])
    assert main(["verify", "stable", str(graph), "--alpha", "1/3", "--beta", "0.05"]) == 0


def test_pack_cherry_with_parts(tmp_path):
    graph = tmp_path / "g.graph"
    parts = tmp_path / "parts.json"
    # complete tripartite cherry on 18 vertices
    edges = []
    u, v, w = list(range(6)), list(range(6, 12)), list(range(12, 18))
    for x in u + w:
        for y in v:
            edges.append(tuple(sorted((x, y))))
    lines = [f"{18} {len(edges)}"] + [f"{a} {b}" for a, b in sorted(edges)]
    graph.write_text("\n".join(lines) + "\n")
    parts.write_text(json.dumps({"u": u, "v": v, "w": w}))
    assert main(["pack", "--graph", str(graph), "--p", "1.0", "--algo", "cherry",
                 "--parts", str(parts), "--out", str(tmp_path / "c.packing")]) == 0
    assert read_packing(tmp_path / "c.packing").size == 6


def test_experiment_cli(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    out = tmp_path / "res.csv"
    cfgfile.write_text(json.dumps({
        "model": "complete",
        "model_params": {},
        "n_values": [15],
        "schedule": {"rule": "fixed", "C_values": [1.0]},
        "trials": 3,
        "base_seed": 1,
        "algorithm": "auto",
    }))
    assert main(["experiment", "--config", str(cfgfile), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "C,n,trials,successes,success_rate,mean_size"
    assert lines[2].startswith("1.0,15,3,3,")


def test_experiment_cli_errors_exit_nonzero(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    out = tmp_path / "res.csv"
    cfgfile.write_text(json.dumps({
        "model": "k4cx",
        "model_params": {"m": 40},
        "n_values": [2000],  # violates the divisibility precondition
        "schedule": {"rule": "fixed", "C_values": [0.1]},
        "trials": 1,
        "base_seed": 1,
    }))
    assert main(["experiment", "--config", str(cfgfile), "--out", str(out)]) == 1
