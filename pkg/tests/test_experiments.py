import json
import math
from dataclasses import asdict

import pytest

from tripack.experiments import (
    ExperimentConfig,
    failure_certificate,
    k4_deficit_experiment,
    matching_threshold_experiment,
    min_degree_bipartite,
    run_trial,
    scaled_probability,
    sweep,
)
from tripack.generators import complete_bipartite, gnp
from tripack.graph import Graph, bits, union
from tripack.oracle import max_triangle_packing_exact
from tripack.rng import derive


def cfg_complete(n, c_values, trials=5, rule="fixed", algorithm="auto", target=None):
    return ExperimentConfig(
        model="complete",
        model_params={},
        n_values=[n],
        rule=rule,
        c_values=c_values,
        trials=trials,
        base_seed=42,
        algorithm=algorithm,
        target=target,
    )


def test_run_trial_success_on_complete():
    cfg = cfg_complete(30, [1.0])
    rec = run_trial(cfg, 30, 1.0, 0)
    assert rec.success and rec.size == 10 and rec.error is None


def test_run_trial_failure_on_bipartite_p0():
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="fixed",
        c_values=[0.0], trials=1, base_seed=7, algorithm="auto",
    )
    rec = run_trial(cfg, 30, 0.0, 0)
    assert not rec.success and rec.size == 0 and rec.error is None


def test_run_trial_deterministic_except_duration():
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="logn_over_n",
        c_values=[2.0], trials=1, base_seed=7, algorithm="auto",
    )
    r1 = asdict(run_trial(cfg, 30, 2.0, 3))
    r2 = asdict(run_trial(cfg, 30, 2.0, 3))
    r1.pop("duration")
    r2.pop("duration")
    assert r1 == r2


def test_run_trial_greedy_failure_carries_certificate():
    # a single-reveal greedy run on the bipartite model can certify failures
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="logn_over_n",
        c_values=[0.1], trials=1, base_seed=3, algorithm="greedy",
    )
    rec = run_trial(cfg, 30, 0.1, 0)
    assert not rec.success
    fw = rec.witness["failure_certificate"]
    assert fw["isolated_in_b"] > fw["triangles_in_b"]
    assert fw["certified_impossible"]


def test_run_trial_never_fakes_success_on_error():
    cfg = ExperimentConfig(
        model="k4cx", model_params={"m": 40}, n_values=[2000], rule="fixed",
        c_values=[0.5], trials=1, base_seed=7,
    )
    rec = run_trial(cfg, 2000, 0.5, 0)  # |B| = 1540 not divisible by 80
    assert rec.error is not None and not rec.success


def test_sweep_rates_and_csv(tmp_path):
    out = tmp_path / "results.csv"
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="fixed",
        c_values=[0.0, 1.0], trials=5, base_seed=42,
    )
    rows, records = sweep(cfg, out)
    assert [r.c for r in rows] == [0.0, 1.0]
    assert rows[0].success_rate == 0.0  # p = 0 on a bipartite base
    assert rows[1].success_rate == 1.0  # p = 1 always completes
    text = out.read_text().splitlines()
    assert text[0].startswith("# rule=fixed model=bipartite")
    assert text[1] == "C,n,trials,successes,success_rate,mean_size"
    assert len(text) == 4
    assert (tmp_path / "results.json").exists()
    data = json.loads((tmp_path / "results.json").read_text())
    assert len(data) == 10


def test_sweep_parallel_workers_match_sequential(tmp_path, monkeypatch):
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="logn_over_n",
        c_values=[2.0], trials=4, base_seed=11,
    )
    seq, par = tmp_path / "seq.csv", tmp_path / "par.csv"
    monkeypatch.setenv("TRIPACK_WORKERS", "1")
    sweep(cfg, seq)
    monkeypatch.setenv("TRIPACK_WORKERS", "2")
    sweep(cfg, par)
    assert seq.read_text() == par.read_text()


def test_sweep_deterministic_columns(tmp_path):
    cfg = ExperimentConfig(
        model="bipartite", model_params={"m": 10}, n_values=[30], rule="logn_over_n",
        c_values=[1.0, 4.0], trials=4, base_seed=11,
    )
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    sweep(cfg, out1)
    sweep(cfg, out2)
    assert out1.read_text() == out2.read_text()


def test_failure_certificate_extremes():
    g = complete_bipartite(4, 12)
    a, b = bits(range(4)), bits(range(4, 12))
    fw = failure_certificate(g, Graph.empty(12), a, b)
    assert fw.isolated_in_b == 8 and fw.triangles_in_b == 0 and fw.certified_impossible
    full_b = Graph.from_edges(12, [(u, v) for u in range(4, 12) for v in range(u + 1, 12)])
    fw = failure_certificate(g, full_b, a, b)
    assert fw.isolated_in_b == 0 and not fw.certified_impossible


def test_failure_certificate_preconditions():
    g = complete_bipartite(4, 12)
    a, b = bits(range(4)), bits(range(4, 12))
    with pytest.raises(ValueError):
        failure_certificate(g, Graph.empty(12), a, bits(range(4, 11)))  # |B| != 2|A|
    bad = union(g, Graph.from_edges(12, [(0, 1)]))
    with pytest.raises(ValueError):
        failure_certificate(bad, Graph.empty(12), a, b)  # A not independent


def test_failure_certificate_never_contradicts_oracle():
    # when the certificate fires, the exact oracle confirms no factor exists
    for a_count in (2, 3, 4):
        n = 3 * a_count
        g = complete_bipartite(a_count, n)
        a, b = bits(range(a_count)), bits(range(a_count, n))
        for seed in range(70):
            overlay = gnp(n, 0.25, derive(90, a_count, seed))
            fw = failure_certificate(g, overlay, a, b)
            if fw.certified_impossible:
                host = union(g, overlay)
                assert max_triangle_packing_exact(host).size < n // 3


def test_k4_deficit_extremes():
    out = k4_deficit_experiment(40, 2, 0.0, 3, 1)
    assert out["counts"] == [0, 0, 0]
    out = k4_deficit_experiment(40, 2, 1.0, 2, 1)
    assert all(ct >= 2 for ct in out["counts"])
    assert out["fraction_below_m"] == 0.0


def test_min_degree_bipartite_structure():
    g = min_degree_bipartite(20, 15, 3)
    assert g.min_degree() == 15 and g.max_degree() == 15
    assert g.count_edges_within(bits(range(20))) == 0


def test_matching_threshold_extremes():
    rows = matching_threshold_experiment(50, 0.75, [0.0, 1e9], 4, 5)
    assert rows[0]["perfect_rate"] == 0.0
    assert rows[1]["perfect_rate"] == 1.0
    with pytest.raises(ValueError):
        matching_threshold_experiment(50, 0.5, [1.0], 1, 0)


def test_scaled_probability_rules():
    assert scaled_probability("fixed", 0.25, 999) == 0.25
    assert scaled_probability("one_over_n", 3.0, 300) == 0.01
    assert abs(scaled_probability("logn_over_n", 2.0, 100) - 2 * math.log(100) / 100) < 1e-15


def test_config_validation():
    cfg = cfg_complete(30, [1.0])
    cfg.trials = 0
    with pytest.raises(ValueError):
        cfg.validate()
    cfg = cfg_complete(30, [-1.0])
    with pytest.raises(ValueError):
        cfg.validate()
    cfg = cfg_complete(30, [1.0])
    cfg.rule = "bogus"
    with pytest.raises(ValueError):
        cfg.validate()


def test_config_from_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "model": "bipartite",
        "model_params": {"m": 10},
        "n_values": [30],
        "schedule": {"rule": "logn_over_n", "C_values": [0.3, 8]},
        "trials": 2,
        "base_seed": 5,
        "algorithm": "auto",
    }))
    cfg = ExperimentConfig.from_json(path)
    assert cfg.c_values == [0.3, 8] and cfg.rule == "logn_over_n"
