import csv
import json

import numpy as np
import pytest

from sparseising.cli import main
from sparseising.io import read_edges, read_json, read_spins
from sparseising.metrics import model_error
from sparseising.stability import ev_bound


def rows_of(path):
    with open(path) as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


@pytest.fixture(scope="module")
def sim(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--graph", "chain", "--K", "10", "--N", "300", "--seed", "7",
                 "--out-dir", str(d)]) == 0
    return d


def test_simulate_outputs(sim, tmp_path):
    X, meta = read_spins(sim / "data.csv")
    assert X.shape == (300, 10) and set(np.unique(X)) == {-1, 1}
    assert meta["seed"] == 7 and len(meta["config_hash"]) == 16
    beta, _ = read_edges(sim / "truth.csv")
    nz = beta[beta != 0]
    assert nz.size == 9 and np.all((np.abs(nz) >= 1) & (np.abs(nz) <= 2))
    main(["simulate", "--graph", "chain", "--K", "10", "--N", "300", "--seed", "7",
          "--out-dir", str(tmp_path)])
    for name in ("data.csv", "truth.csv"):
        assert (sim / name).read_bytes() == (tmp_path / name).read_bytes()


def test_fit_lasso_report(sim, tmp_path):
    assert main(["fit", "--data", str(sim / "data.csv"), "--estimator", "lasso",
                 "--out-dir", str(tmp_path)]) == 0
    rep = read_json(tmp_path / "report.json")
    assert len(rep["diagnostics"]["bic"]) == 100
    assert rep["header"]["seed"] == 7
    beta, meta = read_edges(tmp_path / "edges.csv")
    assert np.all(np.isfinite(beta)) and meta["K"] == 10
    assert rep["n_edges"] == np.count_nonzero(beta)
    for key in ("objective", "sweeps", "kkt_residual"):
        assert key in rep["diagnostics"]
    assert rep["chosen_lambda"] in [r["lambda"] for r in rep["diagnostics"]["bic"]]


def test_fit_scad2starstar_reports_both_passes(sim, tmp_path):
    assert main(["fit", "--data", str(sim / "data.csv"), "--estimator", "scad2**",
                 "--n-lambda", "30", "--out-dir", str(tmp_path)]) == 0
    diag = read_json(tmp_path / "report.json")["diagnostics"]
    assert diag["first_pass_lambda"] > 0 and diag["second_pass_lambda"] > 0
    assert len(diag["first_pass_bic"]) == len(diag["second_pass_bic"]) == 30


def test_zero_one_equivalence(sim, tmp_path):
    X, _ = read_spins(sim / "data.csv")
    zo = tmp_path / "zo.csv"
    zo.write_text("\n".join(",".join(str((v + 1) // 2) for v in row) for row in X) + "\n")
    main(["fit", "--data", str(zo), "--zero-one", "--n-lambda", "20",
          "--out-dir", str(tmp_path / "a")])
    main(["fit", "--data", str(sim / "data.csv"), "--n-lambda", "20",
          "--out-dir", str(tmp_path / "b")])
    assert np.array_equal(read_edges(tmp_path / "a" / "edges.csv")[0],
                          read_edges(tmp_path / "b" / "edges.csv")[0])
    assert main(["fit", "--data", str(zo), "--out-dir", str(tmp_path / "c")]) == 2


def test_path_table_matches_fit(sim, tmp_path):
    out = tmp_path / "path.csv"
    assert main(["path", "--data", str(sim / "data.csv"), "--out", str(out)]) == 0
    table = rows_of(out)
    assert table[0] == ["lambda", "df", "loglik", "bic", "kkt_residual"]
    body = table[1:]
    assert len(body) == 100 and body[0][1] == "0"
    meta = json.loads(out.read_text().splitlines()[0][2:])
    bic = [float(r[3]) for r in body]
    assert meta["chosen_row"] == int(np.argmax(bic)) + 1
    main(["fit", "--data", str(sim / "data.csv"), "--out-dir", str(tmp_path)])
    chosen = read_json(tmp_path / "report.json")["chosen_lambda"]
    assert float(body[meta["chosen_row"] - 1][0]) == chosen


def test_stability_threshold_and_bound(sim, tmp_path):
    args = ["stability", "--data", str(sim / "data.csv"), "--estimator", "lasso",
            "--reps", "8", "--n-lambda", "20", "--seed", "1"]
    main(args + ["--out-dir", str(tmp_path / "a")])
    main(args + ["--pi-thr", "0.95", "--out-dir", str(tmp_path / "b")])
    a = {tuple(r[:2]) for r in rows_of(tmp_path / "a" / "stable_edges.csv")[1:]}
    b = {tuple(r[:2]) for r in rows_of(tmp_path / "b" / "stable_edges.csv")[1:]}
    assert b <= a
    rep = read_json(tmp_path / "a" / "report.json")
    assert rep["pi_thr"] == 0.9
    assert rep["ev_bound"] == ev_bound(rep["q_avg"], rep["p"], rep["pi_thr"])
    freq = rows_of(tmp_path / "a" / "frequencies.csv")[1:]
    assert len(freq) == 45
    assert rep["n_stable"] == sum(float(r[2]) > 0.9 for r in freq)


def test_evaluate_examples(sim, tmp_path):
    out = tmp_path / "m.json"
    assert main(["evaluate", "--fit", str(sim / "truth.csv"), "--truth",
                 str(sim / "truth.csv"), "--out", str(out)]) == 0
    m = read_json(out)
    assert m["mse"] == 0.0 and m["fdr"] == 0.0 and m["nde"] == 9

    zero = tmp_path / "zero.csv"
    zero.write_text('# {"K":10}\nj,k,weight\n')
    main(["evaluate", "--fit", str(zero), "--test", str(sim / "data.csv"), "--out", str(out)])
    m = read_json(out)
    assert m["me"] == pytest.approx(10 * np.log(2), abs=1e-12)
    assert "mse" not in m

    rows = tmp_path / "rows.txt"
    rows.write_text("1\n2\n5\n")
    main(["evaluate", "--fit", str(sim / "truth.csv"), "--test", str(sim / "data.csv"),
          "--rows", str(rows), "--out", str(out)])
    X, _ = read_spins(sim / "data.csv")
    beta, _ = read_edges(sim / "truth.csv")
    m = read_json(out)
    assert m["n_test"] == 3 and m["me"] == model_error(beta, X[[0, 1, 4]])


def test_exit_codes(sim, tmp_path, capsys):
    assert main(["fit", "--data", str(tmp_path / "missing.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--data", str(sim / "data.csv"), "--estimator", "ridge"])
    assert exc.value.code == 2
    assert main(["fit", "--data", str(sim / "data.csv"), "--max-sweeps", "1", "--strict",
                 "--out-dir", str(tmp_path)]) == 3
    assert main(["fit", "--data", str(sim / "data.csv"), "--max-sweeps", "1", "--n-lambda",
                 "5", "--out-dir", str(tmp_path)]) == 0
    assert main(["evaluate", "--fit", str(sim / "truth.csv"), "--rows", "x",
                 "--out", str(tmp_path / "m.json")]) == 2


def test_config_files(sim, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 6, "N": 50, "seed": 2, "out_dir": str(tmp_path / "o")}))
    dumped = tmp_path / "dump.json"
    assert main(["simulate", "--config", str(cfg), "--dump-config", str(dumped)]) == 0
    d = json.loads(dumped.read_text())
    assert d["K"] == 6 and d["burn_in"] == 1000
    again = tmp_path / "again.json"
    assert main(["simulate", "--config", str(dumped), "--dump-config", str(again)]) == 0
    assert again.read_bytes() == dumped.read_bytes()

    cfg.write_text(json.dumps({"K": 6, "bogus": 1}))
    assert main(["simulate", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"K": "six"}))
    assert main(["simulate", "--config", str(cfg)]) == 2


def test_threads_env_and_flag(sim, tmp_path, monkeypatch):
    monkeypatch.setenv("SPARSEISING_THREADS", "zero")
    assert main(["simulate", "--K", "4", "--N", "10", "--out-dir", str(tmp_path)]) == 2
    monkeypatch.setenv("SPARSEISING_THREADS", "2")
    assert main(["simulate", "--K", "4", "--N", "10", "--out-dir", str(tmp_path)]) == 0
    assert main(["simulate", "--K", "4", "--N", "10", "--threads", "0",
                 "--out-dir", str(tmp_path)]) == 2
