import numpy as np
import pytest

from sparseising.io import (config_hash, parse_spins, read_edges, read_graph, read_json,
                            read_rows, read_spins, write_edges, write_json, write_spins,
                            write_table)
from sparseising.simulate import chain_graph, gen_truth


def test_spins_round_trip_is_byte_identical(tmp_path, rng):
    X = rng.choice([-1, 1], size=(25, 4)).astype(np.int8)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_spins(a, X, {"seed": 3, "command": "simulate"})
    Y, meta = read_spins(a)
    assert np.array_equal(X, Y) and Y.dtype == np.int8
    write_spins(b, Y, meta)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1].count(",") == 3


def test_edges_round_trip_is_byte_identical(tmp_path):
    truth = gen_truth(chain_graph(7), 4)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_edges(a, truth.beta_star, {"seed": 4})
    beta, meta = read_edges(a)
    assert np.array_equal(beta, truth.beta_star.values)
    write_edges(b, beta, meta)
    assert a.read_bytes() == b.read_bytes()
    body = a.read_text().splitlines()
    assert body[1] == "j,k,weight"
    assert body[2].startswith("1,2,")
    assert len(body) == 2 + 6


def test_edges_keep_k_for_isolated_nodes(tmp_path):
    beta = np.zeros(10)
    beta[0] = 0.5
    write_edges(tmp_path / "e.csv", beta)
    got, meta = read_edges(tmp_path / "e.csv")
    assert meta["K"] == 5 and got.size == 10


def test_zero_one_mapping():
    lines = ["0,1,1", "1,0,0"]
    assert np.array_equal(parse_spins(lines, zero_one=True), [[-1, 1, 1], [1, -1, -1]])
    with pytest.raises(ValueError):
        parse_spins(lines)
    with pytest.raises(ValueError):
        parse_spins(["-1,1"], zero_one=True)


@pytest.mark.parametrize("lines", [["1,-1", "1"], ["1,x"], ["2,1"], [], ["1.0,1"]])
def test_malformed_spins(lines):
    with pytest.raises(ValueError):
        parse_spins(lines)


def test_malformed_edges(tmp_path):
    for text in ("j,k,weight\n2,1,0.5\n", "1,2\n", "1,b,0.1\n"):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        with pytest.raises(ValueError):
            read_edges(p)
    p.write_text("1,4,0.5\n")
    with pytest.raises(ValueError):
        read_edges(p, K=3)


def test_graph_and_rows_files(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("1 2\n2 3\n")
    assert read_graph(g, 3).edges == ((0, 1), (1, 2))
    g.write_text("3 1\n")
    with pytest.raises(ValueError):
        read_graph(g, 3)
    r = tmp_path / "rows.txt"
    r.write_text("1\n5\n")
    assert list(read_rows(r, 5)) == [0, 4]
    with pytest.raises(ValueError):
        read_rows(r, 4)


def test_json_and_table(tmp_path):
    write_json(tmp_path / "r.json", {"x": np.float64(1.5), "bad": float("nan"),
                                     "arr": np.arange(2)}, {"seed": 1})
    doc = read_json(tmp_path / "r.json")
    assert doc == {"header": {"seed": 1}, "x": 1.5, "bad": None, "arr": [0, 1]}
    write_table(tmp_path / "t.csv", ["a", "b"], [[1, 0.1]], {"seed": 2})
    assert (tmp_path / "t.csv").read_text().splitlines()[1:] == ["a,b", "1,0.1"]


def test_config_hash_is_canonical():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 16
