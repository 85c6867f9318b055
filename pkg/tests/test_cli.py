import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from mmreach.cli import main
from mmreach.network import Layer, Network, network_from_dict, save_network


@pytest.fixture
def toy(tmp_path):
    net = Network([Layer([[1.0]], [0.0], "relu")])
    save_network(net, tmp_path / "net.json")
    (tmp_path / "box.json").write_text(json.dumps({"lo": [-1.0], "hi": [2.0]}))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestReach:
    def test_relu_report(self, toy, capsys):
        code, out, _ = run(capsys, "reach", "--network", toy / "net.json", "--box", toy / "box.json")
        assert code == 0
        doc = json.loads(out)
        res = doc["results"]["mm"]
        assert res["output"] == {"lo": [0.0], "hi": [2.0]}
        assert res["width"] == 2.0
        assert res["eval_count"] == 2 and "elapsed" in res

    def test_both_methods_with_ratio(self, tmp_path, capsys):
        net = Network([Layer([[1.0], [-1.0]], [0.0, 0.0], "tanh"), Layer([[1.0, 1.0]], [0.0], "tanh")])
        save_network(net, tmp_path / "n.json")
        (tmp_path / "b.json").write_text(json.dumps({"center": [0.0], "eps": 0.5}))
        code, out, _ = run(capsys, "reach", "--network", tmp_path / "n.json", "--box", tmp_path / "b.json",
                           "--method", "both")
        doc = json.loads(out)
        assert code == 0 and set(doc["results"]) == {"mm", "ibp"}
        mm_w = np.subtract(doc["results"]["mm"]["output"]["hi"], doc["results"]["mm"]["output"]["lo"])
        ibp_w = np.subtract(doc["results"]["ibp"]["output"]["hi"], doc["results"]["ibp"]["output"]["lo"])
        np.testing.assert_allclose(doc["width_ratio_mm_over_ibp"], mm_w / ibp_w)
        assert doc["width_ratio_mm_over_ibp"][0] < 1

    def test_eps_override_and_keep_partial(self, toy, capsys):
        code, out, _ = run(capsys, "reach", "--network", toy / "net.json", "--box", toy / "box.json",
                           "--eps", "0", "--keep-partial")
        doc = json.loads(out)
        assert doc["input"] == {"lo": [0.5], "hi": [0.5]}
        assert doc["results"]["mm"]["per_pair"] == [{"k": 1, "l": 1, "lo": [0.5], "hi": [0.5]}]

    def test_csv_output_to_file(self, toy, capsys):
        code, _, _ = run(capsys, "ibp", "--network", toy / "net.json", "--box", toy / "box.json",
                         "--format", "csv", "--out", toy / "r.csv")
        rows = list(csv.DictReader(open(toy / "r.csv")))
        assert code == 0 and rows == [{"method": "ibp", "layer": "1", "index": "0", "lo": "0.0", "hi": "2.0"}]

    def test_malformed_network(self, toy, capsys):
        (toy / "bad.json").write_text("{ nope")
        code, _, err = run(capsys, "reach", "--network", toy / "bad.json", "--box", toy / "box.json")
        assert code == 2 and "error" in err

    def test_missing_file(self, toy, capsys):
        code, _, _ = run(capsys, "reach", "--network", toy / "missing.json", "--box", toy / "box.json")
        assert code == 2

    def test_box_dimension_mismatch(self, toy, capsys):
        (toy / "b2.json").write_text(json.dumps({"lo": [0, 0], "hi": [1, 1]}))
        code, _, _ = run(capsys, "reach", "--network", toy / "net.json", "--box", toy / "b2.json")
        assert code == 2

    def test_engine_error_exit_3(self, toy, capsys, monkeypatch):
        import mmreach.cli as cli
        from mmreach.errors import EmptyIntersection

        def broken(*a, **k):
            raise EmptyIntersection("boxes are disjoint")

        monkeypatch.setattr(cli, "reach", broken)
        code, _, err = run(capsys, "reach", "--network", toy / "net.json", "--box", toy / "box.json")
        assert code == 3 and "disjoint" in err

    def test_bad_arguments(self, toy, capsys):
        with pytest.raises(SystemExit) as e:
            main(["reach", "--network", str(toy / "net.json")])
        assert e.value.code == 2


class TestGen:
    def test_small_preset_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "gen", "--preset", "small", "--count", 5, "--seed", 7, "--out", a)[0] == 0
        assert run(capsys, "gen", "--preset", "small", "--count", 5, "--seed", 7, "--out", b)[0] == 0
        names = sorted(p.name for p in a.iterdir())
        assert len(names) == 10
        for n in names:
            assert (a / n).read_bytes() == (b / n).read_bytes()

    def test_large_preset_ranges(self, tmp_path, capsys):
        code, _, _ = run(capsys, "gen", "--preset", "large", "--count", 1, "--out", tmp_path,
                         "--encoding", "hex")
        net = network_from_dict(json.loads((tmp_path / "net_0000.json").read_text()))
        assert code == 0
        assert 500 <= net.n_inputs <= 1000 and 10 <= net.n_outputs <= 50
        assert 5 <= net.depth <= 10 and all(100 <= n <= 200 for n in net.dims[1:-1])

    def test_zero_hidden_width(self, tmp_path, capsys):
        code, _, err = run(capsys, "gen", "--hidden", "0,0", "--out", tmp_path)
        assert code == 2 and "hidden" in err

    def test_unknown_activation(self, tmp_path, capsys):
        code, _, _ = run(capsys, "gen", "--activation", "swish2", "--count", 1, "--out", tmp_path)
        assert code == 2

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"depth": [2, 2], "n_in": [3, 3], "n_out": [1, 1], "hidden": [4, 4],
                                   "activation": "elu", "count": 2}))
        code, _, _ = run(capsys, "gen", "--config", cfg, "--out", tmp_path / "o")
        net = network_from_dict(json.loads((tmp_path / "o" / "net_0001.json").read_text()))
        assert code == 0 and net.dims == [3, 4, 1]


class TestBench:
    def test_summary_fractions(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bench", "--preset", "small", "--count", 50, "--methods", "mm,ibp",
                           "--out", tmp_path / "res" / "s", "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        mm_vs_ibp = [p for p in doc["pairs"] if p["method"] == "mm" and p["baseline"] == "ibp"][0]
        assert mm_vs_ibp["tighter_or_equal"] == 1.0
        assert (tmp_path / "res" / "s.csv").exists() and (tmp_path / "res" / "s.json").exists()

    def test_single_method_exit_3(self, capsys):
        code, _, err = run(capsys, "bench", "--count", 3, "--methods", "mm")
        assert code == 3 and "two methods" in err

    def test_rerun_identical_widths(self, tmp_path, capsys):
        for name in ("a", "b"):
            run(capsys, "bench", "--count", 10, "--seed", 3, "--activation", "silu", "--out", tmp_path / name)
        col = lambda p: [r["width"] for r in csv.DictReader(open(p))]
        assert col(tmp_path / "a.csv") == col(tmp_path / "b.csv")

    def test_bad_config(self, tmp_path, capsys):
        (tmp_path / "c.json").write_text(json.dumps({"bogus_field": 1}))
        code, _, _ = run(capsys, "bench", "--config", tmp_path / "c.json")
        assert code == 2

    def test_table_output(self, capsys):
        code, out, _ = run(capsys, "bench", "--count", 5)
        assert code == 0 and "tighter/equal" in out


class TestEval:
    def test_point(self, toy, capsys):
        code, out, _ = run(capsys, "eval", "--network", toy / "net.json", "--point", "[-1.5]")
        assert code == 0 and json.loads(out) == [0.0]

    def test_bad_point(self, toy, capsys):
        assert run(capsys, "eval", "--network", toy / "net.json", "--point", "[1, 2]")[0] == 2
        assert run(capsys, "eval", "--network", toy / "net.json", "--point", "oops")[0] == 2


def test_module_entry_point(toy):
    proc = subprocess.run(
        [sys.executable, "-m", "mmreach", "eval", "--network", str(toy / "net.json"), "--point", "[3]"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout) == [3.0]
