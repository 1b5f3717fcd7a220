import json

import jsonschema
import pytest

from plmorse.cli import main
from plmorse.ensembles import TRIAL_SCHEMA
from plmorse.morse import REPORT_SCHEMA
from plmorse.network import load_network


def _deep_net_json(path):
    path.write_text(json.dumps({"layers": [
        {"weights": [["1/1", "0/1"], ["0/1", "1/1"]], "bias": ["0/1", "0/1"], "activation": "relu"},
        {"weights": [["1/1", "1/1"]], "bias": ["0/1"], "activation": "relu"},
        {"weights": [["1/1"]], "bias": ["0/1"], "activation": "none"},
    ]}))


def _two_relu_json(path):
    path.write_text(json.dumps({"layers": [
        {"weights": [[1, 0], [0, 1]], "bias": [0, 0], "activation": "relu"},
        {"weights": [[1, 1]], "bias": [0], "activation": "none"},
    ]}))


def test_generate_then_analyze(tmp_path, capsys):
    net_file = tmp_path / "fan1.json"
    assert main(["generate", "--fan", "1", "--out", str(net_file)]) == 0
    net = load_network(net_file)
    assert net.architecture == (2, 4, 1)
    assert main(["analyze", str(net_file)]) == 0
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["global_h_complexity"] == 1
    level0 = [c for c in doc["components"] if c["level"] == "0/1"]
    assert level0[0]["ranks"] == [0, 1]


def test_analyze_report_file(tmp_path, capsys):
    net_file = tmp_path / "net.json"
    _two_relu_json(net_file)
    report = tmp_path / "report.json"
    assert main(["analyze", str(net_file), "--report", str(report)]) == 0
    assert "report written" in capsys.readouterr().out
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["coarse"]["sublevel"] == [1]


def test_analyze_nontransversal_exits_two(tmp_path, capsys):
    net_file = tmp_path / "deep.json"
    _deep_net_json(net_file)
    assert main(["analyze", str(net_file)]) == 2
    assert "not transversal" in capsys.readouterr().err


def test_analyze_bad_files(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["analyze", str(bad)]) == 2
    assert "malformed" in capsys.readouterr().err
    shapeless = tmp_path / "shapeless.json"
    shapeless.write_text(json.dumps({"layers": [
        {"weights": [[1, 2, 3]], "bias": [0], "activation": "bogus"},
    ]}))
    assert main(["analyze", str(shapeless)]) == 2
    assert "malformed" in capsys.readouterr().err


def test_generate_random_is_deterministic(capsys):
    assert main(["generate", "--random", "2,3,1", "--seed", "5"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--random", "2,3,1", "--seed", "5"]) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["layers"][0]["activation"] == "relu"


def test_generate_needs_exactly_one_family(capsys):
    assert main(["generate"]) == 2
    assert "exactly one" in capsys.readouterr().err
    assert main(["generate", "--fan", "1", "--random", "2,3,1"]) == 2
    capsys.readouterr()
    assert main(["generate", "--random", "2,x,1"]) == 2
    assert "comma-separated integers" in capsys.readouterr().err


def test_montecarlo_identical_bytes(capsys):
    argv = ["montecarlo", "--plmorse", "2", "3", "--trials", "10", "--seed", "1"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    doc = json.loads(first)
    jsonschema.validate(doc, TRIAL_SCHEMA)
    assert doc["closed_form"] == "1/8"


def test_montecarlo_flat_arch(capsys):
    assert main(["montecarlo", "--flat", "2,1,1", "--trials", "20", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "flat_cell"
    assert doc["bound"] == "1/2"


def test_montecarlo_needs_one_experiment(capsys):
    assert main(["montecarlo", "--trials", "5", "--seed", "1"]) == 2
    assert "exactly one" in capsys.readouterr().err


def test_oracle_sublevel(tmp_path, capsys):
    net_file = tmp_path / "net.json"
    _two_relu_json(net_file)
    rc = main(["oracle", str(net_file), "--threshold", "1/3", "--resolution", "1/4", "--box", "4"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["betti"] == [1]
    num, den = doc["margin"].split("/")
    assert int(num) > 0


def test_oracle_band_flag_count(tmp_path, capsys):
    net_file = tmp_path / "net.json"
    _two_relu_json(net_file)
    assert main(["oracle", str(net_file), "--mode", "band", "--threshold", "1",
                 "--resolution", "1/4", "--box", "2"]) == 2
    assert "two --threshold" in capsys.readouterr().err
    assert main(["oracle", str(net_file), "--mode", "band", "--threshold=-1/3",
                 "--threshold=1/3", "--resolution", "1/4", "--box", "2"]) == 0
    json.loads(capsys.readouterr().out)
    assert main(["oracle", str(net_file), "--threshold", "x",
                 "--resolution", "1/4", "--box", "2"]) == 2
    assert "rational" in capsys.readouterr().err


def test_export_svg(tmp_path):
    net_file = tmp_path / "fan2.json"
    assert main(["generate", "--fan", "2", "--out", str(net_file)]) == 0
    out = tmp_path / "fan2.svg"
    assert main(["export-svg", str(net_file), "--out", str(out)]) == 0
    doc = out.read_text()
    assert doc.count("<line ") == 6
    assert 'version="1.1"' in doc


def test_export_svg_rejects_non_planar(tmp_path, capsys):
    net_file = tmp_path / "r3.json"
    assert main(["generate", "--random", "3,2,1", "--seed", "1", "--out", str(net_file)]) == 0
    capsys.readouterr()
    assert main(["export-svg", str(net_file)]) == 2
    assert "two-input" in capsys.readouterr().err


def test_unknown_flag_exits_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", str(tmp_path / "x.json"), "--bogus"])
    assert exc.value.code == 2
