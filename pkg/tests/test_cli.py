import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hmmtrend import datasets, save_model
from hmmtrend.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def files(tmp_path):
    for k in (1, 6):
        (tmp_path / f"k{k}.json").write_bytes(save_model(datasets.published_model(k)))
    (tmp_path / "closes.csv").write_text(datasets.ibm_csv(headerless=True))
    (tmp_path / "dated.csv").write_text(datasets.ibm_csv(headerless=False))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_ingest_csv_default(files, capsys):
    code, out, _ = run(capsys, "ingest", "--input", files / "closes.csv", "--headerless", "--k", 1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "date,diff,symbol,state"
    assert len(lines) == 20
    assert lines[1].split(",")[2] == "D"
    assert "".join(line.split(",")[2] for line in lines[1:]) == datasets.PUBLISHED_SYMBOLS[1]


def test_ingest_json_and_text_carry_same_values(files, capsys):
    _, out, _ = run(capsys, "ingest", "--input", files / "dated.csv", "--k", 6, "--format", "json")
    rows = json.loads(out)["rows"]
    assert rows[0]["diff"] == pytest.approx(1.6)
    _, text, _ = run(capsys, "ingest", "--input", files / "dated.csv", "--k", 6, "--format", "text")
    first = text.splitlines()[1].split()
    assert float(first[1]) == pytest.approx(round(rows[0]["diff"], 2))
    assert first[2] == rows[0]["symbol"]


def test_estimate_from_ingest(files, capsys):
    labeled = files / "labeled.csv"
    assert run(capsys, "ingest", "--input", files / "closes.csv", "--headerless", "-o", labeled)[0] == 0
    code, out, _ = run(capsys, "estimate", "--input", labeled)
    assert code == 0
    doc = json.loads(out)
    A = np.array(doc["transition"])
    np.testing.assert_allclose(A.sum(axis=1), 1.0)
    joint = np.array(doc["meta"]["joint_table"])
    assert joint.shape == (6, 12)
    np.testing.assert_allclose(joint.reshape(6, 6, 2).sum(axis=2), A, atol=1e-15)


def test_stationary_text_and_json_agree(files, capsys):
    code, text, _ = run(capsys, "stationary", "--model", files / "k1.json", "--tolerance", 0.01)
    assert code == 0
    assert "dominant trend: moderate low" in text
    _, out, _ = run(capsys, "stationary", "--model", files / "k1.json", "--format", "json")
    doc = json.loads(out)
    printed = [float(line.split()[-2]) for line in text.splitlines()[2:8]]
    np.testing.assert_allclose(printed, [r["probability"] for r in doc["steady_state"]], atol=0.005)


def test_generate_is_byte_identical(files, capsys):
    argv = ("generate", "--model", files / "k1.json", "--length", 7, "--seed", 42)
    _, first, err = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert "seed: 42" in err
    doc = json.loads(first)
    assert doc["states"][0] == "moderate low" and len(doc["symbols"]) == 7


def test_generate_reads_seed_from_environment(files, capsys, monkeypatch):
    monkeypatch.setenv("HMMTREND_SEED", "9")
    _, out, err = run(capsys, "generate", "--model", files / "k1.json", "--length", 5)
    assert "seed: 9" in err
    monkeypatch.delenv("HMMTREND_SEED")
    _, again, _ = run(capsys, "generate", "--model", files / "k1.json", "--length", 5, "--seed", 9)
    assert out == again


def test_generate_unseeded_echoes_seed(files, capsys):
    _, out, err = run(capsys, "generate", "--model", files / "k1.json", "--length", 5)
    seed = int(err.split("seed: ")[1].split()[0])
    _, again, _ = run(capsys, "generate", "--model", files / "k1.json", "--length", 5, "--seed", seed)
    assert out == again


def test_generate_best_of_trials(files, capsys):
    argv = ("generate", "--model", files / "k1.json", "--length", 7, "--seed", 3,
            "--trials", 500, "--include-start")
    code, out, _ = run(capsys, *argv)
    assert code == 0
    doc = json.loads(out)
    assert doc["symbols"][0] == "ε" and doc["trials"] == 500
    assert run(capsys, *argv)[1] == out


def test_decode_and_train(files, capsys):
    code, out, _ = run(capsys, "decode", "--model", files / "k6.json", "--symbols", "I,I,D,D")
    assert code == 0
    assert len(json.loads(out)["states"]) == 4
    code, out, _ = run(capsys, "train", "--model", files / "k6.json", "--symbols", "I,I,I,D,D,I,D",
                       "--max-iter", 5)
    assert code == 0
    trace = json.loads(out)["trace"]
    assert np.all(np.diff(trace) >= -1e-9)


def test_decode_needs_symbols(files, capsys):
    code, _, err = run(capsys, "decode", "--model", files / "k1.json")
    assert code == 1 and "--symbols" in err


def test_fitness_reports_divergent_row(capsys):
    code, text, err = run(capsys, "fitness", "--paths", DATA / "optimum_sequences.json")
    assert code == 0
    sums = [float(line.split()[1]) for line in text.splitlines()[1:7]]
    assert sums == [1.00, 1.29, 1.86, 1.57, 2.14, 2.14]
    assert "reference prints 1.43" in text
    assert "row 4" in err
    _, out, _ = run(capsys, "fitness", "--paths", DATA / "optimum_sequences.json", "--format", "json")
    np.testing.assert_allclose([r["compare_sum"] for r in json.loads(out)["rows"]], sums, atol=0.005)


def test_report_end_to_end(files, capsys):
    code, text, _ = run(capsys, "report", "--input", files / "closes.csv", "--headerless", "--k", 1)
    assert code == 0
    assert text.startswith("trend report: 1-day difference")
    assert "dominant trend:" in text


def test_config_precedence(files, capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": str(files / "k1.json"), "length": 4, "seed": 5}))
    _, from_cfg, _ = run(capsys, "generate", "--config", cfg)
    assert len(json.loads(from_cfg)["states"]) == 4
    _, flag_wins, err = run(capsys, "generate", "--config", cfg, "--length", 6, "--verbose")
    assert len(json.loads(flag_wins)["states"]) == 6
    effective = json.loads(err.splitlines()[0])["effective_config"]
    assert effective["length"] == 6 and effective["seed"] == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["generate", "--bogus-flag"],
        ["stationary"],  # missing --model
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "usage" in err


def test_input_errors_exit_one(files, capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,close\n2000-01-03,abc\n")
    code, _, err = run(capsys, "ingest", "--input", bad)
    assert code == 1 and "line 2" in err
    assert run(capsys, "stationary", "--model", tmp_path / "missing.json")[0] == 1


def test_numeric_errors_exit_two(tmp_path, capsys):
    doc = datasets.published_model_dict(1)
    doc["transition"][0] = [0.5, 0.4, 0, 0, 0, 0]
    model = tmp_path / "bad.json"
    model.write_text(json.dumps(doc))
    code, _, err = run(capsys, "stationary", "--model", model)
    assert code == 2 and "transition" in err

    doc = {"states": ["a", "b"], "symbols": ["x"], "transition": [[1, 0], [0, 1]],
           "emission": [[1], [1]], "initial": [0.5, 0.5]}
    (tmp_path / "reducible.json").write_text(json.dumps(doc))
    code, _, err = run(capsys, "stationary", "--model", tmp_path / "reducible.json")
    assert code == 2 and "closed classes" in err


def test_console_script_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "hmmtrend.cli", "stationary", "--model", str(files / "k6.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert "dominant trend: very low" in proc.stdout
