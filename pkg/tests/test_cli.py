import json
import subprocess
import sys

import numpy as np
import pytest

from pqbench.cli import main
from pqbench.dataio import features_to_csv, read_dataset, read_features
from pqbench.features import FeatureSet


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Small end-to-end run shared by the tests below."""
    d = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--out", str(d / "train"), "--per-class", "3", "--split", "train"]) == 0
    assert main(["synth", "--out", str(d / "test"), "--per-class", "2", "--split", "test",
                 "--seed", "43"]) == 0
    assert main(["features", "--dataset", str(d / "train"), "--out", str(d / "train.csv")]) == 0
    assert main(["features", "--dataset", str(d / "test"), "--out", str(d / "test.csv")]) == 0
    return d


def test_synth_and_features_outputs(workdir):
    records = read_dataset(workdir / "train")
    assert len(records) == 39
    assert [int(r.label) for r in records] == [c for c in range(13) for _ in range(3)]
    assert len(read_features(workdir / "test.csv")) == 26


def test_splits_draw_different_waveforms(workdir, tmp_path):
    assert main(["synth", "--out", str(tmp_path / "t"), "--per-class", "3", "--split", "test"]) == 0
    a = read_dataset(workdir / "train")[0].samples
    b = read_dataset(tmp_path / "t")[0].samples
    assert not np.array_equal(a, b)


def test_train_eval_round_trip(workdir, capsys):
    model = workdir / "gbt.json"
    assert main(["train", "--model", "gbt", "--train", str(workdir / "train.csv"),
                 "--out", str(model), "--param", "rounds=5"]) == 0
    assert json.loads(model.read_text())["spec"]["hyperparameters"]["rounds"] == 5
    assert main(["eval", "--model", str(model), "--test", str(workdir / "test.csv"),
                 "--report", str(workdir / "gbt_report.json"), "--heatmap", str(workdir / "gbt.svg"),
                 "--confusion", str(workdir / "gbt_conf.csv")]) == 0
    out = capsys.readouterr().out
    assert "accuracy" in out and "top confusion" in out
    report = json.loads((workdir / "gbt_report.json").read_text())
    assert sum(map(sum, report["confusion"])) == 26
    assert (workdir / "gbt.svg").read_text().count('class="cell"') == 169


def test_benchmark_is_reproducible(workdir, capsys):
    def run(name):
        argv = ["benchmark", "--train", str(workdir / "train.csv"), "--test", str(workdir / "test.csv"),
                "--out", str(workdir / name), "--reports", str(workdir / (name + ".reports")),
                "--models", "gnb,knn,cart,cubic-svm"]
        assert main(argv) == 0
        return (workdir / name).read_bytes()

    first = run("lb1.csv")
    assert first == run("lb2.csv")
    assert len(first.decode().splitlines()) == 5
    out = capsys.readouterr().out
    assert "best model" in out and "best SVM cubic-svm: top confusion" in out
    names = sorted(p.name for p in (workdir / "lb1.csv.reports").iterdir())
    assert "cubic-svm.json" in names and "cubic-svm.svg" in names and "cubic-svm.confusion.csv" in names


def test_train_cubic_svm_on_two_class_csv(tmp_path):
    rng = np.random.default_rng(3)
    y = np.repeat([0, 5], 15)
    X = rng.normal(size=(30, 288))
    X[:, 0] += np.where(y == 0, -4.0, 4.0)
    csv = tmp_path / "toy.csv"
    csv.write_text(features_to_csv(FeatureSet(np.arange(30), y, X)))
    assert main(["train", "--model", "cubic-svm", "--train", str(csv), "--out", str(tmp_path / "m.json")]) == 0
    assert main(["eval", "--model", str(tmp_path / "m.json"), "--test", str(csv),
                 "--report", str(tmp_path / "r.json")]) == 0
    assert json.loads((tmp_path / "r.json").read_text())["accuracy"] == 1.0


@pytest.mark.parametrize("argv", [
    [],
    ["nonsense"],
    ["synth", "--out", "x"],
    ["synth", "--out", "x", "--split", "validation"],
    ["synth", "--out", "x", "--split", "train", "--per-class", "0"],
    ["synth", "--out", "x", "--split", "train", "--seed", "-1"],
    ["train", "--model", "gbt", "--train", "a.csv", "--out", "m.json", "--param", "rounds"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_runtime_errors_exit_1(tmp_path, workdir, capsys):
    cases = [
        ["features", "--dataset", str(tmp_path / "missing"), "--out", str(tmp_path / "f.csv")],
        ["train", "--model", "perceptron", "--train", str(workdir / "train.csv"), "--out", str(tmp_path / "m")],
        ["train", "--model", "gbt", "--train", str(workdir / "train.csv"), "--out", str(tmp_path / "m"),
         "--param", "rounds=0"],
        ["eval", "--model", str(tmp_path / "none.json"), "--test", str(workdir / "test.csv"),
         "--report", str(tmp_path / "r.json")],
        ["benchmark", "--train", str(workdir / "train.csv"), "--test", str(workdir / "test.csv"),
         "--out", str(tmp_path / "lb.csv"), "--reports", str(tmp_path / "r"), "--models", ","],
    ]
    for argv in cases:
        assert main(argv) == 1, argv
        err = capsys.readouterr().err
        assert err.startswith(f"pqbench {argv[0]}: error: ") and err.count("\n") == 1


def test_help_via_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pqbench", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("synth", "features", "train", "eval", "benchmark"):
        assert cmd in out.stdout
