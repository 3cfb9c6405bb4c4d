import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqbench.evaluation import (ConfusionMatrix, benchmark, best_svm, confusion, confusion_csv,
                                dataset_digest, leaderboard_csv, metrics, render_heatmap_svg,
                                top_confusion_pairs)
from pqbench.features import FeatureSet
from pqbench.models import ModelSpec

labels = st.lists(st.integers(0, 12), min_size=1, max_size=60)


def test_perfect_prediction_is_identity():
    y = list(range(13))
    conf = confusion(y, y)
    np.testing.assert_array_equal(conf.counts, np.eye(13, dtype=int))
    m = metrics(conf)
    assert m.accuracy == 1.0
    assert np.all(m.precision == 1) and np.all(m.recall == 1) and np.all(m.f1 == 1)


def test_constant_predictor_fills_first_column():
    conf = confusion(list(range(13)), [0] * 13)
    assert conf.counts[:, 0].sum() == 13 and conf.counts[:, 1:].sum() == 0


def test_two_swapped_labels_among_26():
    y = list(range(13)) * 2
    p = list(y)
    p[0], p[1] = p[1], p[0]
    conf = confusion(y, p)
    assert np.trace(conf.counts) == 24
    assert metrics(conf).accuracy == pytest.approx(24 / 26)


def test_two_by_two_arithmetic():
    m = metrics(ConfusionMatrix(np.array([[9, 1], [2, 8]])))
    assert m.accuracy == pytest.approx(0.85)
    assert m.precision[0] == pytest.approx(9 / 11)
    assert m.recall[0] == pytest.approx(0.9)
    assert m.f1[0] == pytest.approx(2 * (9 / 11) * 0.9 / (9 / 11 + 0.9))


def test_absent_class_scores_zero():
    m = metrics(confusion([0, 1, 1], [0, 1, 0]))
    assert m.precision[5] == m.recall[5] == m.f1[5] == 0.0


def test_confusion_errors():
    with pytest.raises(ValueError, match="length"):
        confusion([0, 1], [0])
    with pytest.raises(ValueError):
        confusion([0, 13], [0, 1])
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix(np.zeros((13, 13), dtype=int)))
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix(np.zeros((0, 0), dtype=int)))


@settings(max_examples=100, deadline=None)
@given(labels, st.integers(0, 2**32 - 1))
def test_accuracy_properties(y, seed):
    assert metrics(confusion(y, y)).accuracy == 1.0
    rng = np.random.default_rng(seed)
    p = rng.integers(0, 13, size=len(y))
    conf = confusion(y, p)
    assert conf.total == len(y)
    np.testing.assert_array_equal(conf.counts.sum(axis=1), np.bincount(y, minlength=13))
    perm = rng.permutation(len(y))
    np.testing.assert_array_equal(confusion(np.array(y)[perm], p[perm]).counts, conf.counts)
    assert metrics(conf).accuracy == pytest.approx(np.mean(np.array(y) == p))


def test_top_pairs_are_unordered_and_tie_broken():
    c = np.zeros((13, 13), dtype=int)
    c[6, 10], c[10, 6] = 20, 30
    c[0, 7] = 50
    c[1, 2] = 3
    c[2, 5] = 3
    pairs = top_confusion_pairs(ConfusionMatrix(c), 4)
    assert pairs[0] == ((0, 7), 50) and pairs[1] == ((6, 10), 50)
    assert pairs[2:] == [((1, 2), 3), ((2, 5), 3)]


def _svg_cells(svg):
    return re.findall(r'<rect class="cell" [^>]*fill="(#[0-9a-f]{6})"', svg)


def test_heatmap_identity_pattern():
    svg = render_heatmap_svg(confusion(list(range(13)), list(range(13))))
    assert svg.startswith("<svg ")
    assert 'xmlns="http://www.w3.org/2000/svg"' in svg
    fills = _svg_cells(svg)
    assert len(fills) == 169
    diag = [fills[i * 13 + i] for i in range(13)]
    off = [f for k, f in enumerate(fills) if k // 13 != k % 13]
    assert set(diag) == {"#08306b"} and set(off) == {"#ffffff"}
    for name in ("AG", "ABCG", "LINE_DEENERGIZE"):
        assert f">{name}</text>" in svg


def test_heatmap_is_deterministic_and_row_scaled():
    c = np.zeros((13, 13), dtype=int)
    c[0, 0], c[0, 1] = 100, 50
    c[1, 1] = 2
    a = render_heatmap_svg(ConfusionMatrix(c))
    assert a == render_heatmap_svg(ConfusionMatrix(c.copy()))
    fills = _svg_cells(a)
    assert fills[0] == fills[14] == "#08306b"  # each row scaled to its own max
    assert fills[1] not in ("#ffffff", "#08306b")


def _tiny_sets():
    rng = np.random.default_rng(9)
    y = np.repeat(np.arange(4), 10)
    X = rng.normal(size=(40, 6)) + 3 * np.eye(6)[y]
    yt = np.repeat(np.arange(4), 5)
    Xt = rng.normal(size=(20, 6)) + 3 * np.eye(6)[yt]
    return (FeatureSet(np.arange(40), y, X), FeatureSet(np.arange(20), yt, Xt))


def test_benchmark_single_spec():
    train, test = _tiny_sets()
    board = benchmark(train, test, [ModelSpec.from_name("gnb")], 42)
    assert len(board.reports) == 1 and board.reports[0].model == "gnb"
    assert board.reports[0].confusion.total == 20
    assert board.flagged_pair == top_confusion_pairs(board.reports[0].confusion, 1)[0]


def test_benchmark_order_errors_and_determinism():
    train, test = _tiny_sets()
    specs = [ModelSpec.from_name(n) for n in ("knn", "cubic-svm", "gnb", "cart")]
    # a failing model: SMO cannot converge in one sweep at this tolerance
    specs.append(ModelSpec.from_name("rbf-svm", tol=1e-12, max_sweeps=1, C=1000.0))
    board = benchmark(train, test, specs, 42)
    ok = [r for r in board.reports if not r.failed]
    keys = [(-r.accuracy, r.model) for r in ok]
    assert keys == sorted(keys)
    assert board.reports[-1].failed and "ConvergenceError" in board.reports[-1].error
    csv = leaderboard_csv(board)
    assert csv == leaderboard_csv(benchmark(train, test, specs, 42))
    assert "rbf-svm" in csv.splitlines()[-1] and "ConvergenceError" in csv
    assert best_svm(board).model == "cubic-svm"


def test_report_dict_and_digests():
    train, test = _tiny_sets()
    board = benchmark(train, test, [ModelSpec.from_name("knn")], 1)
    d = board.reports[0].to_dict()
    assert d["test_digest"] == dataset_digest(test) and len(d["train_digest"]) == 16
    assert sum(map(sum, d["confusion"])) == 20
    assert set(d["per_class"]) >= {"AG", "BG"}
    shifted = FeatureSet(test.record_ids, test.labels, test.values + 1e-9)
    assert dataset_digest(shifted) != dataset_digest(test)


def test_confusion_csv_layout():
    text = confusion_csv(confusion([0, 1], [0, 0]))
    lines = text.splitlines()
    assert len(lines) == 14 and lines[1].startswith("AG,1,0,")
