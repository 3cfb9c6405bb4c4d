"""Confusion matrices, per-class metrics, the model leaderboard, and the SVG heatmap."""
import io
import time
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._rng import derive_seed
from .dataio import digest64, features_to_csv
from .features import FeatureSet
from .models import ModelSpec, predict_batch, train
from .models.spec import SVM_KINDS
from .synth.taxonomy import CLASS_NAMES, N_CLASSES


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows: true class, columns: predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else 0.0


def confusion(y_true, y_pred, n_classes: int = N_CLASSES) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape} true vs {y_pred.shape} predicted labels")
    for name, y in (("true", y_true), ("predicted", y_pred)):
        if y.size and (y.min() < 0 or y.max() >= n_classes):
            raise ValueError(f"{name} labels must be codes 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassMetrics:
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def metrics(conf: ConfusionMatrix) -> ClassMetrics:
    """Accuracy and per-class precision/recall/F1; every 0/0 is 0."""
    c = np.asarray(conf.counts)
    if c.size == 0 or c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("confusion matrix must be a non-empty square array")
    if c.sum() == 0:
        raise ValueError("confusion matrix holds no samples")
    tp = np.diag(c).astype(float)
    precision = _ratio(tp, c.sum(axis=0))
    recall = _ratio(tp, c.sum(axis=1))
    f1 = _ratio(2 * precision * recall, precision + recall)
    return ClassMetrics(float(tp.sum() / c.sum()), precision, recall, f1)


def top_confusion_pairs(conf: ConfusionMatrix, k: int = 2) -> list:
    """Unordered class pairs ranked by off-diagonal mass c[i,j] + c[j,i].

    Ties go to the lexicographically lower pair. Returns ``((i, j), mass)``.
    """
    c = np.asarray(conf.counts)
    n = c.shape[0]
    pairs = [((i, j), int(c[i, j] + c[j, i])) for i in range(n) for j in range(i + 1, n)]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs[:k]


@dataclass
class EvalReport:
    model: str
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    confusion: ConfusionMatrix
    train_seconds: float
    predict_seconds: float
    train_digest: str
    test_digest: str
    seed: int = 0
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> dict:
        d = {"model": self.model, "seed": self.seed, "error": self.error,
             "train_digest": self.train_digest, "test_digest": self.test_digest,
             "train_seconds": self.train_seconds, "predict_seconds": self.predict_seconds}
        if not self.failed:
            top = top_confusion_pairs(self.confusion, 1)[0]
            d.update({
                "accuracy": self.accuracy,
                "per_class": {CLASS_NAMES[k]: {"precision": float(self.precision[k]),
                                               "recall": float(self.recall[k]),
                                               "f1": float(self.f1[k])}
                              for k in range(len(self.precision))},
                "confusion": self.confusion.counts.tolist(),
                "class_names": list(CLASS_NAMES),
                "top_confusion_pair": {"classes": [CLASS_NAMES[c] for c in top[0]], "count": top[1]},
            })
        return d


def dataset_digest(fs: FeatureSet) -> str:
    return digest64(features_to_csv(fs).encode("utf-8"))


def _failed_report(name, seed, error, train_digest, test_digest, t_train=0.0) -> EvalReport:
    empty = np.zeros(N_CLASSES)
    return EvalReport(name, float("nan"), empty, empty, empty,
                      ConfusionMatrix(np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)),
                      t_train, 0.0, train_digest, test_digest, seed, error)


def evaluate(model, test: FeatureSet, name: str = None, train_digest: str = "",
             train_seconds: float = 0.0) -> EvalReport:
    name = name or model.spec.name
    t0 = time.perf_counter()
    pred = predict_batch(model, test.values)
    t_pred = time.perf_counter() - t0
    conf = confusion(test.labels, pred)
    m = metrics(conf)
    return EvalReport(name, m.accuracy, m.precision, m.recall, m.f1, conf, train_seconds, t_pred,
                      train_digest, dataset_digest(test), model.spec.seed)


def model_seed(master_seed: int, name: str) -> int:
    """Per-model seed; keyed by name so adding models leaves others unchanged."""
    return derive_seed(master_seed, zlib.crc32(name.encode("ascii")))


@dataclass
class Leaderboard:
    reports: list
    master_seed: int
    flagged_pair: Optional[tuple] = None  # ((i, j), count) for the best model
    models: dict = field(default_factory=dict, repr=False)

    @property
    def best(self) -> Optional[EvalReport]:
        ok = [r for r in self.reports if not r.failed]
        return ok[0] if ok else None

    def best_of(self, names) -> Optional[EvalReport]:
        ok = [r for r in self.reports if not r.failed and r.model in names]
        return ok[0] if ok else None


def _rank_key(r: EvalReport):
    return (r.failed, -(r.accuracy if not r.failed else 0.0), r.model)


def benchmark(train_set: FeatureSet, test_set: FeatureSet, specs, master_seed: int = 42,
              keep_models: bool = False) -> Leaderboard:
    """Train and score every spec; a failing model is reported, not raised.

    Each spec is reseeded from ``master_seed`` and its name. Reports are
    ordered by accuracy (descending) then name; failed models come last.
    """
    train_digest = dataset_digest(train_set)
    test_digest = dataset_digest(test_set)
    reports, models = [], {}
    for spec in specs:
        seed = model_seed(master_seed, spec.name)
        t0 = time.perf_counter()
        try:
            spec = ModelSpec(spec.kind, spec.hyperparameters, seed)
            model = train(spec, train_set.values, train_set.labels)
            t_train = time.perf_counter() - t0
            report = evaluate(model, test_set, spec.name, train_digest, t_train)
            if keep_models:
                models[spec.name] = model
        except Exception as exc:  # noqa: BLE001 - recorded in the report
            report = _failed_report(spec.name, seed, f"{type(exc).__name__}: {exc}",
                                    train_digest, test_digest, time.perf_counter() - t0)
        reports.append(report)
    reports.sort(key=_rank_key)
    board = Leaderboard(reports, master_seed, models=models)
    if board.best is not None:
        board.flagged_pair = top_confusion_pairs(board.best.confusion, 1)[0]
    return board


def best_svm(board: Leaderboard) -> Optional[EvalReport]:
    from .models.spec import KIND_NAMES
    return board.best_of({KIND_NAMES[k] for k in SVM_KINDS})


def leaderboard_csv(board: Leaderboard) -> str:
    """Deterministic table: no wall times."""
    buf = io.StringIO()
    buf.write("rank,model,accuracy,macro_f1,top_confusion_pair,top_confusion_count,error\n")
    for rank, r in enumerate(board.reports, start=1):
        if r.failed:
            buf.write(f"{rank},{r.model},,,,,\"{r.error.replace(chr(34), chr(39))}\"\n")
            continue
        (i, j), count = top_confusion_pairs(r.confusion, 1)[0]
        buf.write(f"{rank},{r.model},{r.accuracy!r},{float(np.mean(r.f1))!r},"
                  f"{CLASS_NAMES[i]}/{CLASS_NAMES[j]},{count},\n")
    return buf.getvalue()


def confusion_csv(conf: ConfusionMatrix, class_names=CLASS_NAMES) -> str:
    buf = io.StringIO()
    buf.write("true\\predicted," + ",".join(class_names) + "\n")
    for name, row in zip(class_names, conf.counts):
        buf.write(name + "," + ",".join(str(int(v)) for v in row) + "\n")
    return buf.getvalue()


# --- heatmap ----------------------------------------------------------------------------

_LOW = (255, 255, 255)
_HIGH = (8, 48, 107)


def _color(t: float) -> str:
    rgb = [round(lo + (hi - lo) * t) for lo, hi in zip(_LOW, _HIGH)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_heatmap_svg(conf: ConfusionMatrix, class_names=CLASS_NAMES, title: str = "") -> str:
    """Standalone SVG of the confusion counts, each row colored from 0 to its maximum."""
    c = np.asarray(conf.counts)
    n = c.shape[0]
    cell, margin_l, margin_t = 40, 130, 120
    width = margin_l + n * cell + 20
    height = margin_t + n * cell + 60
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    for i in range(n):
        row_max = int(c[i].max())
        for j in range(n):
            t = c[i, j] / row_max if row_max > 0 else 0.0
            x, y = margin_l + j * cell, margin_t + i * cell
            out.append(f'<rect class="cell" x="{x}" y="{y}" width="{cell}" height="{cell}" '
                       f'fill="{_color(t)}" stroke="#cccccc"/>')
            ink = "#ffffff" if t > 0.5 else "#000000"
            out.append(f'<text x="{x + cell // 2}" y="{y + cell // 2 + 4}" text-anchor="middle" '
                       f'fill="{ink}">{int(c[i, j])}</text>')
    for k, name in enumerate(class_names):
        y = margin_t + k * cell + cell // 2 + 4
        out.append(f'<text x="{margin_l - 6}" y="{y}" text-anchor="end">{name}</text>')
        x = margin_l + k * cell + cell // 2
        out.append(f'<text x="{x}" y="{margin_t - 6}" text-anchor="start" '
                   f'transform="rotate(-60 {x} {margin_t - 6})">{name}</text>')
    out.append(f'<text x="{margin_l + n * cell // 2}" y="{height - 20}" text-anchor="middle">predicted class</text>')
    out.append(f'<text x="16" y="{margin_t + n * cell // 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {margin_t + n * cell // 2})">true class</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
