"""Uniform train / predict entry points over all classifier kinds."""
from dataclasses import dataclass

import numpy as np

from ..features import Normalizer, fit_normalizer
from ..synth.taxonomy import N_CLASSES
from .gbt import predict_gbt, train_gbt
from .gnb import predict_gnb, train_gnb
from .knn import predict_knn, train_knn
from .logreg import predict_logreg, train_logreg
from .spec import SVM_KINDS, ModelKind, ModelSpec
from .svm import predict_svm, train_svm
from .trees import predict_trees, train_cart, train_forest

MODEL_FORMAT_VERSION = 1

_TRAINERS = {
    ModelKind.GBT: train_gbt,
    ModelKind.LOGREG: train_logreg,
    ModelKind.KNN: train_knn,
    ModelKind.CART: train_cart,
    ModelKind.FOREST: train_forest,
    ModelKind.GNB: train_gnb,
}
_PREDICTORS = {
    ModelKind.GBT: predict_gbt,
    ModelKind.LOGREG: predict_logreg,
    ModelKind.KNN: predict_knn,
    ModelKind.CART: predict_trees,
    ModelKind.FOREST: predict_trees,
    ModelKind.GNB: predict_gnb,
}


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    normalizer: Normalizer
    params: dict

    @property
    def dim(self) -> int:
        return self.normalizer.mean.shape[0]


def _check_training_data(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training features must be a non-empty 2-D array")
    if y.shape != (X.shape[0],):
        raise ValueError(f"{X.shape[0]} feature rows but {y.shape} labels")
    if not np.all(np.isfinite(X)):
        raise ValueError("training features contain non-finite values")
    if not np.all((y == np.round(y)) & (y >= 0) & (y < N_CLASSES)):
        raise ValueError(f"labels must be class codes 0..{N_CLASSES - 1}")
    y = y.astype(np.int64)
    if len(np.unique(y)) < 2:
        raise ValueError("training set needs at least two classes")
    return X, y


def train(spec: ModelSpec, X, y) -> TrainedModel:
    """Fit the normalizer on X, then the classifier on normalized X."""
    X, y = _check_training_data(X, y)
    norm = fit_normalizer(X)
    Z = norm.apply(X)
    hp = spec.hyperparameters
    if spec.kind in SVM_KINDS:
        params = train_svm(spec.kind, Z, y, hp)
    else:
        params = _TRAINERS[spec.kind](Z, y, hp, spec.seed)
    return TrainedModel(spec, norm, params)


def predict_batch(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise ValueError(f"model expects {model.dim} features, got shape {X.shape}")
    Z = model.normalizer.apply(X)
    if model.spec.kind in SVM_KINDS:
        out = predict_svm(model.params, Z)
    else:
        out = _PREDICTORS[model.spec.kind](model.params, Z)
    return np.asarray(out, dtype=np.int64)


def predict(model: TrainedModel, v) -> int:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("predict takes one feature vector; use predict_batch for matrices")
    return int(predict_batch(model, v[None, :])[0])


# --- canonical JSON-ready encoding -------------------------------------------------

def _encode(obj):
    if isinstance(obj, np.ndarray):
        kind = "i8" if obj.dtype.kind in "iub" else "f8"
        cast = int if kind == "i8" else float
        return {"__ndarray__": kind, "shape": list(obj.shape),
                "data": [cast(v) for v in obj.ravel().tolist()]}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            dtype = np.int64 if obj["__ndarray__"] == "i8" else np.float64
            return np.array(obj["data"], dtype=dtype).reshape(obj["shape"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "normalizer": {"mean": _encode(model.normalizer.mean), "sd": _encode(model.normalizer.sd)},
        "params": _encode(model.params),
    }


def model_from_dict(d: dict) -> TrainedModel:
    version = d.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    spec = ModelSpec.from_dict(d["spec"])
    norm = Normalizer(_decode(d["normalizer"]["mean"]), _decode(d["normalizer"]["sd"]))
    return TrainedModel(spec, norm, _decode(d["params"]))
