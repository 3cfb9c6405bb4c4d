"""Model kinds, hyperparameter defaults, and validation."""
import math
from dataclasses import dataclass, field
from enum import Enum


class ModelKind(str, Enum):
    LINEAR_SVM = "LINEAR_SVM"
    CUBIC_SVM = "CUBIC_SVM"
    RBF_SVM = "RBF_SVM"
    GBT = "GBT"
    LOGREG = "LOGREG"
    KNN = "KNN"
    CART = "CART"
    FOREST = "FOREST"
    GNB = "GNB"


# CLI / report names
MODEL_NAMES = {
    "linear-svm": ModelKind.LINEAR_SVM,
    "cubic-svm": ModelKind.CUBIC_SVM,
    "rbf-svm": ModelKind.RBF_SVM,
    "gbt": ModelKind.GBT,
    "logreg": ModelKind.LOGREG,
    "knn": ModelKind.KNN,
    "cart": ModelKind.CART,
    "forest": ModelKind.FOREST,
    "gnb": ModelKind.GNB,
}
KIND_NAMES = {kind: name for name, kind in MODEL_NAMES.items()}
SVM_KINDS = (ModelKind.LINEAR_SVM, ModelKind.CUBIC_SVM, ModelKind.RBF_SVM)

_SVM = {"C": 1.0, "tol": 1e-3, "max_sweeps": 10_000}

DEFAULTS = {
    ModelKind.LINEAR_SVM: dict(_SVM),
    ModelKind.CUBIC_SVM: dict(_SVM, gamma=None),
    ModelKind.RBF_SVM: dict(_SVM, gamma=None),
    ModelKind.GBT: {"rounds": 50, "eta": 0.3, "reg_lambda": 1.0, "reg_gamma": 0.0,
                    "max_depth": 6, "min_child_weight": 0.0},
    ModelKind.LOGREG: {"reg_lambda": 1e-4, "max_iters": 2000, "grad_tol": 1e-6},
    ModelKind.KNN: {"k": 5},
    ModelKind.CART: {"max_depth": None, "min_samples_split": 2},
    ModelKind.FOREST: {"n_trees": 100, "max_features": "sqrt", "bootstrap": True,
                       "max_depth": None, "min_samples_split": 2},
    ModelKind.GNB: {"var_floor": 1e-9},
}


class HyperparameterError(ValueError):
    pass


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise HyperparameterError(message)


def validate_hyperparameters(kind: ModelKind, hp: dict) -> None:
    unknown = set(hp) - set(DEFAULTS[kind])
    _check(not unknown, f"unknown hyperparameters for {kind.value}: {sorted(unknown)}")
    if kind in SVM_KINDS:
        _check(hp["C"] > 0, "C must be > 0")
        _check(hp["tol"] > 0, "tol must be > 0")
        _check(hp["max_sweeps"] >= 1, "max_sweeps must be >= 1")
        if hp.get("gamma") is not None:
            _check(hp["gamma"] > 0, "gamma must be > 0")
    elif kind == ModelKind.GBT:
        _check(int(hp["rounds"]) >= 1, "rounds must be >= 1")
        _check(0 < hp["eta"] <= 1, "eta must be in (0, 1]")
        _check(hp["reg_lambda"] >= 0, "reg_lambda must be >= 0")
        _check(hp["reg_gamma"] >= 0, "reg_gamma must be >= 0")
        _check(int(hp["max_depth"]) >= 1, "max_depth must be >= 1")
        _check(hp["min_child_weight"] >= 0, "min_child_weight must be >= 0")
    elif kind == ModelKind.LOGREG:
        _check(hp["reg_lambda"] >= 0, "reg_lambda must be >= 0")
        _check(int(hp["max_iters"]) >= 1, "max_iters must be >= 1")
        _check(hp["grad_tol"] > 0, "grad_tol must be > 0")
    elif kind == ModelKind.KNN:
        _check(int(hp["k"]) >= 1, "k must be >= 1")
    elif kind in (ModelKind.CART, ModelKind.FOREST):
        if hp["max_depth"] is not None:
            _check(int(hp["max_depth"]) >= 1, "max_depth must be >= 1")
        _check(int(hp["min_samples_split"]) >= 2, "min_samples_split must be >= 2")
        if kind == ModelKind.FOREST:
            _check(int(hp["n_trees"]) >= 1, "n_trees must be >= 1")
            mf = hp["max_features"]
            _check(mf in ("sqrt", None) or (isinstance(mf, int) and mf >= 1),
                   "max_features must be 'sqrt', None, or a positive integer")
    elif kind == ModelKind.GNB:
        _check(hp["var_floor"] > 0, "var_floor must be > 0")


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        hp = dict(DEFAULTS[kind])
        unknown = set(self.hyperparameters) - set(hp)
        _check(not unknown, f"unknown hyperparameters for {kind.value}: {sorted(unknown)}")
        hp.update(self.hyperparameters)
        validate_hyperparameters(kind, hp)
        object.__setattr__(self, "hyperparameters", hp)

    @property
    def name(self) -> str:
        return KIND_NAMES[self.kind]

    @classmethod
    def from_name(cls, name: str, seed: int = 0, **overrides) -> "ModelSpec":
        key = name.lower().replace("_", "-")
        aliases = {"xgboost": "gbt", "svm": "linear-svm", "tree": "cart", "rf": "forest",
                   "logistic-regression": "logreg"}
        key = aliases.get(key, key)
        if key not in MODEL_NAMES:
            raise HyperparameterError(f"unknown model {name!r}; choose from {sorted(MODEL_NAMES)}")
        return cls(MODEL_NAMES[key], overrides, seed)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "hyperparameters": dict(self.hyperparameters),
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(ModelKind(d["kind"]), dict(d["hyperparameters"]), int(d["seed"]))


def resolve_max_features(value, d: int) -> int:
    if value is None:
        return d
    if value == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    return min(int(value), d)
