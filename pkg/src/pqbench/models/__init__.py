from .base import TrainedModel, model_from_dict, model_to_dict, predict, predict_batch, train
from .spec import (DEFAULTS, KIND_NAMES, MODEL_NAMES, HyperparameterError, ModelKind, ModelSpec)
from .svm import ConvergenceError, kernel, ovo_aggregate, smo_binary
