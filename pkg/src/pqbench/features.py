"""Subband statistics, the 288-value feature vector, and z-score normalization."""
from dataclasses import dataclass

import numpy as np

from .synth.params import CHANNELS
from .wavelet import SUBBANDS, wavedec5

STATS = ("mean", "sd", "rms", "energy", "skewness", "kurtosis", "entropy", "maxabs")
N_FEATURES = len(CHANNELS) * len(SUBBANDS) * len(STATS)  # 288
SD_FLOOR = 1e-12
_GUARD = 1e-24


def feature_names() -> list:
    return [f"f{i:03d}" for i in range(N_FEATURES)]


def feature_index(channel: int, subband: int, stat: int) -> int:
    return channel * len(SUBBANDS) * len(STATS) + subband * len(STATS) + stat


def describe_feature(index: int) -> str:
    """Human-readable name, e.g. ``Ia.D1.energy``."""
    per_channel = len(SUBBANDS) * len(STATS)
    ch, rest = divmod(index, per_channel)
    sb, st = divmod(rest, len(STATS))
    return f"{CHANNELS[ch]}.{SUBBANDS[sb]}.{STATS[st]}"


def subband_stats(c) -> np.ndarray:
    """mean, sd, rms, energy, skewness, kurtosis, entropy, maxabs of one subband.

    Population moments; kurtosis is non-excess. Skewness and kurtosis are 0
    when the variance is below 1e-24, entropy is 0 when the energy is.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    if n == 0:
        raise ValueError("subband_stats needs at least one coefficient")
    mean = c.sum() / n
    dev = c - mean
    m2 = np.dot(dev, dev) / n
    sq = c * c
    energy = sq.sum()
    if m2 < _GUARD:
        skew = kurt = 0.0
    else:
        dev2 = dev * dev
        skew = (np.dot(dev2, dev) / n) / m2 ** 1.5
        kurt = (np.dot(dev2, dev2) / n) / (m2 * m2)
    if energy < _GUARD:
        entropy = 0.0
    else:
        p = sq / energy
        p = p[p > 0]  # 0 ln 0 := 0, also for squares that underflow after division
        entropy = 0.0 - np.dot(p, np.log(p))
    return np.array([mean, np.sqrt(m2), np.sqrt(energy / n), energy,
                     skew, kurt, entropy, np.abs(c).max()])


def extract_features(samples) -> np.ndarray:
    """288 features of a 6 x 1000 record, ordered channel, subband, statistic."""
    samples = np.asarray(getattr(samples, "samples", samples), dtype=float)
    if samples.shape != (len(CHANNELS), 1000):
        raise ValueError(f"expected a (6, 1000) record, got {samples.shape}")
    out = np.empty(N_FEATURES)
    k = 0
    for channel in samples:
        for band in wavedec5(channel).bands():
            out[k:k + len(STATS)] = subband_stats(band)
            k += len(STATS)
    return out


@dataclass(frozen=True)
class FeatureSet:
    """Feature matrix with labels and record ids, one row per record."""

    record_ids: np.ndarray
    labels: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or len({len(self.values), len(self.labels), len(self.record_ids)}) != 1:
            raise ValueError("feature set arrays disagree in length")

    def __len__(self) -> int:
        return len(self.labels)


def extract_feature_set(records) -> FeatureSet:
    records = list(records)
    values = np.array([extract_features(r.samples) for r in records]).reshape(len(records), N_FEATURES)
    return FeatureSet(np.array([r.id for r in records], dtype=np.int64),
                      np.array([int(r.label) for r in records], dtype=np.int64), values)


@dataclass(frozen=True)
class Normalizer:
    mean: np.ndarray
    sd: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.mean.shape[0]:
            raise ValueError(f"expected {self.mean.shape[0]} features, got {X.shape[-1]}")
        return (X - self.mean) / self.sd


def fit_normalizer(X) -> Normalizer:
    """Population z-score statistics of the training matrix; sd floored at 1e-12."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("fit_normalizer needs a non-empty 2-D training matrix")
    mean = X.mean(axis=0)
    # exact for constant columns, so they normalize to 0 rather than round-off
    const = np.all(X == X[0], axis=0)
    mean[const] = X[0, const]
    sd = np.maximum(X.std(axis=0), SD_FLOOR)
    return Normalizer(mean, sd)


def apply_normalizer(norm: Normalizer, X) -> np.ndarray:
    return norm.apply(X)
