"""Five-level periodized db4 discrete wavelet transform."""
from dataclasses import dataclass

import numpy as np

# Daubechies scaling filter with 4 vanishing moments (8 taps).
_DB4_LOWPASS = (
    0.2303778133088965008633,
    0.7148465705529156470899,
    0.6308807679298589078817,
    -0.02798376941685985421141,
    -0.1870348117190930840796,
    0.03084138183556076362722,
    0.03288301166688519973541,
    -0.01059740178506903210488,
)

SIGNAL_LENGTH = 1000
PADDED_LENGTH = 1024
PAD = (PADDED_LENGTH - SIGNAL_LENGTH) // 2
LEVELS = 5
SUBBANDS = ("D1", "D2", "D3", "D4", "D5", "A5")


class FilterError(RuntimeError):
    pass


@dataclass(frozen=True)
class WaveletFilters:
    h: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class SubbandSet:
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    D4: np.ndarray
    D5: np.ndarray
    A5: np.ndarray

    def bands(self) -> tuple:
        """Coefficient arrays in the order D1..D5, A5."""
        return (self.D1, self.D2, self.D3, self.D4, self.D5, self.A5)

    def energy(self) -> float:
        return float(sum(np.dot(b, b) for b in self.bands()))


def check_filters(h, g) -> None:
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    k = np.arange(8)
    problems = []
    if abs(h.sum() - np.sqrt(2.0)) > 1e-12:
        problems.append("sum(h) != sqrt(2)")
    if abs(np.dot(h, h) - 1.0) > 1e-12:
        problems.append("sum(h^2) != 1")
    for m in (1, 2, 3):
        if abs(np.dot(h[: 8 - 2 * m], h[2 * m:])) > 1e-12:
            problems.append(f"shift-{2 * m} autocorrelation nonzero")
    if not np.array_equal(g, ((-1.0) ** k) * h[::-1]):
        problems.append("g is not the quadrature mirror of h")
    for p in range(4):
        if abs(np.sum(((-1.0) ** k) * k ** p * h)) > 1e-10:
            problems.append(f"vanishing moment {p} violated")
    if problems:
        raise FilterError("db4 filter self-check failed: " + "; ".join(problems))


def db4_filters() -> WaveletFilters:
    h = np.array(_DB4_LOWPASS)
    g = ((-1.0) ** np.arange(8)) * h[::-1]
    check_filters(h, g)
    return WaveletFilters(h, g)


_FILTERS = db4_filters()


def pad_to_1024(x) -> np.ndarray:
    """Whole-sample symmetric extension by 12 samples on each side."""
    x = np.asarray(x, dtype=float)
    if x.shape != (SIGNAL_LENGTH,):
        raise ValueError(f"expected {SIGNAL_LENGTH} samples, got shape {x.shape}")
    return np.concatenate([x[PAD:0:-1], x, x[-2:-PAD - 2:-1]])


def analysis_step(x, filters: WaveletFilters = _FILTERS):
    """One periodized convolution-decimation stage; returns (approx, detail)."""
    x = np.asarray(x, dtype=float)
    n2 = x.shape[-1]
    if x.ndim != 1 or n2 % 2 or n2 < 8:
        raise ValueError(f"analysis_step needs an even length >= 8, got {x.shape}")
    idx = (2 * np.arange(n2 // 2)[:, None] + np.arange(8)[None, :]) % n2
    windows = x[idx]
    return windows @ filters.h, windows @ filters.g


def wavedec5(x, filters: WaveletFilters = _FILTERS) -> SubbandSet:
    x = np.asarray(x, dtype=float)
    if x.shape == (SIGNAL_LENGTH,) and not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    a = pad_to_1024(x)
    details = []
    for _ in range(LEVELS):
        a, d = analysis_step(a, filters)
        details.append(d)
    return SubbandSet(*details, a)
