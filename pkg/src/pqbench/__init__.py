"""Synthetic power-quality event benchmark: waveform synthesis, db4 wavelet
features, from-scratch classifiers, and confusion analysis."""

__version__ = "0.1.0"
