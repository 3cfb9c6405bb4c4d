"""Canonical on-disk formats for datasets, features, models and reports.

Every writer produces identical bytes for identical values: sorted JSON keys,
shortest round-trip float text, little-endian doubles. Files are written to a
temporary name and renamed into place.
"""
import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .features import N_FEATURES, FeatureSet, feature_names
from .models.base import TrainedModel, model_from_dict, model_to_dict
from .synth.params import CHANNELS, N_SAMPLES, SAMPLE_RATE, CircuitConfig, SynthParams
from .synth.taxonomy import CLASS_NAMES, EventClass
from .synth.waveform import WaveformRecord

DATASET_FORMAT_VERSION = 1
MANIFEST = "manifest.json"
BLOB = "waveforms.f64le"
RECORD_BYTES = len(CHANNELS) * N_SAMPLES * 8


class DataFormatError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False, allow_nan=False) + "\n"


def atomic_write(path, data) -> Path:
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def digest64(data: bytes) -> str:
    """64-bit content hash as 16 hex digits."""
    return hashlib.blake2b(data, digest_size=8).hexdigest()


# --- waveform datasets ----------------------------------------------------------------

def write_dataset(records, directory, config: CircuitConfig = None) -> Path:
    """Write ``manifest.json`` and ``waveforms.f64le``; return the manifest path."""
    records = list(records)
    if not records:
        raise ValueError("write_dataset needs at least one record")
    config = config or CircuitConfig()
    directory = Path(directory)
    entries = []
    blob = bytearray()
    for k, r in enumerate(records):
        samples = np.asarray(r.samples, dtype="<f8")
        if samples.shape != (len(CHANNELS), N_SAMPLES) or not np.all(np.isfinite(samples)):
            raise ValueError(f"record {r.id}: samples must be finite with shape (6, 1000)")
        entries.append({"id": int(r.id), "label": int(r.label), "params": r.params.to_dict(),
                        "offset": k * RECORD_BYTES})
        blob += samples.tobytes()
    manifest = {
        "format_version": DATASET_FORMAT_VERSION,
        "sample_rate": SAMPLE_RATE,
        "samples_per_channel": N_SAMPLES,
        "channel_order": list(CHANNELS),
        "class_names": list(CLASS_NAMES),
        "circuit": asdict(config),
        "records": entries,
    }
    atomic_write(directory / BLOB, bytes(blob))
    return atomic_write(directory / MANIFEST, canonical_json(manifest))


def read_dataset(directory) -> list:
    directory = Path(directory)
    try:
        manifest = json.loads((directory / MANIFEST).read_text("utf-8"))
    except FileNotFoundError:
        raise DataFormatError(f"{directory}: missing {MANIFEST}") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{directory / MANIFEST}: corrupt JSON ({exc})") from None
    if manifest.get("format_version") != DATASET_FORMAT_VERSION:
        raise DataFormatError(f"unsupported dataset format version {manifest.get('format_version')!r}")
    expected = {"sample_rate": SAMPLE_RATE, "samples_per_channel": N_SAMPLES,
                "channel_order": list(CHANNELS), "class_names": list(CLASS_NAMES)}
    for key, value in expected.items():
        if manifest.get(key) != value:
            raise DataFormatError(f"manifest field {key!r} is {manifest.get(key)!r}, expected {value!r}")
    try:
        blob = (directory / BLOB).read_bytes()
    except FileNotFoundError:
        raise DataFormatError(f"{directory}: missing {BLOB}") from None
    entries = manifest.get("records") or []
    if not entries:
        raise DataFormatError("manifest lists no records")
    if len(blob) < len(entries) * RECORD_BYTES:
        bad = len(blob) // RECORD_BYTES
        raise DataFormatError(f"waveform blob truncated: record index {bad} (id {entries[bad]['id']}) "
                              f"is incomplete ({len(blob)} of {len(entries) * RECORD_BYTES} bytes)")
    if len(blob) > len(entries) * RECORD_BYTES:
        raise DataFormatError(f"waveform blob has {len(blob)} bytes, expected {len(entries) * RECORD_BYTES}")
    records = []
    for k, entry in enumerate(entries):
        if entry.get("offset") != k * RECORD_BYTES:
            raise DataFormatError(f"record index {k}: offset {entry.get('offset')!r}, expected {k * RECORD_BYTES}")
        try:
            label = EventClass(entry["label"])
            params = SynthParams.from_dict(entry["params"])
            params.validate(label)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"record index {k}: invalid entry ({exc})") from None
        samples = np.frombuffer(blob, dtype="<f8", count=len(CHANNELS) * N_SAMPLES,
                                offset=entry["offset"]).reshape(len(CHANNELS), N_SAMPLES).astype(float)
        if not np.all(np.isfinite(samples)):
            raise DataFormatError(f"record index {k}: non-finite samples")
        records.append(WaveformRecord(int(entry["id"]), label, params, samples))
    return records


# --- feature CSV ----------------------------------------------------------------------

FEATURE_HEADER = ["record_id", "label"] + feature_names()


def features_to_csv(fs: FeatureSet) -> str:
    buf = io.StringIO()
    buf.write(",".join(FEATURE_HEADER) + "\n")
    for rid, label, row in zip(fs.record_ids, fs.labels, fs.values):
        buf.write(f"{int(rid)},{int(label)}," + ",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def write_features(fs: FeatureSet, path) -> Path:
    if fs.values.shape[1] != N_FEATURES:
        raise ValueError(f"feature rows must have {N_FEATURES} values")
    return atomic_write(path, features_to_csv(fs))


def features_from_csv(text: str, source: str = "<features>") -> FeatureSet:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != FEATURE_HEADER:
        got = "missing" if header is None else f"{len(header)} columns starting {header[:3]}"
        raise DataFormatError(f"{source}: bad header ({got}); expected record_id,label,f000..f{N_FEATURES - 1:03d}")
    ids, labels, rows = [], [], []
    for line_no, row in enumerate(reader, start=2):
        if len(row) != len(FEATURE_HEADER):
            raise DataFormatError(f"{source}: row {line_no} has {len(row)} columns, expected {len(FEATURE_HEADER)}")
        try:
            ids.append(int(row[0]))
            label = int(row[1])
            values = [float(v) for v in row[2:]]
        except ValueError as exc:
            raise DataFormatError(f"{source}: row {line_no}: {exc}") from None
        if not 0 <= label < len(CLASS_NAMES):
            raise DataFormatError(f"{source}: row {line_no}: label {label} is not a class code")
        if not all(np.isfinite(values)):
            raise DataFormatError(f"{source}: row {line_no}: non-finite feature value")
        labels.append(label)
        rows.append(values)
    if not rows:
        raise DataFormatError(f"{source}: no feature rows")
    return FeatureSet(np.array(ids, dtype=np.int64), np.array(labels, dtype=np.int64),
                      np.array(rows, dtype=float))


def read_features(path) -> FeatureSet:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except FileNotFoundError:
        raise DataFormatError(f"{path}: no such file") from None
    return features_from_csv(text, str(path))


# --- models and reports ---------------------------------------------------------------

def model_json(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def write_model(model: TrainedModel, path) -> Path:
    return atomic_write(path, model_json(model))


def read_model(path) -> TrainedModel:
    path = Path(path)
    try:
        d = json.loads(path.read_text("utf-8"))
    except FileNotFoundError:
        raise DataFormatError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: corrupt model JSON ({exc})") from None
    try:
        return model_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: invalid model ({exc})") from None


def write_report(report: dict, path) -> Path:
    return atomic_write(path, canonical_json(report))
