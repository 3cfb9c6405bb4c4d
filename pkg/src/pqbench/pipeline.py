"""End-to-end orchestration: synthesize, extract features, benchmark.

Outputs depend only on the seeds and counts, never on the worker count.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ._rng import derive_seed
from .dataio import (read_dataset, read_features, write_dataset, write_features,
                     write_report, atomic_write)
from .evaluation import (benchmark, confusion_csv, leaderboard_csv, render_heatmap_svg)
from .features import extract_feature_set
from .models import MODEL_NAMES, ModelSpec
from .synth import CircuitConfig, EventClass, generate

SPLITS = {"train": 1, "test": 2}


def split_seed(split: str, seed: int) -> int:
    """Master seed of one split; train and test never share a stream."""
    if split not in SPLITS:
        raise ValueError(f"split must be one of {sorted(SPLITS)}, got {split!r}")
    return derive_seed(SPLITS[split], seed)


def worker_count() -> int:
    raw = os.environ.get("PQBENCH_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PQBENCH_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"PQBENCH_THREADS must be a positive integer, got {raw!r}")
    return n


def _job(args):
    config, cls, seed, index, record_id = args
    return generate(config, cls, seed, index, record_id)


def synthesize(per_class: int, split: str, seed: int, config: CircuitConfig = None,
               workers: int = None) -> list:
    """All records of one split, class-major, ids 0..13*per_class-1."""
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    config = config or CircuitConfig()
    master = split_seed(split, seed)
    jobs = [(config, cls, master, i, int(cls) * per_class + i)
            for cls in EventClass for i in range(per_class)]
    workers = workers or worker_count()
    if workers == 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs, chunksize=8))


@dataclass
class PipelineResult:
    workdir: Path
    leaderboard: object
    paths: dict = field(default_factory=dict)


def default_specs() -> list:
    return [ModelSpec(kind) for kind in MODEL_NAMES.values()]


def run_pipeline(workdir, per_class: int = 150, train_seed: int = 42, test_seed: int = 43,
                 bench_seed: int = 42, specs=None, workers: int = None) -> PipelineResult:
    """Write datasets, feature CSVs, leaderboard and per-model reports under ``workdir``."""
    workdir = Path(workdir)
    paths = {}
    for split, seed in (("train", train_seed), ("test", test_seed)):
        records = synthesize(per_class, split, seed, workers=workers)
        paths[f"{split}_dataset"] = write_dataset(records, workdir / split).parent
        fs = extract_feature_set(read_dataset(workdir / split))
        paths[f"{split}_features"] = write_features(fs, workdir / f"{split}.csv")
    board = benchmark(read_features(paths["train_features"]), read_features(paths["test_features"]),
                      specs or default_specs(), bench_seed)
    paths["leaderboard"] = atomic_write(workdir / "leaderboard.csv", leaderboard_csv(board))
    write_reports(board, workdir / "reports")
    return PipelineResult(workdir, board, paths)


def write_reports(board, directory) -> None:
    directory = Path(directory)
    for r in board.reports:
        write_report(r.to_dict(), directory / f"{r.model}.json")
        if not r.failed:
            atomic_write(directory / f"{r.model}.confusion.csv", confusion_csv(r.confusion))
            atomic_write(directory / f"{r.model}.svg", render_heatmap_svg(r.confusion, title=r.model))
