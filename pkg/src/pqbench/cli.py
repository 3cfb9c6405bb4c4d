"""Command-line entry point: ``pqbench <subcommand> ...``.

Exit status is 0 on success, 1 on I/O or validation failures (with a one-line
diagnostic on stderr) and 2 on usage errors.
"""
import argparse
import json
import sys
from pathlib import Path

from .dataio import (atomic_write, read_dataset, read_features, read_model, write_dataset,
                     write_features, write_model, write_report)
from .evaluation import (benchmark, confusion_csv, evaluate, leaderboard_csv, render_heatmap_svg,
                         top_confusion_pairs, best_svm)
from .features import extract_feature_set
from .models import MODEL_NAMES, ModelSpec, train
from .pipeline import SPLITS, synthesize, write_reports
from .synth.taxonomy import CLASS_NAMES

DEFAULT_SEED = 42


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pqbench", description="Synthetic power-quality event "
                                "benchmark: waveform synthesis, wavelet features, classifiers.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    s = sub.add_parser("synth", help="synthesize a labeled waveform dataset")
    s.add_argument("--out", required=True, type=Path, help="output dataset directory")
    s.add_argument("--per-class", type=_positive_int, default=150, help="records per class (default 150)")
    s.add_argument("--split", choices=sorted(SPLITS), required=True,
                   help="split name; each split draws from its own seed stream")
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="master seed (default 42)")

    f = sub.add_parser("features", help="extract the 288 wavelet features of a dataset")
    f.add_argument("--dataset", required=True, type=Path, help="dataset directory written by synth")
    f.add_argument("--out", required=True, type=Path, help="output features CSV")

    t = sub.add_parser("train", help="train one model on a features CSV")
    t.add_argument("--model", required=True, help=f"model name: {', '.join(sorted(MODEL_NAMES))}")
    t.add_argument("--train", required=True, type=Path, help="training features CSV")
    t.add_argument("--out", required=True, type=Path, help="output model JSON")
    t.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="model seed (default 42)")
    t.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                   help="hyperparameter override, repeatable; VALUE is parsed as JSON when possible")

    e = sub.add_parser("eval", help="evaluate a trained model on a features CSV")
    e.add_argument("--model", required=True, type=Path, help="model JSON written by train")
    e.add_argument("--test", required=True, type=Path, help="test features CSV")
    e.add_argument("--report", required=True, type=Path, help="output report JSON")
    e.add_argument("--heatmap", type=Path, help="output confusion heatmap SVG")
    e.add_argument("--confusion", type=Path, help="output confusion matrix CSV")

    b = sub.add_parser("benchmark", help="train and rank several models")
    b.add_argument("--train", required=True, type=Path, help="training features CSV")
    b.add_argument("--test", required=True, type=Path, help="test features CSV")
    b.add_argument("--out", required=True, type=Path, help="output leaderboard CSV")
    b.add_argument("--reports", required=True, type=Path,
                   help="directory for per-model report JSON, confusion CSV and heatmap SVG")
    b.add_argument("--models", default=",".join(MODEL_NAMES),
                   help="comma-separated model names (default: all nine)")
    b.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="benchmark master seed (default 42)")
    return p


def _cmd_synth(args) -> str:
    records = synthesize(args.per_class, args.split, args.seed)
    write_dataset(records, args.out)
    return f"wrote {len(records)} records to {args.out}"


def _cmd_features(args) -> str:
    fs = extract_feature_set(read_dataset(args.dataset))
    write_features(fs, args.out)
    return f"wrote {len(fs)} feature rows to {args.out}"


def _cmd_train(args) -> str:
    spec = ModelSpec.from_name(args.model, args.seed, **dict(args.param))
    fs = read_features(args.train)
    write_model(train(spec, fs.values, fs.labels), args.out)
    return f"trained {spec.name} on {len(fs)} rows; wrote {args.out}"


def _cmd_eval(args) -> str:
    model = read_model(args.model)
    report = evaluate(model, read_features(args.test))
    write_report(report.to_dict(), args.report)
    if args.heatmap:
        atomic_write(args.heatmap, render_heatmap_svg(report.confusion, title=report.model))
    if args.confusion:
        atomic_write(args.confusion, confusion_csv(report.confusion))
    (i, j), count = top_confusion_pairs(report.confusion, 1)[0]
    return (f"{report.model}: accuracy {report.accuracy:.4f}; "
            f"top confusion {CLASS_NAMES[i]}/{CLASS_NAMES[j]} ({count})")


def _cmd_benchmark(args) -> str:
    names = [n.strip() for n in args.models.split(",") if n.strip()]
    if not names:
        raise ValueError("--models lists no models")
    specs = [ModelSpec.from_name(n) for n in names]
    train_fs, test_fs = read_features(args.train), read_features(args.test)
    board = benchmark(train_fs, test_fs, specs, args.seed)
    atomic_write(args.out, leaderboard_csv(board))
    write_reports(board, args.reports)
    lines = []
    for r in board.reports:
        lines.append(f"{r.model:12s} " + (f"error: {r.error}" if r.failed else f"{r.accuracy:.4f}"))
    if board.flagged_pair:
        (i, j), count = board.flagged_pair
        lines.append(f"best model {board.best.model}: top confusion {CLASS_NAMES[i]}/{CLASS_NAMES[j]} ({count})")
    svm = best_svm(board)
    if svm is not None:
        (i, j), count = top_confusion_pairs(svm.confusion, 1)[0]
        lines.append(f"best SVM {svm.model}: top confusion {CLASS_NAMES[i]}/{CLASS_NAMES[j]} ({count})")
    return "\n".join(lines)


_COMMANDS = {"synth": _cmd_synth, "features": _cmd_features, "train": _cmd_train,
             "eval": _cmd_eval, "benchmark": _cmd_benchmark}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        message = _COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        text = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"pqbench {args.command}: error: {text}", file=sys.stderr)
        return 1
    print(message)
    return 0
