"""Full desk-scale benchmark: 13 classes x 150 train + 150 test, all nine models.

Usage: python3 scripts/run_benchmark.py [--workdir DIR] [--per-class N]
"""
import argparse
import time

from pqbench.evaluation import best_svm, top_confusion_pairs
from pqbench.pipeline import run_pipeline
from pqbench.synth.taxonomy import CLASS_NAMES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="runs/full")
    ap.add_argument("--per-class", type=int, default=150)
    ap.add_argument("--train-seed", type=int, default=42)
    ap.add_argument("--test-seed", type=int, default=43)
    args = ap.parse_args()

    t0 = time.perf_counter()
    result = run_pipeline(args.workdir, args.per_class, args.train_seed, args.test_seed)
    wall = time.perf_counter() - t0
    board = result.leaderboard
    print(f"{'model':12s} {'accuracy':>9s} {'train s':>8s} {'predict s':>9s}  top pair")
    for r in board.reports:
        if r.failed:
            print(f"{r.model:12s} error: {r.error}")
            continue
        (i, j), n = top_confusion_pairs(r.confusion, 1)[0]
        print(f"{r.model:12s} {r.accuracy:9.4f} {r.train_seconds:8.2f} {r.predict_seconds:9.3f}  "
              f"{CLASS_NAMES[i]}/{CLASS_NAMES[j]} ({n})")
    svm = best_svm(board)
    if svm is not None:
        pairs = top_confusion_pairs(svm.confusion, 2)
        print(f"best SVM {svm.model}: top pairs " +
              ", ".join(f"{CLASS_NAMES[i]}/{CLASS_NAMES[j]} ({n})" for (i, j), n in pairs))
    print(f"total wall time {wall:.1f} s; outputs in {result.workdir}")


if __name__ == "__main__":
    main()
