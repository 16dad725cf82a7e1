"""Accuracy ladder of the five classifiers on IRIS (k-fold, fixed seed).

    python scripts/accuracy_ladder.py [--data data/iris.csv] [--seed 42] [--out ladder.json]
"""

import argparse
import json
import time
from pathlib import Path

from apnnsim.data import load_csv
from apnnsim.validation import METHODS, cross_validate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=Path(__file__).parents[1] / "data" / "iris.csv")
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out")
    args = ap.parse_args()

    d = load_csv(args.data)
    rows = {}
    print(f"{'method':<18}{'mean':>8}   per-fold")
    for m in METHODS:
        t = time.perf_counter()
        r = cross_validate(d, m, args.k, args.seed)
        rows[m] = r.to_dict()
        folds = " ".join(f"{a:.3f}" for a in r.fold_accuracies)
        print(f"{m:<18}{r.mean_accuracy:>8.4f}   {folds}  ({time.perf_counter() - t:.2f}s)")
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
