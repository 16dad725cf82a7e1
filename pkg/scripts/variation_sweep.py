"""Accuracy under multiplicative conductance variation, averaged over noise seeds.

    python scripts/variation_sweep.py --sigmas 0,0.02,0.05,0.1,0.2 --seeds 20
"""

import argparse
from pathlib import Path

from apnnsim.cli import sweep_rows
from apnnsim.config import RunConfig
from apnnsim.data import load_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=str(Path(__file__).parents[1] / "data" / "iris.csv"))
    ap.add_argument("--method", default="apnn-adaptive-q")
    ap.add_argument("--sigmas", default="0,0.02,0.05,0.1,0.2")
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    values = [float(v) for v in args.sigmas.split(",")]
    cfg = RunConfig(data=args.data, method=args.method, parameter="variation_sigma",
                    values=values, n_seeds=args.seeds)
    print(f"{'sigma':>6} {'mean':>8} {'std':>8}")
    for v, m, s in sweep_rows(load_csv(args.data), cfg):
        print(f"{v:>6.3f} {m:>8.4f} {s:>8.4f}")


if __name__ == "__main__":
    main()
