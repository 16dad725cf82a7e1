"""Timing-diagram style trace: one probe per class applied in sequence.

Builds the 3 x (10 columns x 4 features) crossbar model from the first ten
samples of each class and writes one trace CSV per probe, plus a summary.

    python scripts/probe_trace.py --outdir traces/
"""

import argparse
from pathlib import Path

import numpy as np

from apnnsim.cli import trace_model
from apnnsim.config import RunConfig
from apnnsim.crossbar import ElectricalConfig, analog_forward
from apnnsim.data import load_csv, unit_normalize


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default=str(Path(__file__).parents[1] / "data" / "iris.csv"))
    ap.add_argument("--outdir", default="traces")
    ap.add_argument("--method", default="apnn-adaptive-q")
    ap.add_argument("--calibration", default="ideal", choices=("ideal", "circuit_anchored"))
    args = ap.parse_args()

    d = load_csv(args.data)
    cfg = RunConfig(data=args.data, method=args.method)
    model = trace_model(d, cfg, exclude=None)
    elec = ElectricalConfig(calibration=args.calibration)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    print("thresholds:", model.policy.to_dict())
    for c in range(d.n_classes):
        # first sample of the class not used to program the crossbars
        idx = [i for i, s in enumerate(d.samples) if s.label == c][cfg.train_per_class]
        x = np.array(unit_normalize(d.samples[idx]).features)
        pred, trace = analog_forward(model, x, elec, sample_index=idx)
        (out / f"trace_class{c}.csv").write_text(trace.to_csv())
        means = " ".join(f"{m:.2f}" for m in trace.mean_v)
        print(f"probe {idx} (class {c}): mean V [{means}]  WTA {trace.wta_v}  -> class {pred.label}")


if __name__ == "__main__":
    main()
