"""Command-line entry point: ``apnn {cv,trace,sweep,cost}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from .apnn import ApnnModel, ThresholdPolicy, TrainingSet, build_crossbars, theta_grid, \
    train_adaptive_thresholds, train_fixed_threshold
from .config import SWEEP_PARAMETERS, RunConfig, dump_json, load_config_file, resolve, write_atomic
from .cost import estimate, table_with_overrides
from .crossbar import CIRCUIT_ANCHORED, IDEAL, analog_forward
from .data import Dataset, load_csv, normalize_dataset, unit_normalize, Sample
from .validation import METHODS, cross_validate, evaluate_folds, fit_folds

log = logging.getLogger("apnnsim")


class StageError(RuntimeError):
    def __init__(self, stage: str, err: Exception):
        super().__init__(f"{stage} failed: {err}")
        self.stage = stage


def _load(cfg: RunConfig) -> Dataset:
    if cfg.data is None:
        raise StageError("load", ValueError("--data is required"))
    try:
        return load_csv(cfg.data)
    except (OSError, ValueError) as e:
        raise StageError("load", e) from e


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def cmd_cv(cfg: RunConfig) -> dict:
    d = _load(cfg)
    try:
        report = cross_validate(d, cfg.method, cfg.k, cfg.seed, quantizer=cfg.quantizer,
                                grid_size=cfg.theta_grid_size)
    except ValueError as e:
        raise StageError("cross-validation", e) from e
    out = report.to_dict()
    out["label_names"] = list(d.label_names)
    out["config"] = cfg.to_dict()
    _emit(cfg, dump_json(out))
    return out


def trace_model(d: Dataset, cfg: RunConfig, exclude: int | None) -> ApnnModel:
    """Model from the first ``train_per_class`` samples of each class in file order."""
    picked = []
    for c in range(d.n_classes):
        members = [i for i, s in enumerate(d.samples) if s.label == c and i != exclude]
        if len(members) < cfg.train_per_class:
            raise ValueError(f"class {c} has {len(members)} samples, need {cfg.train_per_class}")
        picked += members[:cfg.train_per_class]
    train = normalize_dataset(d).subset(picked)
    q = cfg.quantizer if cfg.method.endswith("-q") else None
    if cfg.method.startswith("pnn"):
        raise ValueError("trace needs an APNN method")
    if cfg.theta is not None:
        policy = ThresholdPolicy.fixed(cfg.theta)
    else:
        ts = TrainingSet.from_dataset(train, q)
        grid = theta_grid(cfg.theta_grid_size)
        fit = train_adaptive_thresholds(ts, grid) if cfg.method == "apnn-adaptive-q" \
            else train_fixed_threshold(ts, grid)
        policy = fit.policy
    return ApnnModel(build_crossbars(train, q), policy, 1.0, q)


def cmd_trace(cfg: RunConfig, probe=None) -> str:
    """Record the analog chain for one probe; ``probe`` overrides the dataset sample."""
    d = _load(cfg)
    try:
        if probe is None:
            if not 0 <= cfg.sample_index < len(d):
                raise ValueError(f"sample index {cfg.sample_index} out of range [0, {len(d)})")
            x = unit_normalize(d.samples[cfg.sample_index], cfg.sample_index).features
            exclude = cfg.sample_index
        else:
            x = unit_normalize(Sample(tuple(float(v) for v in probe), 0)).features
            exclude = None
        model = trace_model(d, cfg, exclude)
        _, trace = analog_forward(model, np.array(x), cfg.electrical_config(), cfg.sample_index)
    except ValueError as e:
        raise StageError("trace", e) from e
    text = trace.to_csv()
    _emit(cfg, text)
    return text


def sweep_rows(d: Dataset, cfg: RunConfig) -> list[tuple[float, float, float]]:
    """(value, mean accuracy, std) per sweep value.

    For ``variation_sigma`` the spread is over ``n_seeds`` noise seeds with the
    folds trained once; otherwise it is over folds.
    """
    if cfg.parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {cfg.parameter!r}")
    if not cfg.values:
        raise ValueError("sweep needs at least one value")
    rows = []
    if cfg.parameter == "variation_sigma":
        folds = fit_folds(d, cfg.method, cfg.k, cfg.seed, quantizer=cfg.quantizer,
                          grid_size=cfg.theta_grid_size)
        base = cfg.electrical_config()
        for v in cfg.values:
            seeds = range(cfg.n_seeds) if v > 0 else range(1)
            accs = [evaluate_folds(d, cfg.method, cfg.k, cfg.seed, folds,
                                   base.with_(variation_sigma=float(v), seed=s)).mean_accuracy
                    for s in seeds]
            rows.append((float(v), float(np.mean(accs)) if len(accs) > 1 else accs[0], float(np.std(accs))))
        return rows
    for v in cfg.values:
        if cfg.parameter == "theta":
            if not cfg.method.startswith("apnn"):
                raise ValueError("theta sweep needs an APNN method")
            r = cross_validate(d, cfg.method, cfg.k, cfg.seed, quantizer=cfg.quantizer,
                               fixed_theta=float(v))
        else:
            q = replace(cfg, n_levels=int(v)).quantizer
            r = cross_validate(d, cfg.method, cfg.k, cfg.seed, quantizer=q,
                               grid_size=cfg.theta_grid_size)
        rows.append((float(v), r.mean_accuracy, float(np.std(r.fold_accuracies))))
    return rows


def cmd_sweep(cfg: RunConfig) -> str:
    d = _load(cfg)
    try:
        rows = sweep_rows(d, cfg)
    except ValueError as e:
        raise StageError("sweep", e) from e
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "mean_accuracy", "std_accuracy"])
    for v, m, s in rows:
        w.writerow([repr(v), repr(m), repr(s)])
    _emit(cfg, buf.getvalue())
    return buf.getvalue()


def cmd_cost(cfg: RunConfig) -> dict:
    try:
        report = estimate(cfg.classes, table_with_overrides(cfg.cost_overrides))
    except ValueError as e:
        raise StageError("cost", e) from e
    out = report.to_dict()
    out["config"] = cfg.to_dict()
    _emit(cfg, dump_json(out))
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _json_obj(text: str) -> dict:
    try:
        val = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"malformed JSON: {e}") from None
    if not isinstance(val, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="dataset CSV")
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="JSON run-config file")
    common.add_argument("-v", "--verbose", action="store_true")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--method", choices=METHODS)
    model.add_argument("--k", type=int)
    model.add_argument("--levels", dest="n_levels", type=int, help="quantizer levels")
    model.add_argument("--theta-grid", dest="theta_grid_size", type=int,
                       help="threshold grid size G (thresholds k/G)")

    elec = argparse.ArgumentParser(add_help=False)
    elec.add_argument("--calibration", choices=(IDEAL, CIRCUIT_ANCHORED))
    elec.add_argument("--variation-sigma", type=float)
    elec.add_argument("--noise-seed", type=int)
    elec.add_argument("--r-ivc", type=float)
    elec.add_argument("--vref", type=float)

    p = argparse.ArgumentParser(prog="apnn", description="APNN behavioral simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("cv", parents=[common, model], help="k-fold accuracy report (JSON)")
    t = sub.add_parser("trace", parents=[common, model, elec], help="analog trace of one inference (CSV)")
    t.add_argument("--sample", dest="sample_index", type=int)
    t.add_argument("--train-per-class", type=int)
    t.add_argument("--theta", type=float, help="fixed threshold instead of training")
    t.add_argument("--probe", type=_float_list, help="custom input vector, comma-separated")
    s = sub.add_parser("sweep", parents=[common, model, elec], help="accuracy vs one parameter (CSV)")
    s.add_argument("--param", dest="parameter", choices=SWEEP_PARAMETERS)
    s.add_argument("--values", type=_float_list)
    s.add_argument("--n-seeds", type=int)
    c = sub.add_parser("cost", parents=[common], help="power/area report (JSON)")
    c.add_argument("--classes", type=int)
    c.add_argument("--override", dest="cost_overrides", type=_json_obj,
                   help='JSON, e.g. \'{"ivc": {"power": 1e-3}}\'')
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items()
             if k not in ("command", "config", "verbose", "probe", "calibration", "variation_sigma",
                          "noise_seed", "r_ivc", "vref")}
    elec = {
        "calibration": getattr(args, "calibration", None),
        "variation_sigma": getattr(args, "variation_sigma", None),
        "seed": getattr(args, "noise_seed", None),
        "r_ivc": getattr(args, "r_ivc", None),
        "vref_wta": getattr(args, "vref", None),
    }
    flags["electrical"] = {k: v for k, v in elec.items() if v is not None} or None
    return resolve(file_values, flags)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (OSError, ValueError, TypeError) as e:
        parser.error(f"config: {e}")
    try:
        if args.command == "cv":
            cmd_cv(cfg)
        elif args.command == "trace":
            cmd_trace(cfg, args.probe)
        elif args.command == "sweep":
            cmd_sweep(cfg)
        else:
            cmd_cost(cfg)
    except StageError as e:
        print(f"apnn {args.command}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
