"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 training error.
Diagnostics go to stderr; stdout carries one summary line per command
(``report`` prints its table).
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import ConfigError, DataError, TrainingError
from .evaluation import evaluate_cv, greedy_select, grid_search, lowo_folds
from .features import FeatureSpec, assemble_matrix
from .ingest import PipelineConfig, run_pipeline
from .models import FAMILIES, fit_model, save_model
from .synth import SynthWellSpec, gen_benchmark, write_raw

log = logging.getLogger("rocktype")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_TRAIN = 0, 2, 3, 4

DEFAULTS = {
    "seed": 7,
    "jobs": None,
    "out": "out",
    "log_level": "WARNING",
    "pipeline": {"root": ".", "mwd_dir": "raw/mwd", "lithology": "raw/lithology.csv",
                 "bounds": "raw/bounds.csv", "cache_dir": "cache", "max_bad_fraction": 0.01},
    "features": {"families": "B+D+L", "lag_distances": [0.1, 0.5, 1.0, 10.0], "rolling_window": 1.0,
                 "extra_lags": [20.0, 50.0], "math_window": 5, "columns": []},
    "model": {"family": "gbdt", "params": {"learning_rate": 0.05, "n_trees": 100, "max_depth": 3,
                                           "subspace_share": 0.8, "subsample_rate": 0.55}},
    "simulate": {"wells": 8, "n_bins": 1000, "jitter": 0.1, "missing_rate": 0.02},
    "select": {"pool": None, "max_features": None},
    "grid": None,
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def resolve_config(args):
    """Defaults <- config file <- command-line flags."""
    cfg = copy.deepcopy(DEFAULTS)
    base = Path.cwd()
    if args.config:
        path = Path(args.config)
        try:
            user = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        unknown = set(user) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = _merge(cfg, user)
        base = path.resolve().parent
    cfg["pipeline"]["root"] = str((base / cfg["pipeline"]["root"]).resolve())
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.jobs is not None:
        cfg["jobs"] = args.jobs
    if args.out is not None:
        cfg["out"] = args.out
    for flag, key, sub in (("families", "families", "features"), ("model", "family", "model")):
        v = getattr(args, flag, None)
        if v is not None:
            cfg[sub][key] = v
    if getattr(args, "wells", None) is not None:
        cfg["simulate"]["wells"] = args.wells
    if getattr(args, "n_bins", None) is not None:
        cfg["simulate"]["n_bins"] = args.n_bins
    if cfg["jobs"] is None:
        cfg["jobs"] = os.cpu_count() or 1
    if cfg["jobs"] < 1:
        raise ConfigError("--jobs must be >= 1")
    if cfg["model"]["family"] not in FAMILIES:
        raise ConfigError(f"unknown model family {cfg['model']['family']!r}; expected one of {FAMILIES}")
    if cfg["model"]["family"] in ("gbdt", "mlp"):
        cfg["model"]["params"].setdefault("seed", cfg["seed"])
    if cfg["model"]["family"] in ("majority", "prior"):
        cfg["model"]["params"] = {}
    elif cfg["model"]["family"] == "logistic":
        cfg["model"]["params"] = {k: v for k, v in cfg["model"]["params"].items()
                                  if k in ("l2_penalty", "max_iter", "tol")}
    cfg["out"] = str(Path(cfg["out"]).resolve())
    return cfg


def _feature_spec(cfg):
    f = dict(cfg["features"])
    return FeatureSpec.parse(f.pop("families"), **f)


def _write_resolved(cfg, out):
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.json").write_text(json.dumps(cfg, indent=1, sort_keys=True) + "\n",
                                              encoding="utf-8")


def _frames(cfg):
    pc = PipelineConfig.from_dict(cfg["pipeline"], base="/")
    try:
        result = run_pipeline(pc, jobs=cfg["jobs"])
    except OSError as exc:
        raise DataError(str(exc)) from exc
    log.info("pipeline: %d frames, %d stages executed", len(result.frames), len(result.executed))
    return result


def _matrix(cfg):
    frames = _frames(cfg).frames
    if not frames:
        raise DataError("no wells found by the preprocessing pipeline")
    return assemble_matrix(frames, _feature_spec(cfg))


# ---------------------------------------------------------------- commands

def cmd_simulate(cfg):
    sim = cfg["simulate"]
    if sim["wells"] < 2:
        raise ConfigError("--wells must be >= 2 (leave-one-well-out needs two wells)")
    template = SynthWellSpec(n_bins=sim["n_bins"], missing_rate=sim["missing_rate"])
    frames = gen_benchmark(sim["wells"], template, seed=cfg["seed"], jitter=sim["jitter"])
    out = Path(cfg["out"])
    write_raw(frames, out)
    run_cfg = {"pipeline": {"root": "."}, "seed": cfg["seed"]}
    (out / "config.json").write_text(json.dumps(run_cfg, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    _write_resolved(cfg, out)
    share = float(np.concatenate([f.labels for f in frames]).mean())
    print(f"simulated {len(frames)} wells into {out}; pooled shale share {share:.4f}")


def cmd_preprocess(cfg):
    result = _frames(cfg)
    _write_resolved(cfg, Path(cfg["out"]))
    bad = sum(len(r.bad_rows) for r in result.reports)
    print(f"preprocessed {len(result.frames)} laterals; {len(result.executed)} stages executed; "
          f"{bad} malformed rows skipped")


def cmd_featurize(cfg):
    matrix = _matrix(cfg)
    out = Path(cfg["out"])
    _write_resolved(cfg, out)
    out.mkdir(parents=True, exist_ok=True)
    matrix.to_csv(out / "features.csv")
    print(f"wrote {len(matrix)} rows x {len(matrix.columns)} features to {out / 'features.csv'}")


def cmd_train(cfg):
    matrix = _matrix(cfg)
    model = fit_model(cfg["model"]["family"], matrix, cfg["model"]["params"])
    out = Path(cfg["out"])
    _write_resolved(cfg, out)
    path = save_model(model, out / "model.json")
    print(f"trained {model.family} on {len(matrix)} rows; saved {path}")


def _write_report(report, cfg, t0, extra=None):
    out = Path(cfg["out"])
    _write_resolved(cfg, out)
    stamp = {"utc": datetime.now(timezone.utc).isoformat(), "runtime_s": time.perf_counter() - t0}
    extra = dict(extra or {})
    extra["features"] = cfg["features"]
    extra["seed"] = cfg["seed"]
    report.write(out, extra=extra, timestamp=stamp)
    p = report.pooled
    print(f"{report.family} [{cfg['features']['families']}] ROC AUC {_f(p['roc_auc'])} "
          f"PR AUC {_f(p['pr_auc'])} Accuracy L {_f(p['accuracy_l'])} -> {out / 'report.json'}")


def cmd_run_experiment(cfg):
    t0 = time.perf_counter()
    matrix = _matrix(cfg)
    folds = lowo_folds(matrix)
    family, params = cfg["model"]["family"], dict(cfg["model"]["params"])
    grid_table = None
    if cfg.get("grid"):
        best, grid_table = grid_search(matrix, family, cfg["grid"], folds, params, jobs=cfg["jobs"])
        params = best
    report = evaluate_cv(matrix, family, params, folds, jobs=cfg["jobs"])
    report.grid = grid_table
    _write_report(report, cfg, t0)


def cmd_select_features(cfg):
    t0 = time.perf_counter()
    matrix = _matrix(cfg)
    folds = lowo_folds(matrix)
    pool = cfg["select"]["pool"] or list(matrix.columns)
    missing = [c for c in pool if c not in matrix.columns]
    if missing:
        raise ConfigError(f"selection pool has columns outside the feature families: {missing}")
    family, params = cfg["model"]["family"], cfg["model"]["params"]
    sel = greedy_select(matrix, pool, family, params, folds, jobs=cfg["jobs"],
                        max_features=cfg["select"]["max_features"])
    if sel.selected:
        report = evaluate_cv(matrix.select(sel.selected), family, params, folds, jobs=cfg["jobs"])
    else:
        log.warning("no candidate beat the no-feature baseline; reporting the majority model")
        report = evaluate_cv(matrix.select([]), "majority", {}, folds)
    report.selection = sel.to_dict()
    _write_report(report, cfg, t0)


def _f(v, nd=3):
    return "n/a" if v is None else f"{v:.{nd}f}"


def render_report(report):
    """Plain-text table in the layout of a feature-set / algorithm comparison."""
    p = report["pooled"]
    fams = report.get("features", {}).get("families", "")
    lines = [f"{'Configuration':<28} {'ROC AUC':>8} {'PR AUC':>8} {'Accuracy L':>11}",
             "-" * 58,
             f"{'Always predict major class':<28} {'':>8} {_f(report['shale_share']):>8} "
             f"{_f(p['accuracy_l_major']):>11}",
             f"{(report['family'] + ' ' + fams)[:28]:<28} {_f(p['roc_auc']):>8} {_f(p['pr_auc']):>8} "
             f"{_f(p['accuracy_l']):>11}"]
    if report.get("grid"):
        lines += ["", "Grid search (pooled LOWO-CV)"]
        for row in report["grid"]:
            desc = ", ".join(f"{k}={v}" for k, v in sorted(row["params"].items()) if k != "seed")
            lines.append(f"  {desc:<60} {_f(row['roc_auc'])} {_f(row['pr_auc'])} {_f(row['accuracy_l'])}")
    if report.get("selection"):
        lines += ["", "Greedy selection (step, feature, pooled ROC AUC)"]
        lines.append(f"  {0:>3} {'(none)':<30} {_f(report['selection']['baseline'])}")
        for i, step in enumerate(report["selection"]["trace"], 1):
            lines.append(f"  {i:>3} {step['feature']:<30} {_f(step['roc_auc'])}")
    lines += ["", f"{'Well':<8} {'Shale share':>11} {'AccL model':>11} {'AccL major':>11} {'Improvement':>12}"]
    for f in report["folds"]:
        if f["flagged"]:
            lines.append(f"{f['test_well']:<8} excluded: {f.get('error', '')}")
            continue
        lines.append(f"{f['test_well']:<8} {_f(f['shale_share']):>11} {_f(f['accuracy_l']):>11} "
                     f"{_f(f['accuracy_l_major']):>11} {f['accuracy_l'] - f['accuracy_l_major']:>+12.3f}")
    return "\n".join(lines)


def cmd_report(cfg, path=None):
    path = Path(path) if path else Path(cfg["out"]) / "report.json"
    try:
        report = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read report {path}: {exc}") from exc
    print(render_report(report))


COMMANDS = {
    "simulate": cmd_simulate,
    "preprocess": cmd_preprocess,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "evaluate": cmd_run_experiment,
    "select-features": cmd_select_features,
    "report": cmd_report,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--jobs", type=int, help="worker cap (default: available CPUs)")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="count", default=0)
    parser = argparse.ArgumentParser(prog="rocktype", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="write a synthetic benchmark as raw CSVs")
    p.add_argument("--wells", type=int)
    p.add_argument("--n-bins", type=int, dest="n_bins")
    sub.add_parser("preprocess", parents=[common], help="run the cached preprocessing pipeline")
    for name, text in (("featurize", "write features.csv"), ("train", "fit one model on all wells"),
                       ("evaluate", "leave-one-well-out evaluation (optionally with grid search)"),
                       ("select-features", "greedy forward feature selection")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--families", help='feature families, e.g. "B+D+L" or "-" for none')
        if name != "featurize":
            p.add_argument("--model", help=f"model family: {', '.join(FAMILIES)}")
    p = sub.add_parser("report", parents=[common], help="render report.json as a text table")
    p.add_argument("report", nargs="?", help="path to report.json (default: <out>/report.json)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        level = cfg["log_level"] if not args.verbose else ("INFO" if args.verbose == 1 else "DEBUG")
        logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        if args.command == "report":
            cmd_report(cfg, args.report)
        else:
            COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"rocktype {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"rocktype {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrainingError as exc:
        print(f"rocktype {args.command}: training error: {exc}", file=sys.stderr)
        return EXIT_TRAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
