"""Command-line entry point: ``mcswap generate | experiment | capacity``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .data import DataError, generate_xor, save_csv
from .experiment import (
    ConfigError,
    ExperimentConfig,
    capacity_sweep,
    format_table,
    load_config,
    run_experiment,
)
from .noise import PoleDegenerateError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _resolve_config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "seed": args.seed,
        "shots": args.shots,
        "noise": args.noise,
        "mode": args.mode,
        "out": args.out,
    }
    for key in ("classes", "features", "per_class", "spread", "data_seed"):
        if hasattr(args, key):
            overrides[
                {"classes": "n_classes", "features": "n_features",
                 "per_class": "points_per_class"}.get(key, key)
            ] = getattr(args, key)
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_generate(args):
    cfg = _resolve_config(args)
    ds = generate_xor(
        cfg.n_classes, cfg.n_features, cfg.points_per_class, cfg.spread, cfg.data_seed
    )
    out = cfg.out or f"xor{cfg.n_classes}.csv"
    save_csv(ds, out)
    sep = np.degrees(ds.metadata["min_pair_separation"])
    print(
        f"wrote {out}: M={ds.n_samples} N={ds.n_features} L={ds.n_classes} "
        f"min pair separation={sep:.2f} deg"
    )
    return EXIT_OK


def cmd_experiment(args):
    cfg = _resolve_config(args).validate()
    result = run_experiment(cfg)
    print(f"{result['dataset']['name']}: {result['split']['kind']} "
          f"({result['split']['n_folds']} folds), mode={cfg.mode}, encoding={cfg.encoding}")
    print(format_table(result))
    if cfg.out:
        _write_json(result, cfg.out)
        print(f"results written to {cfg.out}")
    return EXIT_RUNTIME if result["partial"] else EXIT_OK


def cmd_capacity(args):
    r = np.asarray(args.r, dtype=float)
    if r.shape != (3,):
        raise ConfigError("--r needs exactly three components")
    noise = args.noise or [0.0]
    rows, fits = capacity_sweep(r, args.shots, noise)
    print(f"{'R':>8} {'p':>6} {'N_s':>12} {'noisy N_s':>12} {'ratio':>8} {'1-5p+6p^2':>10}")
    for row in rows:
        print(
            f"{row['R']:>8d} {row['p']:>6g} {row['n_states']:>12.4g} "
            f"{row['noisy_n_states']:>12.4g} {row['ratio']:>8.4f} {row['worst_case_factor']:>10.4f}"
        )
    for fit in fits:
        print(f"p={fit['p']:g}: slope={fit['slope']:.6g} intercept={fit['intercept']:.4g} R^2={fit['r2']:.6f}")
    if args.out:
        out = Path(args.out)
        _write_json({"schema_version": 1, "r": r.tolist(), "rows": rows, "fits": fits}, out)
        with out.with_suffix(".csv").open("w", newline="", encoding="utf-8") as fh:
            fields = [k for k in rows[0] if k != "r"]
            w = csv.DictWriter(fh, ["x", "y", "z"] + fields, extrasaction="ignore")
            w.writeheader()
            for row in rows:
                w.writerow({"x": r[0], "y": r[1], "z": r[2], **row})
        print(f"sweep written to {out} and {out.with_suffix('.csv')}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI experiment config")
    common.add_argument("--seed", type=int, help="run seed")
    common.add_argument("--mode", choices=["exact", "sampled", "classical"])
    common.add_argument("--out", help="output path")

    parser = argparse.ArgumentParser(prog="mcswap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write an XOR dataset as CSV")
    gen.add_argument("--classes", type=int)
    gen.add_argument("--features", type=int)
    gen.add_argument("--per-class", type=int)
    gen.add_argument("--spread", type=float)
    gen.add_argument("--data-seed", type=int)
    gen.set_defaults(func=cmd_generate, shots=None, noise=None)

    exp = sub.add_parser("experiment", parents=[common], help="run a cross-validated experiment")
    exp.add_argument("--shots", type=int, help="shots per basis in sampled mode")
    exp.add_argument("--noise", type=_float_list, help="depolarising levels, e.g. 0,0.05,0.1")
    exp.set_defaults(func=cmd_experiment)

    cap = sub.add_parser("capacity", help="label-capacity sweep over repetitions and noise")
    cap.add_argument("--r", type=_float_list, required=True, help="Bloch vector x,y,z")
    cap.add_argument("--shots", type=_int_list, default=[100, 1000, 10000, 100000],
                     help="repetition counts R")
    cap.add_argument("--noise", type=_float_list, help="depolarising levels")
    cap.add_argument("--out", help="JSON output; a CSV is written next to it")
    cap.set_defaults(func=cmd_capacity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (PoleDegenerateError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
