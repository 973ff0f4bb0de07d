"""Cross-validated experiments and capacity sweeps, with JSON-ready results."""

from __future__ import annotations

import configparser
import datetime as _dt
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import sklearn

from .classifier import EXECUTION_MODES, SwapTestClassifier
from .data import balance, generate_xor, load_csv, make_splits
from .labels import assign, tammes_placement
from .noise import capacity, worst_case_factor

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment run."""

    # dataset
    source: str = "xor"
    n_classes: int = 4
    n_features: int = 3
    points_per_class: int = 16
    spread: float = 0.2
    data_seed: int = 0
    path: str | None = None
    feature_columns: list | None = None
    label_column: str = "label"
    balance_per_class: int | None = None
    balance_seed: int = 0
    # model
    encoding: str = "amplitude"
    mode: str = "exact"
    shots: int = 8192
    angle_range: list = field(default_factory=lambda: [0.0, float(np.pi / 2)])
    label_seed: int = 0
    # protocol
    noise: list = field(default_factory=lambda: [0.0])
    split: str = "loo"
    k: int = 5
    split_seed: int = 0
    seed: int = 0
    out: str | None = None

    def validate(self):
        if self.source not in ("xor", "csv"):
            raise ConfigError(f"dataset source must be 'xor' or 'csv', got {self.source!r}")
        if self.source == "csv":
            if not self.path:
                raise ConfigError("csv source needs a path")
            if not Path(self.path).is_file():
                raise ConfigError(f"dataset file does not exist: {self.path}")
        if self.encoding not in ("amplitude", "angle"):
            raise ConfigError(f"unknown encoding {self.encoding!r}")
        if self.mode not in EXECUTION_MODES:
            raise ConfigError(f"mode must be one of {EXECUTION_MODES}, got {self.mode!r}")
        if self.encoding == "angle" and self.mode != "classical":
            raise ConfigError("angle encoding requires mode = classical")
        if self.mode == "sampled" and int(self.shots) < 1:
            raise ConfigError("sampled mode needs shots >= 1")
        if not self.noise:
            self.noise = [0.0]
        if any(not 0.0 <= p <= 1.0 for p in self.noise):
            raise ConfigError(f"noise levels must lie in [0, 1], got {self.noise}")
        if self.split not in ("loo", "kfold"):
            raise ConfigError(f"split must be 'loo' or 'kfold', got {self.split!r}")
        lo, hi = self.angle_range
        if not hi > lo:
            raise ConfigError(f"angle_range needs hi > lo, got {self.angle_range}")
        return self

    def to_dict(self):
        return asdict(self)


_SECTIONS = {
    "dataset": {
        "source": str, "n_classes": int, "n_features": int, "points_per_class": int,
        "spread": float, "seed": ("data_seed", int), "path": str,
        "feature_columns": lambda s: [c.strip() for c in s.split(",") if c.strip()],
        "label_column": str, "balance_per_class": int, "balance_seed": int,
    },
    "model": {
        "encoding": str, "mode": str, "shots": int, "angle_range": _floats,
        "label_seed": int,
    },
    "noise": {"p": ("noise", _floats)},
    "cv": {"kind": ("split", str), "k": int, "seed": ("split_seed", int)},
    "run": {"seed": int, "out": str},
}


def load_config(path):
    """Read an INI-style config file into an :class:`ExperimentConfig`."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file does not exist: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        keys = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in keys:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            spec = keys[key]
            name, conv = spec if isinstance(spec, tuple) else (key, spec)
            try:
                values[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for {section}.{key}: {raw!r}") from exc
    cfg = ExperimentConfig(**values)
    if cfg.path and not Path(cfg.path).is_absolute():
        cfg.path = str((path.parent / cfg.path).resolve())
    return cfg


def build_dataset(cfg):
    if cfg.source == "xor":
        ds = generate_xor(
            cfg.n_classes, cfg.n_features, cfg.points_per_class, cfg.spread, cfg.data_seed
        )
    else:
        ds = load_csv(cfg.path, cfg.feature_columns, cfg.label_column)
    if cfg.balance_per_class:
        ds = balance(ds, cfg.balance_per_class, cfg.balance_seed)
    return ds


def _versions():
    from . import __version__

    return {
        "mcswap": __version__,
        "numpy": np.__version__,
        "scikit-learn": sklearn.__version__,
        "python": platform.python_version(),
    }


def _run_noise_level(ds, plan, cfg, p):
    records = []
    for f, (train_idx, test_idx) in enumerate(plan.folds):
        clf = SwapTestClassifier(
            encoding=cfg.encoding,
            execution=cfg.mode,
            shots=cfg.shots,
            noise=p,
            angle_range=tuple(cfg.angle_range),
            label_seed=cfg.label_seed,
            random_state=cfg.seed,
            classes=list(range(ds.n_classes)),
        ).fit(ds.features[train_idx], ds.labels[train_idx])
        pvs = clf.predicted_vectors(ds.features[test_idx], keys=test_idx)
        for i, pv in zip(test_idx, pvs):
            pred = assign(pv.xyz, clf.label_set_)
            records.append(
                {
                    "fold": f,
                    "index": int(i),
                    "true": int(ds.labels[i]),
                    "predicted": int(clf.classes_[pred]),
                    "degenerate": bool(pv.degenerate),
                    **pv.to_dict(),
                }
            )
    return records


def summarize(records):
    """Accuracy and mean predicted-vector norm of a list of records."""
    n = len(records)
    correct = sum(r["true"] == r["predicted"] for r in records)
    return {
        "n_total": n,
        "n_correct": correct,
        "accuracy": correct / n if n else float("nan"),
        "mean_norm": float(np.mean([r["norm"] for r in records])) if n else float("nan"),
        "n_degenerate": sum(r["degenerate"] for r in records),
    }


def run_experiment(cfg):
    """Run the cross-validation loop at every noise level in ``cfg``.

    Returns a JSON-serialisable result dict. A failure at one noise level is
    recorded under that level and the result is flagged ``partial``.
    """
    cfg.validate()
    ds = build_dataset(cfg)
    plan = make_splits(ds, cfg.split, cfg.k, cfg.split_seed)
    label_set = tammes_placement(ds.n_classes, seed=cfg.label_seed)
    levels = []
    partial = False
    for p in cfg.noise:
        try:
            records = _run_noise_level(ds, plan, cfg, float(p))
        except (ValueError, ArithmeticError) as exc:
            partial = True
            levels.append({"p": float(p), "error": f"{type(exc).__name__}: {exc}"})
            continue
        levels.append({"p": float(p), **summarize(records), "records": records})
    base = next((lv for lv in levels if lv["p"] == 0.0 and "error" not in lv), None)
    for lv in levels:
        if base is not None and "error" not in lv:
            lv["norm_ratio"] = lv["mean_norm"] / base["mean_norm"]
    return {
        "schema_version": SCHEMA_VERSION,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "versions": _versions(),
        "config": cfg.to_dict(),
        "dataset": {
            **ds.summary(),
            "label_names": ds.label_names,
            "metadata": ds.metadata,
        },
        "label_set": label_set.to_dict(),
        "split": plan.to_dict(),
        "partial": partial,
        "levels": levels,
    }


def format_table(result):
    """Accuracy table rebuilt from the per-point records alone."""
    lines = [f"{'p':>6}  {'Accuracy (%)':>12}  {'Av. Norm of Predicted Vector':>28}"]
    for lv in result["levels"]:
        if "error" in lv:
            lines.append(f"{lv['p']:>6g}  {'failed':>12}  {lv['error']}")
            continue
        s = summarize(lv["records"])
        lines.append(f"{lv['p']:>6g}  {100 * s['accuracy']:>12.2f}  {s['mean_norm']:>28.4f}")
    return "\n".join(lines)


def capacity_sweep(r, repetitions, noise_levels=(0.0,)):
    """Capacity estimates over a grid of repetitions and noise levels.

    Returns ``(rows, fits)``: one row per ``(R, p)`` and, per ``p``, the
    least-squares line of the (noisy) state count against ``R``.
    """
    r = np.asarray(r, dtype=float)
    rows = []
    for p in noise_levels:
        for R in repetitions:
            est = capacity(r, int(R), float(p))
            rows.append(
                {
                    "r": r.tolist(),
                    "R": int(R),
                    "p": float(p),
                    "delta_theta": est.noisy_delta_theta,
                    "delta_phi": est.noisy_delta_phi,
                    "n_states": est.n_states,
                    "noisy_n_states": est.noisy_n_states,
                    "ratio": est.noisy_n_states / est.n_states,
                    "worst_case_factor": worst_case_factor(p),
                }
            )
    fits = []
    for p in noise_levels:
        sub = [row for row in rows if row["p"] == float(p)]
        fits.append({"p": float(p), **linear_fit([s["R"] for s in sub], [s["noisy_n_states"] for s in sub])})
    return rows, fits


def linear_fit(x, y):
    """Least-squares line with its coefficient of determination."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": float(r2)}
