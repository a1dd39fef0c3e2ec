"""Command-line front end.

Four commands: ``generate`` (synthetic dataset), ``precompute``
(propagate features once, to disk), ``train`` (task head over seeds,
JSONL metrics), and ``verify`` (randomized self-checks).  Settings
come from a strict JSON config; the few repeated knobs (seed, output
dir, task) can be overridden by flags, which win over the file.

Exit codes: 0 success, 1 usage, 2 bad data or config, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core import Hypergraph, load_features, load_hypergraph, load_labels
from .errors import ConfigError, HyperpropError
from .expansion import normalize_with_self_loops, weighted_clique_expansion
from .nn import TrainConfig
from .propagation import PropagationConfig, load_propagated, propagate, save_propagated
from .synthetic import PlantedConfig, emit_dataset
from .tasks import (
    Split,
    make_split,
    negative_sample,
    train_hyperlink_predictor,
    train_node_classifier,
)
from .verify import run_all

__all__ = ["main"]

_TOP_KEYS = {"dataset", "synthetic", "propagation", "train", "negative", "task", "seeds", "out_dir"}
_DATASET_KEYS = {"name", "edges", "features", "labels", "propagated"}
_SYNTHETIC_KEYS = {"n", "m", "classes", "size_min", "size_max", "p_in", "feature_dim", "feature_noise", "seed"}
_PROPAGATION_KEYS = {"layers", "alpha"}
_TRAIN_KEYS = {"learning_rate", "epochs", "dropout", "weight_decay", "hidden_dims"}
_NEGATIVE_KEYS = {"alpha", "beta"}

_DEFAULT_SEEDS = {"nc": list(range(10)), "hp": list(range(5))}


@dataclass
class RunConfig:
    """Validated union of config file, defaults, and flag overrides."""

    dataset: dict[str, str]
    synthetic: dict[str, Any]
    propagation: PropagationConfig
    train: dict[str, Any]
    negative: dict[str, Any]
    task: str
    seeds: list[int]
    out_dir: Path
    inline_precompute: bool = False
    seed_override: int | None = None

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.train["learning_rate"],
            epochs=self.train["epochs"],
            dropout=self.train["dropout"],
            weight_decay=self.train["weight_decay"],
            hidden_dims=tuple(self.train["hidden_dims"]),
            seed=seed,
        )

    def hash(self) -> str:
        """Digest of everything that affects results (not where they go)."""
        payload = {
            "dataset": self.dataset,
            "synthetic": self.synthetic,
            "propagation": {"layers": self.propagation.layers, "alpha": self.propagation.alpha},
            "train": self.train,
            "negative": self.negative,
            "task": self.task,
            "seeds": self.seeds,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _check_keys(section: str, mapping: dict, allowed: set[str]) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    raw: dict[str, Any] = {}
    if path is not None:
        cfg_path = Path(path)
        if not cfg_path.is_file():
            raise ConfigError(f"config file not found: {cfg_path}")
        try:
            raw = json.loads(cfg_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
    _check_keys("config", raw, _TOP_KEYS)
    dataset = dict(raw.get("dataset", {}))
    _check_keys("dataset", dataset, _DATASET_KEYS)
    synthetic = dict(raw.get("synthetic", {}))
    _check_keys("synthetic", synthetic, _SYNTHETIC_KEYS)
    prop_raw = {"layers": 2, "alpha": 0.3, **raw.get("propagation", {})}
    _check_keys("propagation", prop_raw, _PROPAGATION_KEYS)
    train = {
        "learning_rate": 0.01,
        "epochs": 100,
        "dropout": 0.0,
        "weight_decay": 0.0,
        "hidden_dims": [64],
        **raw.get("train", {}),
    }
    _check_keys("train", train, _TRAIN_KEYS)
    negative = {"alpha": 0.5, "beta": 5, **raw.get("negative", {})}
    _check_keys("negative", negative, _NEGATIVE_KEYS)

    task = raw.get("task", "nc")
    if getattr(args, "task", None):
        task = args.task
    if task not in ("nc", "hp"):
        raise ConfigError(f"task must be 'nc' or 'hp', got {task!r}")
    seeds = raw.get("seeds", _DEFAULT_SEEDS[task])
    if getattr(args, "seed", None) is not None:
        seeds = [args.seed]
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        raise ConfigError(f"seeds must be a nonempty list of integers, got {seeds!r}")
    out_dir = Path(raw.get("out_dir", "runs"))
    if getattr(args, "out", None):
        out_dir = Path(args.out)
    return RunConfig(
        dataset=dataset,
        synthetic=synthetic,
        propagation=PropagationConfig(layers=prop_raw["layers"], alpha=prop_raw["alpha"]),
        train=train,
        negative=negative,
        task=task,
        seeds=list(seeds),
        out_dir=out_dir,
        inline_precompute=bool(getattr(args, "inline_precompute", False)),
        seed_override=getattr(args, "seed", None),
    )


def _require_paths(cfg: RunConfig, *keys: str) -> dict[str, Path]:
    paths = {}
    for key in keys:
        value = cfg.dataset.get(key)
        if value is None:
            raise ConfigError(f"dataset.{key} is required for this command")
        p = Path(value)
        if not p.is_file():
            raise ConfigError(f"dataset.{key} does not exist: {p}")
        paths[key] = p
    return paths


def _dataset_name(cfg: RunConfig) -> str:
    if cfg.dataset.get("name"):
        return cfg.dataset["name"]
    if cfg.dataset.get("edges"):
        return Path(cfg.dataset["edges"]).stem
    return "unnamed"


def cmd_generate(cfg: RunConfig) -> int:
    syn = dict(cfg.synthetic)
    if not syn:
        raise ConfigError("generate needs a 'synthetic' config section")
    seed = syn.pop("seed", cfg.seeds[0])
    if cfg.seed_override is not None:
        seed = cfg.seed_override
    size_min = syn.pop("size_min", 2)
    size_max = syn.pop("size_max", 4)
    try:
        planted = PlantedConfig(size_range=(size_min, size_max), seed=seed, **syn)
    except TypeError as exc:
        raise ConfigError(f"synthetic section is incomplete: {exc}") from None
    paths = emit_dataset(cfg.out_dir, planted)
    manifest = {key: str(p) for key, p in paths.items()}
    (cfg.out_dir / f"dataset_seed{seed}.json").write_text(json.dumps(manifest, indent=2) + "\n")
    for key, p in paths.items():
        print(f"{key}: {p}")
    return 0


def cmd_precompute(cfg: RunConfig) -> int:
    paths = _require_paths(cfg, "edges", "features")
    h = load_hypergraph(paths["edges"])
    x = load_features(paths["features"])
    tic = time.perf_counter()
    atilde = normalize_with_self_loops(weighted_clique_expansion(h))
    pf = propagate(atilde, x, cfg.propagation)
    preprocess_seconds = time.perf_counter() - tic
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out_file = cfg.out_dir / "propagated.tfhn"
    save_propagated(out_file, pf)
    meta = {
        "payload": {
            "dataset": _dataset_name(cfg),
            "provenance": pf.provenance,
            "adjacency_hash": pf.adjacency_hash,
            "layers": cfg.propagation.layers,
            "alpha": cfg.propagation.alpha,
            "rows": int(pf.matrix.shape[0]),
            "cols": int(pf.matrix.shape[1]),
        },
        "timing": {"preprocess_seconds": preprocess_seconds},
    }
    (cfg.out_dir / "precompute.json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    print(f"propagated {pf.matrix.shape[0]}x{pf.matrix.shape[1]} -> {out_file}")
    print(f"provenance {pf.provenance}")
    print(f"preprocess_seconds {preprocess_seconds:.4f}")
    return 0


def _train_nc(cfg: RunConfig) -> list[dict]:
    paths = _require_paths(cfg, "edges", "features", "labels")
    y = load_labels(paths["labels"])
    if cfg.inline_precompute:
        h = load_hypergraph(paths["edges"])
        x_raw = load_features(paths["features"])
        tic = time.perf_counter()
        atilde = normalize_with_self_loops(weighted_clique_expansion(h))
        pf = propagate(atilde, x_raw, cfg.propagation)
        preprocess_seconds = time.perf_counter() - tic
    else:
        prop_paths = _require_paths(cfg, "propagated")
        pf = load_propagated(prop_paths["propagated"])
        if pf.config != cfg.propagation:
            raise ConfigError(
                f"propagated file was built with {pf.config}, config wants {cfg.propagation}"
            )
        preprocess_seconds = 0.0
    labeled = y.labeled_indices
    records = []
    for seed in cfg.seeds:
        idx = make_split(len(labeled), seed)
        split = Split(
            train=labeled[idx.train], val=labeled[idx.val], test=labeled[idx.test], seed=seed
        )
        _, metrics = train_node_classifier(pf.matrix, y, split, cfg.train_config(seed))
        records.append(
            {
                "payload": {
                    "dataset": _dataset_name(cfg),
                    "task": "nc",
                    "seed": seed,
                    "config_hash": cfg.hash(),
                    "metric": {"accuracy": metrics.accuracy},
                },
                "timing": {
                    "train_seconds": metrics.train_seconds,
                    "preprocess_seconds": preprocess_seconds,
                },
            }
        )
    return records


def _train_hp(cfg: RunConfig) -> list[dict]:
    paths = _require_paths(cfg, "edges", "features")
    h = load_hypergraph(paths["edges"])
    x = load_features(paths["features"])
    records = []
    for seed in cfg.seeds:
        split = make_split(h.m, seed)
        data = negative_sample(h, cfg.negative["alpha"], cfg.negative["beta"], seed)
        visible = sorted(set(split.train.tolist()) | set(split.val.tolist()))
        sub = Hypergraph.from_edges([h.edges[i] for i in visible], n=h.n)
        tic = time.perf_counter()
        atilde = normalize_with_self_loops(weighted_clique_expansion(sub))
        pf = propagate(atilde, x, cfg.propagation)
        preprocess_seconds = time.perf_counter() - tic
        _, metrics = train_hyperlink_predictor(pf, data, split, cfg.train_config(seed))
        records.append(
            {
                "payload": {
                    "dataset": _dataset_name(cfg),
                    "task": "hp",
                    "seed": seed,
                    "config_hash": cfg.hash(),
                    "metric": {"auc": metrics.auc},
                },
                "timing": {
                    "train_seconds": metrics.train_seconds,
                    "preprocess_seconds": preprocess_seconds,
                },
            }
        )
    return records


def cmd_train(cfg: RunConfig) -> int:
    records = _train_nc(cfg) if cfg.task == "nc" else _train_hp(cfg)
    metric_name = "accuracy" if cfg.task == "nc" else "auc"
    values = [r["payload"]["metric"][metric_name] for r in records]
    mean = statistics.mean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    total_train = sum(r["timing"]["train_seconds"] for r in records)
    records.append(
        {
            "payload": {
                "aggregate": True,
                "dataset": _dataset_name(cfg),
                "task": cfg.task,
                "config_hash": cfg.hash(),
                "metric_name": metric_name,
                "mean": mean,
                "std": std,
                "n_seeds": len(values),
            },
            "timing": {"train_seconds_total": total_train},
        }
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out_file = cfg.out_dir / "metrics.jsonl"
    with out_file.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    print(f"{metric_name}: {100 * mean:.2f} +/- {100 * std:.2f} over {len(values)} seed(s)")
    print(f"records -> {out_file}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    reports = run_all(cases=args.cases, seed=args.seed if args.seed is not None else 0)
    for report in reports:
        print(report.line())
    return 0 if all(r.passed for r in reports) else 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperprop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("generate", "write a planted-partition dataset"),
        ("precompute", "propagate features once and store them"),
        ("train", "train the task head over seeds"),
        ("verify", "run randomized structural self-checks"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--seed", type=int, help="override the config's seed list")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--task", choices=("nc", "hp"), help="override the task")
        p.add_argument(
            "--inline-precompute",
            action="store_true",
            help="propagate in-process instead of reading a precomputed file",
        )
        if name == "verify":
            p.add_argument("--cases", type=int, default=50, help="random cases per suite")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = load_config(args.config, args)
        if args.command == "generate":
            return cmd_generate(cfg)
        if args.command == "precompute":
            return cmd_precompute(cfg)
        return cmd_train(cfg)
    except HyperpropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
