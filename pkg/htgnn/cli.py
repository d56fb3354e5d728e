"""The ``htgnn`` command: generate datasets, train and evaluate variants, run ablations and draw figures.

Exit codes: 0 on success, 2 on usage or configuration errors, 3 when training diverges and 4 on data, shape or
checkpoint errors. Diagnostics go to standard error, artifacts to the given output paths.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from htgnn.__version__ import __version__
from htgnn.config import ConfigurationError, load_dataclass, read_config_file
from htgnn.data import (
    GENERATORS,
    SensorDataset,
    Split,
    SplitConfig,
    Standardizer,
    WindowDataset,
    dataset_windows,
    read_dataset,
    temporal_split,
    write_dataset,
)
from htgnn.data.errors import DataError
from htgnn.graph.errors import GraphError
from htgnn.nn import ABLATION_VARIANTS, VARIANTS, ModelConfig, build_variant, count_parameters
from htgnn.nn.checkpoint import load_checkpoint, save_checkpoint
from htgnn.nn.errors import CheckpointError, InvalidVariantError, ModelError, ShapeMismatchError
from htgnn.plotting import PLOT_KINDS, PlotConfig, plot_bars, plot_spectrum, plot_timeline
from htgnn.training import (
    TrainConfig,
    evaluate_by_category,
    evaluate_loss,
    mean_interval,
    predict,
    summarize_runs,
    train,
    worst_categories,
)
from htgnn.training.errors import DivergedLossError, TrainingError
from htgnn.training.evaluation import CATEGORY_KEYS, category_of

import pandas as pd

import torch

logger = logging.getLogger("htgnn")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_DATA = 4
THREADS_VARIABLE = "HTGNN_THREADS"
DEFAULT_CATEGORY = {"bearing-like": "speed", "bridge-like": "temperature"}


def _seeds(text: str) -> List[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma separated list of integers")
    if not seeds:
        raise argparse.ArgumentTypeError("At least one seed is required")
    return seeds


def _threads() -> int:
    value = os.environ.get(THREADS_VARIABLE, "1")
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ConfigurationError(f"{THREADS_VARIABLE} must be a positive integer, got '{value}'")
    return threads


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"'{text}' is not a positive integer")
    return value


def _variants(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _write_json(path: str, document: Dict[str, Any]):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, sort_keys=True, indent=2)
        f.write("\n")
    logger.info(f"Wrote {path}")


def _write_csv(path: str, frame: pd.DataFrame):
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info(f"Wrote {path}")


class RunContext:
    """The dataset, its windows split for training and the configuration sections shared by train and ablate."""

    def __init__(self, data: str, config_path: Optional[str]):
        """Load the dataset and the configuration file.

        :param data: the dataset directory
        :param config_path: a JSON file with optional "model", "train" and "split" sections
        :raises: ConfigurationError, DataError
        """
        self.logger = logging.getLogger(__name__)
        self.document = read_config_file(config_path, ("model", "train", "split"))
        self.dataset: SensorDataset = read_dataset(data)
        kind = self.dataset.kind
        mode = SplitConfig.for_dataset(kind).mode
        self.split_config = load_dataclass(SplitConfig, self.document.get("split"), "split", mode=mode)
        self.split: Split = temporal_split(dataset_windows(self.dataset), self.split_config)
        self.logger.debug(f"Split {kind}: {len(self.split.train)}/{len(self.split.val)}/{len(self.split.test)}")

    def model_config(self, variant: str) -> ModelConfig:
        """Return the model configuration of a variant: dataset preset, then the file's "model" section.

        :raises: ConfigurationError, InvalidVariantError
        """
        if variant not in VARIANTS:
            raise InvalidVariantError(f"Unknown variant '{variant}', valid variants: {', '.join(VARIANTS)}")
        values = dict(self.document.get("model") or {})
        values.pop("variant", None)
        preset = ModelConfig.preset(self.dataset.kind)
        preset["window"] = self.dataset.window
        return load_dataclass(ModelConfig, values, "model", variant=variant, **preset)

    def train_config(self, seed: int) -> TrainConfig:
        """Return the training configuration of a seed: dataset preset, then the file's "train" section.

        :raises: ConfigurationError
        """
        values = dict(self.document.get("train") or {})
        values.pop("seed", None)
        preset = {"warmup_iters": TrainConfig.for_dataset(self.dataset.kind).warmup_iters}
        return load_dataclass(TrainConfig, values, "train", seed=seed, **preset)

    def fit(self, variant: str, seed: int):
        """Build and train a variant on the training split.

        :returns: (model, model config, train config, standardizer, train result)
        :raises: ConfigurationError, InvalidVariantError, DivergedLossError, ModelError
        """
        model_config = self.model_config(variant)
        train_config = self.train_config(seed)
        torch.manual_seed(seed)
        model = build_variant(model_config, self.dataset.graph).to(train_config.torch_dtype)
        standardizer = Standardizer.fit(self.split.train)
        train_set = WindowDataset(self.split.train, standardizer, train_config.torch_dtype)
        val_set = WindowDataset(self.split.val, standardizer, train_config.torch_dtype)
        self.logger.info(f"Training {variant} ({count_parameters(model)} parameters) with seed {seed}")
        result = train(model, train_set, val_set, train_config)
        return model, model_config, train_config, standardizer, result

    @property
    def category(self) -> str:
        """Return the default evaluation category of the dataset kind."""
        return DEFAULT_CATEGORY.get(self.dataset.kind, "condition")


def cmd_generate(args: argparse.Namespace) -> int:
    """Generate a synthetic dataset and write it to a directory."""
    document = read_config_file(args.config, ("generator",))
    config_class, generator = GENERATORS[args.dataset]
    config = load_dataclass(config_class, document.get("generator"), "generator")
    dataset = generator(config, seed=args.seed)
    write_dataset(dataset, args.out)
    return EXIT_OK


def _train_run(context: RunContext, variant: str, seed: int, out: str) -> Dict[str, Any]:
    started = time.perf_counter()
    try:
        model, model_config, train_config, standardizer, result = context.fit(variant, seed)
    except DivergedLossError as x:
        if x.state is not None:
            _write_json(os.path.join(out, "diverged_state.json"), x.state.to_dict())
        raise
    extras = {
        "kind": context.dataset.kind,
        "split": dataclasses.asdict(context.split_config),
        "target_names": list(context.dataset.target_names),
        "dtype": train_config.dtype,
        "seed": seed,
    }
    save_checkpoint(
        os.path.join(out, "checkpoint.json"), model, model_config, context.dataset.graph, standardizer, extras
    )
    _write_csv(os.path.join(out, "history.csv"), pd.DataFrame([r._asdict() for r in result.history]))
    metrics = evaluate_by_category(
        model, context.split.val, context.category, standardizer, context.dataset.target_names, train_config.torch_dtype
    )
    metrics.update({"variant": variant, "seed": seed, "split": "val"})
    _write_json(os.path.join(out, "metrics.json"), metrics)
    _write_json(
        os.path.join(out, "run.json"),
        {
            "runtime_s": time.perf_counter() - started,
            "epochs": result.state.epoch,
            "best_epoch": result.state.best_epoch,
            "parameters": count_parameters(model),
            "version": __version__,
        },
    )
    return metrics


def cmd_train(args: argparse.Namespace) -> int:
    """Train a variant once per seed, writing a checkpoint, the loss history and validation metrics per run."""
    context = RunContext(args.data, args.config)
    context.model_config(args.variant)
    for seed in args.seed:
        out = args.out if len(args.seed) == 1 else os.path.join(args.out, f"seed_{seed}")
        _train_run(context, args.variant, seed, out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Evaluate a checkpoint on the test split of a dataset, per category."""
    checkpoint = load_checkpoint(args.checkpoint)
    dataset = read_dataset(args.data)
    if dataset.graph != checkpoint.graph:
        raise ShapeMismatchError(f"Checkpoint graph {checkpoint.graph!r} differs from dataset graph {dataset.graph!r}")
    document = read_config_file(args.config, ("split",))
    stored = dict(checkpoint.extras.get("split") or dataclasses.asdict(SplitConfig.for_dataset(dataset.kind)))
    stored.update(document.get("split") or {})
    split_config = load_dataclass(SplitConfig, stored, "split")
    test = temporal_split(dataset_windows(dataset, window=checkpoint.config.window), split_config).test
    dtype = getattr(torch, checkpoint.extras.get("dtype", "float32"))
    targets = dataset.target_names
    by = args.by or DEFAULT_CATEGORY.get(dataset.kind, "condition")
    report = evaluate_by_category(checkpoint.model, test, by, checkpoint.standardizer, targets, dtype)
    report.update({"variant": checkpoint.config.variant, "seed": checkpoint.extras.get("seed"), "split": "test"})
    if args.worst:
        report["worst"] = worst_categories(report, args.worst)
        for target, labels in report["worst"].items():
            logger.info(f"Largest {target} MAPE by {by}: {', '.join(labels)}")
    out = args.out or os.path.join(os.path.dirname(args.checkpoint), f"evaluation_{by}.json")
    _write_json(out, report)
    y_true, y_pred = predict(checkpoint.model, test, checkpoint.standardizer, dtype)
    frame = pd.DataFrame(
        {
            "condition": [w.condition for w in test],
            "group": [w.group for w in test],
            "offset": [w.offset for w in test],
            "category": [category_of(w, by) for w in test],
        }
    )
    for k, name in enumerate(targets):
        frame[f"{name}_true"] = y_true[:, k]
        frame[f"{name}_pred"] = y_pred[:, k]
    _write_csv(os.path.splitext(out)[0] + "_predictions.csv", frame)
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    """Train and test every variant with every seed, then summarise each variant over seeds.

    A failing cell is reported as failed and the remaining cells still run.
    """
    if len(args.seeds) < 2:
        raise ConfigurationError(f"An ablation needs at least 2 seeds, got {len(args.seeds)}")
    context = RunContext(args.data, args.config)
    variants = args.variants or list(ABLATION_VARIANTS)
    for variant in variants:
        context.model_config(variant)
    by = args.by or context.category
    runs: List[Dict[str, Any]] = []
    failures = 0
    for variant in variants:
        for seed in args.seeds:
            out = os.path.join(args.out, variant, f"seed_{seed}")
            row: Dict[str, Any] = {"variant": variant, "seed": seed, "status": "ok", "report": None}
            started = time.perf_counter()
            try:
                model, _, train_config, standardizer, result = context.fit(variant, seed)
                dtype = train_config.torch_dtype
                row["report"] = evaluate_by_category(
                    model, context.split.test, by, standardizer, context.dataset.target_names, dtype
                )
                row["test_loss"] = evaluate_loss(model, WindowDataset(context.split.test, standardizer, dtype))
                row["epochs"] = result.state.epoch
                row["runtime_s"] = time.perf_counter() - started
            except (TrainingError, ModelError) as x:
                failures += 1
                row["status"] = "failed"
                row["error"] = f"{type(x).__name__}: {x}"
                logger.warning(f"Ablation cell {variant} / seed {seed} failed: {row['error']}")
                if isinstance(x, DivergedLossError) and x.state is not None:
                    _write_json(os.path.join(out, "diverged_state.json"), x.state.to_dict())
            runs.append(row)
    summaries = {}
    rows = []
    for variant in variants:
        reports = [r["report"] for r in runs if r["variant"] == variant and r["status"] == "ok"]
        summaries[variant] = summarize_runs(reports) if reports else None
        if summaries[variant]:
            losses = [r["test_loss"] for r in runs if r["variant"] == variant and r["status"] == "ok"]
            summaries[variant]["test_loss"] = mean_interval(losses)
        for label, cells in (summaries[variant] or {}).get("categories", {}).items():
            rows.extend(_summary_rows(variant, label, cells, len(reports)))
        if summaries[variant]:
            rows.extend(_summary_rows(variant, "average", summaries[variant]["average"], len(reports)))
    _write_json(
        os.path.join(args.out, "ablation.json"),
        {"by": by, "seeds": args.seeds, "runs": runs, "variants": summaries, "failed": failures},
    )
    columns = ["variant", "category", "target", "metric", "mean", "ci", "n"]
    _write_csv(os.path.join(args.out, "ablation.csv"), pd.DataFrame(rows, columns=columns))
    if failures:
        logger.warning(f"{failures} of {len(runs)} ablation cells failed")
    return EXIT_OK


def _summary_rows(variant: str, label: str, cells: Dict[str, Any], n: int) -> List[Dict[str, Any]]:
    return [
        {"variant": variant, "category": label, "target": target, "metric": metric, "n": n, **values}
        for target, metrics in cells.items()
        for metric, values in metrics.items()
    ]


def cmd_plot(args: argparse.Namespace) -> int:
    """Draw a figure from an ablation report, a predictions CSV or a dataset directory."""
    document = read_config_file(args.config, ("plot",))
    config = load_dataclass(PlotConfig, document.get("plot"), "plot")
    if args.kind == "bars":
        with open(args.report, encoding="utf-8") as f:
            plot_bars(json.load(f), args.out, config.metric)
    elif args.kind == "timeline":
        plot_timeline(pd.read_csv(args.report), args.out)
    else:
        dataset = read_dataset(args.report)
        plot_spectrum(dataset, args.out, config.by or DEFAULT_CATEGORY.get(dataset.kind, "speed"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the ``htgnn`` command."""
    parser = argparse.ArgumentParser(prog="htgnn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="generate a synthetic dataset")
    generate.add_argument("--dataset", required=True, choices=sorted(GENERATORS))
    generate.add_argument("--config", help="JSON file with a 'generator' section")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out", required=True, help="dataset directory")
    generate.set_defaults(func=cmd_generate)

    fit = commands.add_parser("train", help="train a variant")
    fit.add_argument("--data", required=True, help="dataset directory")
    fit.add_argument("--variant", default="HTGNN", help=f"one of {', '.join(VARIANTS)}")
    fit.add_argument("--seed", type=_seeds, default=[0], help="a seed or a comma separated list")
    fit.add_argument("--out", required=True, help="run directory")
    fit.add_argument("--config", help="JSON file with 'model', 'train' and 'split' sections")
    fit.set_defaults(func=cmd_train)

    evaluate = commands.add_parser("evaluate", help="evaluate a checkpoint per category")
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--data", required=True, help="dataset directory")
    evaluate.add_argument("--by", choices=CATEGORY_KEYS)
    evaluate.add_argument("--out", help="metrics JSON path, next to the checkpoint by default")
    evaluate.add_argument("--worst", type=_positive, metavar="N", help="report the N categories with the largest MAPE")
    evaluate.add_argument("--config", help="JSON file with a 'split' section")
    evaluate.set_defaults(func=cmd_evaluate)

    ablate = commands.add_parser("ablate", help="train and test variants over seeds")
    ablate.add_argument("--data", required=True, help="dataset directory")
    ablate.add_argument("--seeds", type=_seeds, required=True, help="comma separated seeds, at least 2")
    ablate.add_argument("--out", required=True, help="report directory")
    ablate.add_argument("--variants", type=_variants, help="comma separated variants, the graph ablations by default")
    ablate.add_argument("--by", choices=CATEGORY_KEYS)
    ablate.add_argument("--config", help="JSON file with 'model', 'train' and 'split' sections")
    ablate.set_defaults(func=cmd_ablate)

    plot = commands.add_parser("plot", help="draw a static figure")
    plot.add_argument("--report", required=True, help="ablation JSON, predictions CSV or dataset directory")
    plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot.add_argument("--out", required=True, help="image path")
    plot.add_argument("--config", help="JSON file with a 'plot' section")
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as x:
        return int(x.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        torch.set_num_threads(_threads())
        return args.func(args)
    except (ConfigurationError, InvalidVariantError) as x:
        logger.error(str(x))
        return EXIT_USAGE
    except DivergedLossError as x:
        logger.error(str(x))
        return EXIT_DIVERGED
    except (ShapeMismatchError, CheckpointError, DataError, GraphError, ModelError, TrainingError, OSError) as x:
        logger.error(str(x))
        return EXIT_DATA
