# SPDX-License-Identifier: MIT
"""
``lungvit`` command line.

Exit codes: 0 success, 2 usage or I/O problem, 3 numerical failure.
"Few-shot" follows the experiment's own usage: a few epochs of fine-tuning over the
whole training split, not a handful of examples.
"""

from __future__ import annotations

import argparse
from collections.abc import Callable
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any
from typing import Final

from lungvit import config as run_config
from lungvit import log
from lungvit.config import RunConfig
from lungvit.data import CLASS_INDEX
from lungvit.data import CLASS_NAMES
from lungvit.data import SPLIT_NAMES
from lungvit.data import SplitDataset
from lungvit.data import apply_manifest
from lungvit.data import gen_synthetic
from lungvit.data import load_image_dir
from lungvit.data import normalize_pixels
from lungvit.data import read_image
from lungvit.data import read_manifest
from lungvit.data import resize_square
from lungvit.data import split_dataset
from lungvit.data import write_image_dir
from lungvit.data import write_manifest
from lungvit.errors import EXIT_USAGE
from lungvit.errors import InvalidClassError
from lungvit.errors import LungVitError
from lungvit.interpret import METHODS
from lungvit.interpret import explain
from lungvit.interpret import render_heatmap
from lungvit.log import logger
from lungvit.metrics import write_metrics_json
from lungvit.metrics import write_roc_csv
from lungvit.model import ViTParams
from lungvit.model import init_params
from lungvit.model import load_checkpoint
from lungvit.model import save_checkpoint
from lungvit.pipeline import evaluate
from lungvit.pipeline import fine_tune
from lungvit.pipeline import random_head
from lungvit.pipeline import run_experiment
from lungvit.pipeline import write_epoch_log
from lungvit.pipeline import write_experiment_table
from lungvit.pipeline import zero_shot_eval

DEFAULT_PER_CLASS: Final = 100
DEFAULT_SYNTH_SIZE: Final = 32

Command = Callable[[RunConfig, argparse.Namespace], None]


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _ensure_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise LungVitError(f"cannot create directory {str(path)!r}: {e}") from e


def _load_split(cfg: RunConfig) -> SplitDataset:
    cfg.require("data", "manifest")
    assert cfg.data is not None
    assert cfg.manifest is not None
    return apply_manifest(load_image_dir(cfg.data), read_manifest(cfg.manifest))


def _load_params(cfg: RunConfig) -> ViTParams:
    cfg.require("ckpt")
    assert cfg.ckpt is not None
    params, _ = load_checkpoint(cfg.ckpt)
    return params


def parse_class(raw: str, num_classes: int = len(CLASS_NAMES)) -> int:
    """A class index or one of the class names."""
    if raw in CLASS_INDEX:
        return CLASS_INDEX[raw]
    try:
        index = int(raw)
    except ValueError:
        raise InvalidClassError(
            f"unknown class {raw!r}: use 0-{num_classes - 1} or one of {', '.join(CLASS_NAMES)}"
        ) from None
    if not 0 <= index < num_classes:
        raise InvalidClassError(f"class {index} is not in [0, {num_classes})")
    return index


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_synth(cfg: RunConfig, args: argparse.Namespace) -> None:
    cfg.require("out")
    assert cfg.out is not None
    items = gen_synthetic(args.per_class, args.size, cfg.seed, noise=args.noise)
    _ensure_dir(cfg.out)
    write_image_dir(items, cfg.out)


def cmd_split(cfg: RunConfig, args: argparse.Namespace) -> None:  # noqa: ARG001
    cfg.require("data", "out")
    assert cfg.data is not None
    assert cfg.out is not None
    dataset = split_dataset(load_image_dir(cfg.data), cfg.seed, stratified=cfg.stratified)
    write_manifest(dataset, cfg.out)
    logger.info("wrote manifest %s", cfg.out)


def cmd_train(cfg: RunConfig, args: argparse.Namespace) -> None:  # noqa: ARG001
    cfg.require("out", "log")
    assert cfg.out is not None
    assert cfg.log is not None
    split = _load_split(cfg)
    params = init_params(cfg.vit_config(), cfg.init_seed)
    best, records = fine_tune(params, split, cfg.train_config())
    save_checkpoint(best, best.config, cfg.out)
    write_epoch_log(records, cfg.log)


def cmd_eval(cfg: RunConfig, args: argparse.Namespace) -> None:
    cfg.require("out")
    assert cfg.out is not None
    params = _load_params(cfg)
    split = _load_split(cfg)
    report = evaluate(params, split[args.split])
    logger.info("%s accuracy %.4f", args.split, report.accuracy)
    write_metrics_json(report, cfg.out)


def cmd_zeroshot(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Frozen backbone (checkpoint or seeded init) with a freshly drawn projector."""
    cfg.require("out")
    assert cfg.out is not None
    if cfg.ckpt:
        params = random_head(_load_params(cfg), cfg.init_seed)
    else:
        params = init_params(cfg.vit_config(), cfg.init_seed)
    split = _load_split(cfg)
    if args.split == "test":
        report = zero_shot_eval(params, split)
    else:
        report = evaluate(params, split[args.split])
    write_metrics_json(report, cfg.out)


def cmd_roc(cfg: RunConfig, args: argparse.Namespace) -> None:
    cfg.require("out")
    assert cfg.out is not None
    params = _load_params(cfg)
    report = evaluate(params, _load_split(cfg)[args.split])
    for curve in report.roc:
        name = CLASS_NAMES[curve.class_index]
        if curve.undefined:
            logger.info("AUC %s: undefined (class absent from the %s split)", name, args.split)
        else:
            logger.info("AUC %s: %.8f", name, curve.auc)
    write_roc_csv(report.roc, cfg.out)


def cmd_explain(cfg: RunConfig, args: argparse.Namespace) -> None:
    cfg.require("out")
    assert cfg.out is not None
    params = _load_params(cfg)
    target = parse_class(args.target_class, params.config.num_classes)
    pixels = resize_square(read_image(args.image), params.config.image_size, str(args.image))
    relevancy_map = explain(params, normalize_pixels(pixels), target, method=args.method)
    relevancy_map = replace(relevancy_map, source_id=str(args.image))
    render_heatmap(relevancy_map, pixels, cfg.out)


def cmd_experiment(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Zero-shot baseline, fine-tuning and both ROC sets into one output directory."""
    cfg.require("out")
    assert cfg.out is not None
    vit = cfg.vit_config()
    if cfg.data is not None:
        items = load_image_dir(cfg.data)
    else:
        items = gen_synthetic(args.per_class, vit.image_size, cfg.seed, noise=args.noise)
    split = split_dataset(items, cfg.seed, stratified=cfg.stratified)
    result = run_experiment(init_params(vit, cfg.init_seed), split, cfg.train_config())

    _ensure_dir(cfg.out)
    write_manifest(split, cfg.out / "manifest.csv")
    write_experiment_table(result, cfg.out / "table.csv")
    write_epoch_log(result.records, cfg.out / "epochs.csv")
    write_roc_csv(result.zero_shot_test.roc, cfg.out / "roc_zero_shot.csv")
    write_roc_csv(result.few_shot_test.roc, cfg.out / "roc_few_shot.csv")
    save_checkpoint(result.best_params, vit, cfg.out / "best.ckpt")


COMMANDS: Final[dict[str, tuple[Command, str]]] = {
    "synth": (cmd_synth, "write a synthetic 3-class image directory"),
    "split": (cmd_split, "split an image directory 60/20/20 into a manifest"),
    "train": (cmd_train, "fine-tune for a few epochs; write the best checkpoint and epoch log"),
    "eval": (cmd_eval, "evaluate a checkpoint on one split; write metrics JSON"),
    "zeroshot": (cmd_zeroshot, "evaluate a frozen backbone with an untrained head"),
    "roc": (cmd_roc, "write one-vs-rest ROC curves for one split"),
    "explain": (cmd_explain, "render a relevancy heatmap for one image"),
    "experiment": (cmd_experiment, "zero-shot vs few-shot table with ROC curves"),
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    """Options that map onto RunConfig; unset flags stay absent so the file can supply them."""
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", type=Path, help="flat key=value config file")
    common.add_argument("--preset", choices=["tiny", "base"])
    for key in run_config.VIT_OVERRIDES:
        kind = float if key == "drop_rate" else int
        common.add_argument(f"--{key.replace('_', '-')}", dest=key, type=kind)
    common.add_argument("--epochs", type=int)
    common.add_argument("--batch-size", dest="batch_size", type=int)
    common.add_argument("--lr", dest="learning_rate", type=float)
    common.add_argument("--optimizer", choices=["adam", "sgd"])
    common.add_argument("--momentum", type=float)
    common.add_argument("--freeze-backbone", dest="freeze_backbone", action="store_true")
    common.add_argument("--seed", type=int)
    common.add_argument("--stratified", action="store_true")
    for key in ("data", "manifest", "ckpt", "out", "log"):
        common.add_argument(f"--{key}", type=Path)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lungvit",
        description="Vision-transformer zero-shot / few-shot lung histology toolkit",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_options()
    sub = {
        name: commands.add_parser(name, parents=[common], help=text, description=text)
        for name, (_, text) in COMMANDS.items()
    }

    for name in ("synth", "experiment"):
        sub[name].add_argument("--per-class", dest="per_class", type=int, default=DEFAULT_PER_CLASS)
        sub[name].add_argument("--noise", type=float, default=0.1)
    sub["synth"].add_argument("--size", type=int, default=DEFAULT_SYNTH_SIZE)
    for name in ("eval", "zeroshot", "roc"):
        sub[name].add_argument("--split", choices=SPLIT_NAMES, default="test")
    sub["explain"].add_argument("--image", type=Path, required=True)
    sub["explain"].add_argument("--class", dest="target_class", required=True)
    sub["explain"].add_argument("--method", choices=METHODS, default="relevancy")
    return parser


_NON_CONFIG: Final = frozenset(
    {"command", "config", "per_class", "noise", "size", "split", "image", "target_class", "method"}
)


def resolve_args(args: argparse.Namespace) -> RunConfig:
    flags: dict[str, Any] = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    file_values = run_config.read_config_file(args.config) if "config" in args else {}
    return run_config.resolve(file_values, flags)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        log.configure()
        cfg = resolve_args(args)
        logger.debug("resolved configuration:\n%s", cfg.as_text())
        command, _ = COMMANDS[args.command]
        command(cfg, args)
    except LungVitError as e:
        logger.error("%s: %s", args.command, e)  # noqa: TRY400
        return e.exit_code
    except OSError as e:
        logger.error("%s: %s", args.command, e)  # noqa: TRY400
        return EXIT_USAGE
    return 0
