#!/usr/bin/env python3
"""Generate ROC and accuracy chart SVGs from experiment outputs."""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from lungvit.metrics import read_roc_csv
from tools.chart_svg import DARK
from tools.chart_svg import LIGHT
from tools.chart_svg import AccuracyBar
from tools.chart_svg import ChartWindow
from tools.chart_svg import Curve
from tools.chart_svg import EpochBars
from tools.chart_svg import RocPlot


def roc_plot(path: Path) -> RocPlot:
    curves = read_roc_csv(path)
    return RocPlot([
        Curve(name, [(p.fpr, p.tpr) for p in points]) for name, points in curves.items()
    ])


def accuracy_bars(path: Path) -> EpochBars:
    """One bar per row of an experiment table; few-shot epochs compare against zero-shot."""
    with path.open(newline="") as f:
        rows = list(csv.DictReader(f))
    baseline: AccuracyBar | None = None
    bars = []
    for row in rows:
        if row["model"] == "zero_shot":
            baseline = AccuracyBar("zero-shot", float(row["test_acc"]), "zero_shot")
            bars.append(baseline)
        else:
            label = f"epoch {row['epoch']}"
            bars.append(AccuracyBar(label, float(row["test_acc"]), "few_shot", baseline))
    return EpochBars(bars)


def main() -> None:
    parser = argparse.ArgumentParser(description="Generate experiment chart SVGs")
    parser.add_argument("--roc", type=Path, action="append", default=[],
                        help="ROC CSV written by `lungvit roc` or `lungvit experiment`")
    parser.add_argument("--table", type=Path, help="Experiment table CSV (table.csv)")
    parser.add_argument("--theme", choices=["dark", "light", "both"], default="both")
    parser.add_argument("--output-dir", "-o", type=Path, default=Path("assets"))
    args = parser.parse_args()

    if not args.roc and args.table is None:
        parser.error("nothing to draw: pass --roc and/or --table")

    panels = [roc_plot(path) for path in args.roc]
    if args.table is not None:
        panels.append(accuracy_bars(args.table))
    chart = ChartWindow(panels, title="lungvit experiment")
    args.output_dir.mkdir(parents=True, exist_ok=True)

    themes = []
    if args.theme in ("dark", "both"):
        themes.append(("dark", DARK))
    if args.theme in ("light", "both"):
        themes.append(("light", LIGHT))

    for name, theme in themes:
        output_path = args.output_dir / f"chart_{name}.svg"
        chart.save(str(output_path), theme)
        print(f"Generated {output_path}")


if __name__ == "__main__":
    main()
