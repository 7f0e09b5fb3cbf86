# SPDX-License-Identifier: MIT
from __future__ import annotations

import numpy as np
import pytest

from lungvit.metrics import multiclass_roc
from lungvit.metrics import write_roc_csv
from tools.chart_svg import DARK
from tools.chart_svg import LIGHT
from tools.chart_svg import AccuracyBar
from tools.chart_svg import ChartWindow
from tools.chart_svg import Curve
from tools.chart_svg import EpochBars
from tools.chart_svg import RocPlot
from tools.generate_chart import accuracy_bars
from tools.generate_chart import roc_plot


def test_curve_area_is_trapezoid():
    assert Curve("diag", [(0.0, 0.0), (1.0, 1.0)]).area() == 0.5
    assert Curve("step", [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]).area() == 1.0


def test_gain_label():
    zero = AccuracyBar("zero-shot", 1 / 3, "zero_shot")
    few = AccuracyBar("epoch 1", 0.9, "few_shot", zero)
    assert zero.gain_label() is None
    assert few.gain_label() == "+56.7 pts"
    assert few.format_accuracy() == "90.0%"


@pytest.mark.parametrize("theme", [DARK, LIGHT], ids=["dark", "light"])
def test_window_renders_every_panel(theme):
    pytest.importorskip("svg")
    window = ChartWindow([
        RocPlot([Curve("lung_aca", [(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)])]),
        EpochBars([AccuracyBar("zero-shot", 0.3, "zero_shot")]),
    ])
    text = window.render(theme)
    assert text.startswith("<svg")
    assert "lung_aca  AUC 0.750" in text
    assert "30.0%" in text
    assert theme.bg in text


def test_chart_inputs_from_experiment_files(tmp_path):
    roc = tmp_path / "roc.csv"
    probabilities = np.array([[0.9, 0.05, 0.05], [0.1, 0.8, 0.1], [0.2, 0.2, 0.6]])
    write_roc_csv(multiclass_roc(probabilities, [0, 1, 2]), roc)
    plot = roc_plot(roc)
    assert [c.label for c in plot.curves] == ["lung_aca", "lung_scc", "lung_n"]
    assert all(c.area() == 1.0 for c in plot.curves)

    table = tmp_path / "table.csv"
    table.write_text("model,epoch,val_acc,test_acc\nzero_shot,0,0.3,0.25\nfew_shot,1,0.8,0.75\n")
    bars = accuracy_bars(table).bars
    assert [b.label for b in bars] == ["zero-shot", "epoch 1"]
    assert bars[1].baseline is bars[0]
