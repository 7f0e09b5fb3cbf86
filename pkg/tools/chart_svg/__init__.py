"""Declarative DSL for ROC and accuracy chart SVGs."""

from tools.chart_svg.elements import AccuracyBar
from tools.chart_svg.elements import ChartWindow
from tools.chart_svg.elements import Curve
from tools.chart_svg.elements import EpochBars
from tools.chart_svg.elements import RocPlot
from tools.chart_svg.themes import DARK
from tools.chart_svg.themes import LIGHT
from tools.chart_svg.themes import Theme

__all__ = [
    "DARK",
    "LIGHT",
    "AccuracyBar",
    "ChartWindow",
    "Curve",
    "EpochBars",
    "RocPlot",
    "Theme",
]
