from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from typing import TYPE_CHECKING
from typing import Literal

if TYPE_CHECKING:
    from tools.chart_svg.themes import Theme


@dataclass
class Curve:
    """One-vs-rest ROC curve as (fpr, tpr) pairs in sweep order."""

    label: str
    points: list[tuple[float, float]]

    def area(self) -> float:
        total = 0.0
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            total += (x1 - x0) * (y0 + y1) / 2
        return total

    def legend(self) -> str:
        return f"{self.label}  AUC {self.area():.3f}"


@dataclass
class RocPlot:
    curves: list[Curve] = field(default_factory=list)
    size: int = 320


@dataclass
class AccuracyBar:
    """Test accuracy of one model, optionally compared to a baseline bar."""

    label: str
    accuracy: float
    style: Literal["zero_shot", "few_shot"]
    baseline: AccuracyBar | None = None

    def format_accuracy(self) -> str:
        return f"{100 * self.accuracy:.1f}%"

    def gain_label(self) -> str | None:
        if self.baseline is None:
            return None
        return f"{100 * (self.accuracy - self.baseline.accuracy):+.1f} pts"


@dataclass
class EpochBars:
    bars: list[AccuracyBar] = field(default_factory=list)


Panel = RocPlot | EpochBars


@dataclass
class ChartWindow:
    """Window with a title bar stacking one or more panels vertically."""

    panels: list[Panel]
    title: str = "lungvit"
    width: int | None = None
    min_width: int = 400
    max_width: int = 1200
    chrome: bool = True

    def render(self, theme: Theme | None = None) -> str:
        from tools.chart_svg.render import render_window

        if theme is None:
            from tools.chart_svg.themes import DARK

            theme = DARK
        return render_window(self, theme)

    def save(self, path: str, theme: Theme | None = None) -> None:
        from pathlib import Path

        Path(path).write_text(self.render(theme))
