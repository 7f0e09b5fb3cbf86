from __future__ import annotations

import svg

from tools.chart_svg.elements import AccuracyBar
from tools.chart_svg.elements import ChartWindow
from tools.chart_svg.elements import EpochBars
from tools.chart_svg.elements import Panel
from tools.chart_svg.elements import RocPlot
from tools.chart_svg.themes import Theme

FONT_MONO = "SF Mono, Menlo, Consolas, monospace"
FONT_SIZE = 13
LINE_HEIGHT = 26
TITLE_BAR_HEIGHT = 32
PADDING_X = 20
PADDING_Y = 16
BAR_HEIGHT = 14
BAR_LABEL_GAP = 10
CHAR_WIDTH = 7.8
MIN_BAR_WIDTH = 150
AXIS_GAP = 36
LEGEND_GAP = 16


def panel_width(panel: Panel) -> float:
    if isinstance(panel, RocPlot):
        legend = max((len(c.legend()) for c in panel.curves), default=0) * CHAR_WIDTH
        return 2 * PADDING_X + AXIS_GAP + panel.size + LEGEND_GAP + legend
    label = max((len(b.label) for b in panel.bars), default=0) * CHAR_WIDTH
    return 2 * PADDING_X + label + BAR_LABEL_GAP + MIN_BAR_WIDTH + 12 * CHAR_WIDTH


def render_window(window: ChartWindow, theme: Theme) -> str:
    natural = max((panel_width(p) for p in window.panels), default=window.min_width)
    width = int(window.width if window.width is not None else natural)
    width = max(window.min_width, min(window.max_width, width))

    body: list[svg.Element] = []
    y = PADDING_Y
    for panel in window.panels:
        if isinstance(panel, RocPlot):
            elements, height = render_roc(panel, theme, y)
        else:
            elements, height = render_bars(panel, theme, y, width)
        body.extend(elements)
        y += height + PADDING_Y

    offset = TITLE_BAR_HEIGHT if window.chrome else 0
    total_height = offset + y

    elements: list[svg.Element] = []
    if window.chrome:
        elements.extend([
            svg.Rect(width=width, height=total_height, rx=12, fill=theme.bg),
            svg.Rect(width=width, height=TITLE_BAR_HEIGHT, rx=12, fill=theme.title_bar),
            svg.Rect(y=20, width=width, height=12, fill=theme.title_bar),
            svg.Circle(cx=20, cy=16, r=6, fill="#ff5f56"),
            svg.Circle(cx=40, cy=16, r=6, fill="#ffbd2e"),
            svg.Circle(cx=60, cy=16, r=6, fill="#27ca40"),
            svg.Text(
                x=width // 2,
                y=20,
                fill=theme.dim,
                font_family=FONT_MONO,
                font_size=12,
                text_anchor="middle",
                text=window.title,
            ),
        ])
    else:
        elements.append(svg.Rect(width=width, height=total_height, fill=theme.bg))

    elements.append(svg.G(
        style=f"font-family: {FONT_MONO}; font-size: {FONT_SIZE}px; white-space: pre",
        transform=f"translate(0, {offset})" if offset else None,
        elements=body,
    ))
    return str(svg.SVG(viewBox=svg.ViewBoxSpec(0, 0, width, total_height), elements=elements))


def render_roc(plot: RocPlot, theme: Theme, y: int) -> tuple[list[svg.Element], int]:
    left = PADDING_X + AXIS_GAP
    top = y
    size = plot.size

    def px(fpr: float, tpr: float) -> tuple[float, float]:
        return left + fpr * size, top + (1.0 - tpr) * size

    elements: list[svg.Element] = [
        svg.Rect(x=left, y=top, width=size, height=size, fill="none", stroke=theme.grid),
    ]
    for tick in (0.25, 0.5, 0.75):
        gx, gy = px(tick, tick)
        elements.append(svg.Line(x1=gx, y1=top, x2=gx, y2=top + size, stroke=theme.grid))
        elements.append(svg.Line(x1=left, y1=gy, x2=left + size, y2=gy, stroke=theme.grid))
    elements.append(svg.Line(
        x1=left,
        y1=top + size,
        x2=left + size,
        y2=top,
        stroke=theme.chance,
        stroke_dasharray=[4, 4],
    ))
    elements.append(svg.Text(
        x=left + size // 2, y=top + size + 18, fill=theme.dim, text_anchor="middle", text="FPR"
    ))
    elements.append(svg.Text(
        x=PADDING_X, y=top + size // 2, fill=theme.dim, text="TPR"
    ))

    legend_x = left + size + LEGEND_GAP
    for i, curve in enumerate(plot.curves):
        color = theme.series[i % len(theme.series)]
        flat: list[float] = []
        for fpr, tpr in curve.points:
            flat.extend(px(fpr, tpr))
        elements.append(svg.Polyline(points=flat, fill="none", stroke=color, stroke_width=2))
        elements.append(svg.Text(
            x=legend_x, y=top + (i + 1) * LINE_HEIGHT - 10, fill=color, text=curve.legend()
        ))

    return elements, size + LINE_HEIGHT


def render_bars(
    chart: EpochBars, theme: Theme, y: int, width: int
) -> tuple[list[svg.Element], int]:
    label_width = max((len(b.label) for b in chart.bars), default=0) * CHAR_WIDTH
    bar_left = PADDING_X + label_width + BAR_LABEL_GAP
    max_bar_width = width - bar_left - PADDING_X - 12 * CHAR_WIDTH

    elements: list[svg.Element] = []
    for row, bar in enumerate(chart.bars):
        elements.extend(render_bar(bar, theme, y + row * LINE_HEIGHT, bar_left, max_bar_width))
    return elements, len(chart.bars) * LINE_HEIGHT


def render_bar(
    bar: AccuracyBar, theme: Theme, y: int, left: float, max_bar_width: float
) -> list[svg.Element]:
    bar_width = max(1, int(max_bar_width * bar.accuracy))
    color = theme.few_shot if bar.style == "few_shot" else theme.zero_shot
    bar_y = y + (LINE_HEIGHT - BAR_HEIGHT) // 2
    baseline_y = bar_y + BAR_HEIGHT - 3

    spans = [svg.TSpan(text=bar.format_accuracy(), fill=color, font_weight="600")]
    gain = bar.gain_label()
    if gain is not None:
        spans.append(svg.TSpan(text=f"  {gain}", fill=theme.dim))

    return [
        svg.Text(x=PADDING_X, y=baseline_y, fill=theme.text, text=bar.label),
        svg.Rect(x=left, y=bar_y, width=bar_width, height=BAR_HEIGHT, rx=2, fill=color),
        svg.Text(x=left + bar_width + BAR_LABEL_GAP, y=baseline_y, elements=spans),
    ]
