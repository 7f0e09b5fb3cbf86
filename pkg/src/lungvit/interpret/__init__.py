# SPDX-License-Identifier: MIT
from lungvit.interpret.relevancy import METHODS
from lungvit.interpret.relevancy import Method
from lungvit.interpret.relevancy import RelevancyMap
from lungvit.interpret.relevancy import attention_gradients
from lungvit.interpret.relevancy import explain
from lungvit.interpret.relevancy import gradcam_attention
from lungvit.interpret.relevancy import propagate_relevancy
from lungvit.interpret.relevancy import relevancy
from lungvit.interpret.relevancy import relevancy_from_trace
from lungvit.interpret.relevancy import trace_for
from lungvit.interpret.render import COLORMAP
from lungvit.interpret.render import apply_colormap
from lungvit.interpret.render import normalize_map
from lungvit.interpret.render import overlay
from lungvit.interpret.render import render_heatmap
from lungvit.interpret.render import write_map_csv

__all__ = [
    "COLORMAP",
    "METHODS",
    "Method",
    "RelevancyMap",
    "apply_colormap",
    "attention_gradients",
    "explain",
    "gradcam_attention",
    "normalize_map",
    "overlay",
    "propagate_relevancy",
    "relevancy",
    "relevancy_from_trace",
    "render_heatmap",
    "trace_for",
    "write_map_csv",
]
