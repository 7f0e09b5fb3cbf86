# SPDX-License-Identifier: MIT
from __future__ import annotations

import math

import numpy as np
import pytest

from lungvit.data import LabeledImage
from lungvit.data import read_image
from lungvit.errors import DataError
from lungvit.errors import InvalidClassError
from lungvit.errors import MissingTraceError
from lungvit.errors import ShapeError
from lungvit.interpret import COLORMAP
from lungvit.interpret import RelevancyMap
from lungvit.interpret import apply_colormap
from lungvit.interpret import attention_gradients
from lungvit.interpret import explain
from lungvit.interpret import gradcam_attention
from lungvit.interpret import normalize_map
from lungvit.interpret import overlay
from lungvit.interpret import propagate_relevancy
from lungvit.interpret import relevancy
from lungvit.interpret import render_heatmap
from lungvit.interpret import trace_for
from lungvit.model import ViTParams
from lungvit.model import forward
from lungvit.model import init_params
from lungvit.pipeline import untrained_head
from tests.conftest import SINGLE_BLOCK
from tests.conftest import TINY
from tests.conftest import random_image
from tests.test_model import ref_gelu
from tests.test_model import ref_layer_norm
from tests.test_model import ref_softmax


def single_block_logits(params: ViTParams, image: np.ndarray, attn: np.ndarray | None):
    """
    Reference logits of a one-block model; ``attn`` (heads, tokens, tokens) replaces
    the computed attention when given. Also returns the computed attention.
    """
    w = {name: tensor.data for name, tensor in params.items()}
    c = params.config
    p, g, d, dh = c.patch_size, c.grid_size, c.embed_dim, c.head_dim
    rows = [
        image[:, gy * p : (gy + 1) * p, gx * p : (gx + 1) * p].reshape(-1)
        for gy in range(g)
        for gx in range(g)
    ]
    x = np.stack(rows) @ w["patch_embed.weight"] + w["patch_embed.bias"]
    x = np.vstack([w["cls_token"][None, :], x]) + w["pos_embed"]

    h = ref_layer_norm(x, w["blocks.0.norm1.gamma"], w["blocks.0.norm1.beta"])
    qkv = h @ w["blocks.0.attn.qkv.weight"] + w["blocks.0.attn.qkv.bias"]
    q, k, v = qkv[:, :d], qkv[:, d : 2 * d], qkv[:, 2 * d :]
    computed = np.stack(
        [
            ref_softmax(q[:, i * dh : (i + 1) * dh] @ k[:, i * dh : (i + 1) * dh].T / math.sqrt(dh))
            for i in range(c.heads)
        ]
    )
    used = computed if attn is None else attn
    context = np.hstack([used[i] @ v[:, i * dh : (i + 1) * dh] for i in range(c.heads)])
    x = x + context @ w["blocks.0.attn.proj.weight"] + w["blocks.0.attn.proj.bias"]
    h = ref_layer_norm(x, w["blocks.0.norm2.gamma"], w["blocks.0.norm2.beta"])
    h = ref_gelu(h @ w["blocks.0.mlp.fc1.weight"] + w["blocks.0.mlp.fc1.bias"])
    x = x + h @ w["blocks.0.mlp.fc2.weight"] + w["blocks.0.mlp.fc2.bias"]
    cls = ref_layer_norm(x, w["norm.gamma"], w["norm.beta"])[0]
    hidden = ref_gelu(cls @ w["head.fc1.weight"] + w["head.fc1.bias"])
    return hidden @ w["head.fc2.weight"] + w["head.fc2.bias"], computed


@pytest.fixture
def single_block_params() -> ViTParams:
    return init_params(SINGLE_BLOCK, seed=2)


# ===========================================================================
#  Relevancy propagation
# ===========================================================================


class TestRelevancy:
    def test_grid_shape(self, tiny_params):
        result = relevancy(tiny_params, random_image(), 0)
        assert result.grid.shape == (TINY.grid_size, TINY.grid_size)
        assert result.target_class == 0
        assert result.method == "relevancy"

    def test_nonnegative_over_random_trials(self):
        rng = np.random.default_rng(0)
        for trial in range(1000):
            if trial % 50 == 0:
                params = init_params(TINY, trial)
            image = rng.uniform(-1.0, 1.0, size=(3, 32, 32))
            result = relevancy(params, image, int(rng.integers(0, 3)))
            assert (result.grid >= 0).all()

    def test_zeroed_head_leaves_identity(self, tiny_params):
        trace, _ = trace_for(untrained_head(tiny_params), random_image())
        pairs = attention_gradients(trace, 1)
        assert all(not grad.any() for _, grad in pairs)
        assert np.array_equal(propagate_relevancy(pairs), np.eye(TINY.num_tokens))
        result = relevancy(untrained_head(tiny_params), random_image(), 1)
        assert not result.grid.any()

    def test_single_block_is_class_row_of_weighted_attention(self, single_block_params):
        image = random_image(SINGLE_BLOCK, seed=3)
        trace, _ = trace_for(single_block_params, image)
        ((A, grad),) = attention_gradients(trace, 2)
        a_bar = np.maximum((A * grad).mean(axis=0), 0.0)
        expected = (a_bar @ np.eye(SINGLE_BLOCK.num_tokens))[0, 1:].reshape(4, 4)
        result = relevancy(single_block_params, image, 2)
        assert np.allclose(result.grid, expected, rtol=0, atol=1e-10)

    def test_attention_gradient_matches_reference(self, single_block_params):
        image = random_image(SINGLE_BLOCK, seed=4)
        target = 1
        trace, _ = trace_for(single_block_params, image)
        ((A, grad),) = attention_gradients(trace, target)

        _, computed = single_block_logits(single_block_params, image, None)
        assert np.allclose(A, computed, rtol=0, atol=1e-12)

        step = 1e-6
        numeric = np.zeros_like(A)
        for index in np.ndindex(*A.shape):
            up, down = computed.copy(), computed.copy()
            up[index] += step
            down[index] -= step
            hi, _ = single_block_logits(single_block_params, image, up)
            lo, _ = single_block_logits(single_block_params, image, down)
            numeric[index] = (hi[target] - lo[target]) / (2 * step)
        assert np.allclose(grad, numeric, rtol=1e-5, atol=1e-8)

    def test_deterministic(self, tiny_params):
        image = random_image(seed=6)
        a = relevancy(tiny_params, image, 2)
        b = relevancy(tiny_params, image, 2)
        assert a.grid.tobytes() == b.grid.tobytes()

    def test_parameter_gradients_untouched(self, tiny_params):
        relevancy(tiny_params, random_image(), 0)
        assert all(not t.grad.any() for t in tiny_params.values())

    def test_argmax_survives_normalization(self, tiny_params):
        for seed in range(10):
            result = relevancy(tiny_params, random_image(seed=seed), seed % 3)
            normalized = normalize_map(result.grid)
            assert np.argmax(normalized) == np.argmax(result.grid)

    @pytest.mark.parametrize("target", [-1, 3])
    def test_invalid_class(self, tiny_params, target):
        with pytest.raises(InvalidClassError):
            relevancy(tiny_params, random_image(), target)

    def test_missing_attention_trace(self, tiny_params):
        trace = forward(tiny_params.detached(), random_image())
        with pytest.raises(MissingTraceError):
            attention_gradients(trace, 0)

    def test_labeled_image_keeps_source_id(self, tiny_params, synthetic_items):
        item = synthetic_items[0]
        result = relevancy(tiny_params, item, item.label)
        assert result.source_id == item.source_id

    def test_map_rejects_negative_entries(self):
        with pytest.raises(ValueError, match="nonnegative"):
            RelevancyMap(np.array([[0.0, -1.0], [0.0, 0.0]]), 0)


class TestGradcam:
    def test_nonnegative_grid(self, tiny_params):
        for seed in range(20):
            result = gradcam_attention(tiny_params, random_image(seed=seed), seed % 3)
            assert result.grid.shape == (4, 4)
            assert (result.grid >= 0).all()
            assert result.method == "gradcam"

    def test_explain_dispatch(self, tiny_params):
        image = random_image(seed=1)
        assert explain(tiny_params, image, 0).method == "relevancy"
        assert explain(tiny_params, image, 0, method="gradcam").method == "gradcam"
        with pytest.raises(ValueError, match="unknown method"):
            explain(tiny_params, image, 0, method="rollout")  # type: ignore[arg-type]


# ===========================================================================
#  Rendering
# ===========================================================================


def gray_image(size: int = 32) -> LabeledImage:
    return LabeledImage(np.full((3, size, size), 0.5), 2, "lung_n", "lung_n/gray.ppm")


class TestRender:
    def test_colormap_endpoints(self):
        assert COLORMAP.shape == (256, 3)
        assert COLORMAP[0].tolist() == [0.0, 0.0, 1.0]
        assert COLORMAP[255].tolist() == [1.0, 0.0, 0.0]
        assert COLORMAP[51].tolist() == pytest.approx([0.2, 0.0, 0.8])

    def test_constant_map_normalizes_to_zero(self):
        assert not normalize_map(np.full((4, 4), 3.5)).any()

    def test_zero_map_is_uniform_tint(self):
        image = gray_image()
        result = overlay(RelevancyMap(np.zeros((4, 4)), 0), image)
        expected = 0.5 * image.pixels + 0.5 * COLORMAP[0][:, None, None]
        assert np.array_equal(result, expected)

    @pytest.mark.parametrize(("row", "col"), [(0, 0), (1, 2), (3, 3)])
    def test_hot_patch_is_reddest_in_its_footprint(self, row, col):
        grid = np.zeros((4, 4))
        grid[row, col] = 1.0
        result = overlay(RelevancyMap(grid, 0), gray_image())
        redness = result[0] - result[2]
        y, x = np.unravel_index(int(np.argmax(redness)), redness.shape)
        assert (y // 8, x // 8) == (row, col)

    def test_overlay_needs_tiling_image(self):
        with pytest.raises(ShapeError, match="does not tile"):
            overlay(RelevancyMap(np.zeros((4, 4)), 0), np.zeros((3, 30, 30)))

    def test_apply_colormap_shape(self):
        colors = apply_colormap(np.linspace(0, 1, 6).reshape(2, 3))
        assert colors.shape == (3, 2, 3)

    def test_render_writes_ppm_and_csv(self, tmp_path):
        grid = np.arange(16, dtype=np.float64).reshape(4, 4) / 7.0
        ppm, csv_path = render_heatmap(RelevancyMap(grid, 1), gray_image(), tmp_path / "heat.ppm")
        assert ppm.read_bytes()[:2] == b"P6"
        assert read_image(ppm).shape == (3, 32, 32)
        rows = [line.split(",") for line in csv_path.read_text().splitlines()]
        assert len(rows) == 4
        assert all(len(row) == 4 for row in rows)
        assert np.array_equal(np.array(rows, dtype=np.float64), grid)

    def test_render_is_byte_identical(self, tmp_path, tiny_params, synthetic_items):
        item = synthetic_items[5]
        result = relevancy(tiny_params, item, item.label)
        a, _ = render_heatmap(result, item, tmp_path / "a.ppm")
        b, _ = render_heatmap(result, item, tmp_path / "b.ppm")
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable_path(self, tmp_path):
        blank = RelevancyMap(np.zeros((4, 4)), 0)
        with pytest.raises(DataError):
            render_heatmap(blank, gray_image(), tmp_path / "x" / "h.ppm")
