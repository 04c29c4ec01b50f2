from pathlib import Path

import numpy as np
import pytest
import torch

from egiinet.harness.checkpoint import Checkpoint
from egiinet.harness.visualize import attention_heatmap, overlay_heatmap, received_attention, visualize_attention
from egiinet.models.egiinet import build_model
from egiinet.utils.io import read_image

from ..impls.gen_completion_response.test_generator_utils import write_toy_manifest
from .test_harness_utils import tiny_config


def tiny_checkpoint(variant: str = "full") -> Checkpoint:
    config = tiny_config(variant=variant)
    torch.manual_seed(0)
    return Checkpoint(model=build_model(**config.model_kwargs()), config=config)


def test_received_attention_mass() -> None:
    attention = torch.softmax(torch.randn(2, 16, 9), dim=-1)
    mass = received_attention(attention)
    assert mass.shape == (9,)
    assert mass.sum() == pytest.approx(16.0)
    with pytest.raises(ValueError, match=r"invalid shape"):
        received_attention(attention[0])


def test_received_attention_counts_point_queries() -> None:
    attention = torch.zeros(2, 16, 9)
    attention[:, :10, 3] = 1.0
    attention[0, 10:, 5] = 1.0
    attention[1, 10:, 7] = 1.0
    expected = np.zeros(9)
    expected[3], expected[5], expected[7] = 10.0, 3.0, 3.0
    np.testing.assert_allclose(received_attention(attention), expected)


class TestAttentionHeatmap:
    def test_range(self) -> None:
        heat = attention_heatmap(np.arange(16.0), (4, 4), 16, 16)
        assert heat.shape == (16, 16)
        assert heat.min() == 0.0
        assert heat.max() == pytest.approx(1.0)

    def test_peak_location(self) -> None:
        mass = np.zeros(16)
        mass[5] = 1.0
        heat = attention_heatmap(mass, (4, 4), 16, 16)
        row, col = np.unravel_index(np.argmax(heat), heat.shape)
        assert (row // 4, col // 4) == (1, 1)

    def test_constant(self) -> None:
        assert np.array_equal(attention_heatmap(np.ones(16), (4, 4), 8, 8), np.zeros((8, 8)))

    def test_overlay(self) -> None:
        view = np.full((8, 8, 3), 0.5, dtype=np.float32)
        out = overlay_heatmap(view, np.zeros((8, 8), dtype=np.float32), alpha=0.0)
        assert np.allclose(out, view)
        blended = overlay_heatmap(view, np.ones((8, 8), dtype=np.float32))
        assert blended.shape == (8, 8, 3)
        assert 0.0 <= blended.min() and blended.max() <= 1.0


class TestVisualizeAttention:
    def test_writes_overlay(self, tmp_path: Path) -> None:
        manifest = write_toy_manifest(tmp_path, 2, complete_points=80, partial_points=64)
        result = visualize_attention(tiny_checkpoint(), manifest, tmp_path / "out" / "a.png", sample_index=1)
        assert result["mass"].shape == (16,)
        assert result["mass"].sum() == pytest.approx(16.0, abs=1e-4)
        assert result["heatmap"].shape == (16, 16)
        assert read_image(result["path"]).shape == (16, 16, 3)

    def test_no_image_variant(self, tmp_path: Path) -> None:
        manifest = write_toy_manifest(tmp_path, 1, complete_points=80, partial_points=64)
        with pytest.raises(ValueError, match=r"no image branch"):
            visualize_attention(tiny_checkpoint("no_image"), manifest, tmp_path / "a.png")

    def test_bad_index(self, tmp_path: Path) -> None:
        manifest = write_toy_manifest(tmp_path, 1, complete_points=80, partial_points=64)
        with pytest.raises(IndexError, match=r"invalid sample_index"):
            visualize_attention(tiny_checkpoint(), manifest, tmp_path / "a.png", sample_index=3)
