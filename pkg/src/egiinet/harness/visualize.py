"""Projection of the fusion cross-attention back onto the guidance view."""

import logging
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import cv2
import numpy as np
import torch

from egiinet.harness.checkpoint import Checkpoint, load_checkpoint
from egiinet.harness.synth_data import load_sample_arrays, read_manifest
from egiinet.utils.io import write_image

LOG = logging.getLogger(__name__)

PathLike = Union[str, Path]


def received_attention(attention: torch.Tensor) -> np.ndarray:
    """Attention mass each image token receives.

    :param attention: (heads, N'_pc, N'_img) weights of one sample.

    :return: (N'_img,) masses; heads are averaged and point cloud queries summed, so
        the masses add up to N'_pc.
    """
    if attention.dim() != 3:
        raise ValueError(f"received_attention invalid shape ({tuple(attention.shape)}). Must be (heads, N_q, N_kv)")
    return attention.detach().double().mean(dim=0).sum(dim=0).cpu().numpy()


def attention_heatmap(mass: np.ndarray, grid: Tuple[int, int], height: int, width: int) -> np.ndarray:
    """Bilinearly upsample per-patch ``mass`` from the patch ``grid`` to a (height, width) map in [0, 1]."""
    patch_map = np.asarray(mass, dtype=np.float32).reshape(grid)
    heat = cv2.resize(patch_map, (width, height), interpolation=cv2.INTER_LINEAR)
    low, high = float(heat.min()), float(heat.max())
    if high - low <= 0:
        return np.zeros((height, width), dtype=np.float32)
    return ((heat - low) / (high - low)).astype(np.float32)


def overlay_heatmap(view: np.ndarray, heatmap: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    """Blend a color-mapped ``heatmap`` over an (H, W, 3) ``view``; both in [0, 1]."""
    colored = cv2.applyColorMap(np.round(heatmap * 255).astype(np.uint8), cv2.COLORMAP_JET)
    colored = cv2.cvtColor(colored, cv2.COLOR_BGR2RGB).astype(np.float32) / 255.0
    return np.clip((1.0 - alpha) * view + alpha * colored, 0.0, 1.0)


def visualize_attention(
    checkpoint: Union[Checkpoint, PathLike],
    manifest_path: PathLike,
    out_path: PathLike,
    sample_index: int = 0,
    alpha: float = 0.5,
) -> Dict[str, Any]:
    """Render the fusion attention of one manifest sample as a heatmap over its view.

    :raises ValueError: The model has no image branch.
    :raises IndexError: ``sample_index`` is outside the manifest.

    :return: The written path, the unnormalized per-token ``mass`` and the ``heatmap``.
    """
    if not isinstance(checkpoint, Checkpoint):
        checkpoint = load_checkpoint(checkpoint)
    model = checkpoint.model
    if not model.uses_image:
        raise ValueError(f"visualize_attention invalid variant ({model.variant}). The model has no image branch")

    records = read_manifest(manifest_path)
    if sample_index < 0 or sample_index >= len(records):
        raise IndexError(f"visualize_attention invalid sample_index ({sample_index}). Manifest holds {len(records)}")
    arrays = load_sample_arrays(records[sample_index])
    view = arrays["view"]

    model.eval()
    with torch.no_grad():
        points = torch.as_tensor(arrays["partial"], dtype=torch.float32).unsqueeze(0)
        images = torch.as_tensor(view, dtype=torch.float32).permute(2, 0, 1).unsqueeze(0)
        attention = model(points, images).attention[0]

    mass = received_attention(attention)
    heatmap = attention_heatmap(mass, model.image_tokenizer.grid, view.shape[0], view.shape[1])
    write_image(out_path, overlay_heatmap(view, heatmap, alpha))
    LOG.info("Wrote attention heatmap of %s to %s", records[sample_index]["sample_id"], out_path)
    return {"path": Path(out_path), "mass": mass, "heatmap": heatmap}
