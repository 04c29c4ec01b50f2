"""Readers and writers for the on-disk point cloud and view formats.

Point clouds are plain text, one whitespace separated ``x y z`` triple per line. Views are 8-bit PNG files that
load as float ``(H, W, 3)`` arrays in [0, 1].
"""

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from egiinet.utils.geometry import as_point_cloud

PathLike = Union[str, Path]


def read_point_cloud(path: PathLike) -> np.ndarray:
    """Load a point cloud text file.

    :raises FileNotFoundError: ``path`` does not exist.
    :raises ValueError: Malformed rows or non-finite values.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Point cloud file not found: {path}")
    try:
        points = np.loadtxt(str(path), dtype=np.float64, ndmin=2)
    except ValueError as err:
        raise ValueError(f"Malformed point cloud file {path}: {err}") from err
    return as_point_cloud(points, name=str(path))


def write_point_cloud(path: PathLike, points: np.ndarray) -> None:
    """Write ``points`` in the text format, creating parent directories as needed."""
    points = as_point_cloud(points)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(str(path), points, fmt="%.8f", delimiter=" ")


def read_image(path: PathLike) -> np.ndarray:
    """Load a PNG view as float32 in [0, 1]; grayscale inputs are replicated to three channels."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Image file not found: {path}")
    with Image.open(str(path)) as img:
        pixels = np.asarray(img.convert("RGB"), dtype=np.float32)
    return pixels / 255.0


def write_image(path: PathLike, pixels: np.ndarray) -> None:
    """Write float [0, 1] pixels as an 8-bit PNG.

    :raises ValueError: Pixels are not (H, W), (H, W, 1) or (H, W, 3), or contain non-finite values.
    """
    pixels = np.asarray(pixels)
    if pixels.ndim == 3 and pixels.shape[2] == 1:
        pixels = pixels[..., 0]
    if pixels.ndim not in (2, 3) or (pixels.ndim == 3 and pixels.shape[2] != 3):
        raise ValueError(f"Invalid image shape ({pixels.shape}). Expected (H, W) or (H, W, 3).")
    if not np.all(np.isfinite(pixels)):
        raise ValueError("Image contains non-finite values.")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    as_bytes = np.round(np.clip(pixels, 0.0, 1.0) * 255).astype(np.uint8)
    Image.fromarray(as_bytes).save(str(path), format="PNG")
