from typing import Any, Dict, Tuple

import cv2
import numpy as np

from egiinet.interfaces.occlude_point_cloud import view_direction
from egiinet.interfaces.render_view import RenderView
from egiinet.utils.geometry import as_point_cloud


def camera_basis(azimuth: float, elevation: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right, up and towards-viewer unit vectors of an orthographic camera looking at the origin."""
    forward = view_direction(azimuth, elevation)
    right = np.array([-np.sin(azimuth), np.cos(azimuth), 0.0])
    up = np.cross(forward, right)
    return right, up, forward


class OrthographicSplatRenderer(RenderView):
    """Renders a point cloud as depth-shaded disks under an orthographic camera.

    Points are splatted far to near, so nearer points overwrite farther ones. Intensity
    rises linearly from ``min_intensity`` at the far side of the view volume to 1 at the
    near side; the background stays 0.
    """

    def __init__(self, span: float = float(np.sqrt(3.0)), splat_radius: int = 2, min_intensity: float = 0.25):
        """:param span: Side length of the square model-space window mapped onto the image.
            The default covers the whole unit cube from any direction.
        :param splat_radius: Disk radius in pixels drawn per point.
        :param min_intensity: Intensity of the farthest possible point.
        """
        if not span > 0:
            raise ValueError(f"{type(self).__name__} invalid span ({span}). Must be > 0.0")
        if splat_radius < 0:
            raise ValueError(f"{type(self).__name__} invalid splat_radius ({splat_radius}). Must be >= 0")
        if not 0.0 < min_intensity <= 1.0:
            raise ValueError(f"{type(self).__name__} invalid min_intensity ({min_intensity}). Must be in (0.0, 1.0]")

        self.span = span
        self.splat_radius = splat_radius
        self.min_intensity = min_intensity

    def render(
        self,
        points: np.ndarray,
        azimuth: float,
        elevation: float,
        height: int,
        width: int,
    ) -> np.ndarray:
        points = as_point_cloud(points)
        if height < 1 or width < 1:
            raise ValueError(f"Invalid image size ({height}, {width}). Must be >= 1.")

        right, up, forward = camera_basis(azimuth, elevation)
        u = points @ right
        v = points @ up
        depth = points @ forward

        cols = np.floor((u / self.span + 0.5) * width).astype(np.int64)
        rows = np.floor((0.5 - v / self.span) * height).astype(np.int64)
        near = np.clip(depth / self.span + 0.5, 0.0, 1.0)
        intensity = self.min_intensity + (1.0 - self.min_intensity) * near

        canvas = np.zeros((height, width), dtype=np.float32)
        for idx in np.argsort(depth, kind="stable"):
            cv2.circle(
                canvas,
                (int(cols[idx]), int(rows[idx])),
                self.splat_radius,
                float(intensity[idx]),
                thickness=-1,
            )
        canvas = np.clip(canvas, 0.0, 1.0)
        return np.repeat(canvas[..., None], 3, axis=2)

    def get_config(self) -> Dict[str, Any]:
        return {"span": self.span, "splat_radius": self.splat_radius, "min_intensity": self.min_intensity}
