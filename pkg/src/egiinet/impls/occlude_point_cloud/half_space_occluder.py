from typing import Any, Dict

import numpy as np

from egiinet.interfaces.occlude_point_cloud import OccludePointCloud
from egiinet.utils.geometry import as_point_cloud


class HalfSpaceOccluder(OccludePointCloud):
    """Keeps the points on the viewer's side of a plane through the origin.

    The plane is orthogonal to the viewing direction. When the plane through the origin
    would keep less than ``min_keep`` or more than ``max_keep`` of the cloud, the plane is
    slid along the viewing direction to the median projection so that half of the cloud
    survives.
    """

    def __init__(
        self,
        azimuth: float = 0.0,
        elevation: float = 0.0,
        min_keep: float = 0.25,
        max_keep: float = 0.75,
    ):
        """:param azimuth: Viewpoint angle around the z axis (radians).
        :param elevation: Viewpoint angle above the xy plane (radians).
        :param min_keep: Smallest retained fraction accepted from the origin plane.
        :param max_keep: Largest retained fraction accepted from the origin plane.
        """
        if not 0.0 <= min_keep <= 0.5 <= max_keep <= 1.0:
            raise ValueError(
                f"{type(self).__name__} invalid keep range ({min_keep}, {max_keep}). "
                "Must satisfy 0 <= min_keep <= 0.5 <= max_keep <= 1"
            )
        super().__init__(azimuth=azimuth, elevation=elevation)

        self.min_keep = min_keep
        self.max_keep = max_keep

    def plane_fraction(self, points: np.ndarray) -> float:
        """Fraction of ``points`` in front of the plane through the origin."""
        points = as_point_cloud(points)
        return float(np.mean(points @ self.direction > 0))

    def visible_mask(self, points: np.ndarray) -> np.ndarray:
        points = as_point_cloud(points)
        depth = points @ self.direction
        mask = depth > 0
        if self.min_keep <= mask.mean() <= self.max_keep:
            return mask
        # Rank-based split: exactly floor(N / 2) points with the largest depth survive.
        order = np.argsort(-depth, kind="stable")
        mask = np.zeros(points.shape[0], dtype=bool)
        mask[order[: max(1, points.shape[0] // 2)]] = True
        return mask

    def get_config(self) -> Dict[str, Any]:
        cfg = super().get_config()
        cfg["min_keep"] = self.min_keep
        cfg["max_keep"] = self.max_keep
        return cfg
