import abc
from typing import Any, Dict

import numpy as np
from smqtk_core import Plugfigurable


class OccludePointCloud(Plugfigurable):
    """Algorithm that removes the part of a point cloud hidden from a viewpoint.

    The viewpoint is fixed at construction by an ``azimuth`` and ``elevation`` in radians,
    so an ``OccluderFactory`` can vary it between instances.
    """

    def __init__(self, azimuth: float = 0.0, elevation: float = 0.0):
        """:param azimuth: Viewpoint angle around the z axis (radians).
        :param elevation: Viewpoint angle above the xy plane (radians).
        """
        if not np.isfinite(azimuth) or not np.isfinite(elevation):
            raise ValueError(f"{type(self).__name__} invalid viewpoint ({azimuth}, {elevation}). Must be finite.")
        self.azimuth = azimuth
        self.elevation = elevation

    @property
    def direction(self) -> np.ndarray:
        """Unit vector from the origin towards the viewer."""
        return view_direction(self.azimuth, self.elevation)

    @abc.abstractmethod
    def visible_mask(self, points: np.ndarray) -> np.ndarray:
        """Return a boolean mask of the points kept by this occlusion.

        :param points: Cloud of shape (N, 3).

        :return: Boolean array of length N. Implementations should impart no side effects
            upon the input cloud.
        """

    def occlude(self, points: np.ndarray) -> np.ndarray:
        """Return the visible subset of ``points``, preserving order."""
        return np.copy(points[self.visible_mask(points)])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Calls ``occlude()`` with the given cloud."""
        return self.occlude(points)

    @classmethod
    def get_type_string(cls) -> str:
        return f"{cls.__module__}.{cls.__name__}"

    def get_config(self) -> Dict[str, Any]:
        return {"azimuth": self.azimuth, "elevation": self.elevation}


def view_direction(azimuth: float, elevation: float) -> np.ndarray:
    """Unit vector for the given azimuth/elevation pair (radians).

    >>> view_direction(0.0, 0.0)
    array([1., 0., 0.])
    """
    return np.array(
        [
            np.cos(elevation) * np.cos(azimuth),
            np.cos(elevation) * np.sin(azimuth),
            np.sin(elevation),
        ]
    )
