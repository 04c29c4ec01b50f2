import abc
from typing import Any, Dict

import numpy as np
from smqtk_core import Plugfigurable


class RenderView(Plugfigurable):
    """Algorithm that renders a single-view image of a point cloud."""

    @abc.abstractmethod
    def render(
        self,
        points: np.ndarray,
        azimuth: float,
        elevation: float,
        height: int,
        width: int,
    ) -> np.ndarray:
        """Render ``points`` as seen from the given viewpoint.

        :param points: Cloud of shape (N, 3) in model space.
        :param azimuth: Camera angle around the z axis (radians).
        :param elevation: Camera angle above the xy plane (radians).
        :param height: Output image height in pixels.
        :param width: Output image width in pixels.

        :return: Float32 image of shape (height, width, 3) with values in [0, 1]; empty
            regions are 0.
        """

    def __call__(
        self,
        points: np.ndarray,
        azimuth: float,
        elevation: float,
        height: int,
        width: int,
    ) -> np.ndarray:
        """Calls ``render()`` with the given arguments."""
        return self.render(points, azimuth, elevation, height, width)

    def get_config(self) -> Dict[str, Any]:
        return {}
