from __future__ import annotations

from typing import Any, Dict, Mapping, Optional, Sequence, Type

import numpy as np

from egiinet.interfaces.occlude_point_cloud import OccludePointCloud
from egiinet.interfaces.occluder_factory import OccluderFactory


class LinSpaceOccluderFactory(OccluderFactory):
    """``step`` evenly spaced values of ``theta_key`` in ``[start, stop)``.

    With ``stop = start + 2π`` on ``azimuth`` this walks once around the shape without
    repeating the first viewpoint.
    """

    def __init__(
        self,
        occluder: Type[OccludePointCloud],
        theta_key: str,
        start: float,
        stop: float,
        step: int = 1,
        fixed: Optional[Mapping[str, Any]] = None,
    ):
        """:param start: First value (inclusive).
        :param stop: End of the interval (exclusive).
        :param step: Number of instances to generate.

        :raises ValueError: ``step`` is negative.
        """
        if step < 0:
            raise ValueError(f"{type(self).__name__} invalid step ({step}). Must be >= 0")
        super().__init__(occluder=occluder, theta_key=theta_key, fixed=fixed)

        self.start = start
        self.stop = stop
        self.step = step

    @property
    def thetas(self) -> Sequence[float]:
        if self.start == self.stop:
            return []
        return np.linspace(self.start, self.stop, self.step, endpoint=False).tolist()

    def get_config(self) -> Dict[str, Any]:
        cfg = super().get_config()
        cfg.update(start=self.start, stop=self.stop, step=self.step)
        return cfg
