from typing import Any, Dict, Mapping, Optional, Sequence, Type, Union

import numpy as np

from egiinet.interfaces.occlude_point_cloud import OccludePointCloud
from egiinet.interfaces.occluder_factory import OccluderFactory

Number = Union[int, float]


class StepOccluderFactory(OccluderFactory):
    """Steps ``theta_key`` through ``[start, stop)`` in increments of ``step``.

    Integer bounds give integer thetas; any float bound gives floats, so azimuths can be
    stepped in radians, e.g. ``start=0, stop=2 * np.pi, step=np.pi / 4``.
    """

    def __init__(
        self,
        occluder: Type[OccludePointCloud],
        theta_key: str,
        start: Number,
        stop: Number,
        step: Number = 1,
        fixed: Optional[Mapping[str, Any]] = None,
    ):
        """:param start: First value (inclusive).
        :param stop: End of the range (exclusive).
        :param step: Increment between instances; may be negative.

        :raises ValueError: ``step`` is zero.
        """
        if step == 0:
            raise ValueError(f"{type(self).__name__} invalid step ({step}). Must be nonzero")
        super().__init__(occluder=occluder, theta_key=theta_key, fixed=fixed)

        self.start = start
        self.stop = stop
        self.step = step

    @property
    def thetas(self) -> Sequence[Number]:
        return np.arange(self.start, self.stop, self.step).tolist()

    def get_config(self) -> Dict[str, Any]:
        cfg = super().get_config()
        cfg.update(start=self.start, stop=self.stop, step=self.step)
        return cfg
