from __future__ import annotations

import abc
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Type, TypeVar

import numpy as np
from smqtk_core import Plugfigurable

from egiinet.interfaces.occlude_point_cloud import OccludePointCloud

C = TypeVar("C", bound="OccluderFactory")


class OccluderFactory(Plugfigurable):
    """Produces a sequence of occluders of one type that differ in a single constructor parameter.

    The varied parameter is named by ``theta_key`` and takes each value of ``thetas`` in turn.
    Every other constructor argument comes from ``fixed`` or the occluder's defaults. Building
    several partial scans of one shape from viewpoints spread around it is the typical use.
    """

    def __init__(
        self,
        occluder: Type[OccludePointCloud],
        theta_key: str,
        fixed: Optional[Mapping[str, Any]] = None,
    ):
        """:param occluder: Implementation type of the OccludePointCloud interface to produce.
        :param theta_key: Occluder parameter to vary between instances.
        :param fixed: Occluder parameters held constant across instances.

        :raises TypeError: Given an occluder instance instead of type.
        :raises ValueError: ``fixed`` also sets ``theta_key``.
        """
        if not isinstance(occluder, type):
            raise TypeError("Passed an occluder instance, expected type")
        fixed = dict(fixed or dict())
        if theta_key in fixed:
            raise ValueError(f"{type(self).__name__} fixed parameters must not set theta_key ({theta_key})")

        self.occluder = occluder
        self._theta_key = theta_key
        self.fixed = fixed

    @property
    @abc.abstractmethod
    def thetas(self) -> Sequence[Any]:
        """Values taken by ``theta_key``, in production order."""

    @property
    def theta_key(self) -> str:
        return self._theta_key

    def __len__(self) -> int:
        return len(self.thetas)

    def __iter__(self) -> Iterator[OccludePointCloud]:
        for theta in self.thetas:
            yield self._build(theta)

    def __getitem__(self, idx: int) -> OccludePointCloud:
        """:raises IndexError: ``idx`` outside ``[0, len(self))``."""
        thetas = self.thetas
        if idx < 0 or idx >= len(thetas):
            raise IndexError(f"{type(self).__name__} index {idx} out of range for {len(thetas)} occluders")
        return self._build(thetas[idx])

    def _build(self, theta: Any) -> OccludePointCloud:
        return self.occluder(**self.fixed, **{self.theta_key: theta})

    def occlude_all(self, points: np.ndarray) -> List[np.ndarray]:
        """One partial cloud of ``points`` per occluder, in production order."""
        return [occluder(points) for occluder in self]

    @classmethod
    def from_config(
        cls: Type[C],
        config_dict: Dict,
        merge_default: bool = True,
    ) -> C:
        config_dict = dict(config_dict)

        # The occluder is stored by type string; resolve it against the discovered impls.
        if "occluder" in config_dict:
            type_dict = {impl.get_type_string(): impl for impl in OccludePointCloud.get_impls()}
            if config_dict["occluder"] not in type_dict:
                raise ValueError(f"{config_dict['occluder']} is not a valid occluder.")
            config_dict["occluder"] = type_dict[config_dict["occluder"]]

        return super().from_config(config_dict, merge_default=merge_default)

    @classmethod
    def get_default_config(cls) -> Dict[str, Any]:
        cfg = super().get_default_config()
        cfg["occluder"] = OccludePointCloud.get_type_string()
        return cfg

    def get_config(self) -> Dict[str, Any]:
        return {
            "occluder": self.occluder.get_type_string(),
            "theta_key": self.theta_key,
            "fixed": dict(self.fixed),
        }
