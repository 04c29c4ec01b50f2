import abc
from typing import Any, Dict, Tuple

import numpy as np
from smqtk_core import Plugfigurable


class GenerateShape(Plugfigurable):
    """Algorithm that samples points from the surface of a procedurally defined shape.

    Shapes are placed in model space so that they fit inside the unit cube centered at
    the origin. Implementations are looked up by their ``family`` name.
    """

    family: str = ""

    @abc.abstractmethod
    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        """Sample ``num_points`` surface points.

        :param num_points: Number of points to sample.
        :param rng: Random generator owning every random draw of this call.

        :return: Float64 array of shape (num_points, 3) inside ``[-0.5, 0.5]^3``.
        """

    def __call__(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        """Calls ``generate()`` with the given arguments."""
        return self.generate(num_points, rng)

    @staticmethod
    def fit_unit_cube(points: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> Tuple[np.ndarray, float]:
        """Center the analytic bounds ``[lower, upper]`` at the origin and scale their longest side to 1.

        Using analytic bounds rather than the sampled extent keeps surface identities
        (radii, face offsets) exact after normalization.

        :return: The moved points and the applied scale.
        """
        center = (lower + upper) / 2
        scale = 1.0 / float(np.max(upper - lower))
        return (points - center) * scale, scale

    @classmethod
    def get_type_string(cls) -> str:
        return f"{cls.__module__}.{cls.__name__}"

    def get_config(self) -> Dict[str, Any]:
        return {}
