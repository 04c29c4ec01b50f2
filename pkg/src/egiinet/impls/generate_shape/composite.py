from typing import Any, Dict

import numpy as np

from egiinet.impls.generate_shape.primitives import sample_box_surface, sample_sphere_surface
from egiinet.interfaces.generate_shape import GenerateShape


class CompositeShape(GenerateShape):
    """A box with a sphere fused onto one of its x faces.

    Points are split between the two parts in proportion to their surface areas; the
    overlap is not carved out.
    """

    family = "composite"

    def __init__(self, min_side: float = 0.3, max_side: float = 0.7, sphere_ratio: float = 0.6):
        """:param min_side: Smallest box side length drawn before normalization.
        :param max_side: Largest box side length drawn before normalization.
        :param sphere_ratio: Sphere radius as a fraction of the box's largest side.
        """
        if not 0.0 < min_side <= max_side:
            raise ValueError(
                f"{type(self).__name__} invalid side range ({min_side}, {max_side}). Must satisfy 0 < min <= max"
            )
        if not sphere_ratio > 0.0:
            raise ValueError(f"{type(self).__name__} invalid sphere_ratio ({sphere_ratio}). Must be > 0.0")

        self.min_side = min_side
        self.max_side = max_side
        self.sphere_ratio = sphere_ratio

    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        half = rng.uniform(self.min_side, self.max_side, size=3) / 2
        radius = self.sphere_ratio * float(np.max(half))
        sphere_center = np.array([half[0] + 0.5 * radius, 0.0, 0.0])

        box_area = 8 * (half[0] * half[1] + half[1] * half[2] + half[0] * half[2])
        sphere_area = 4 * np.pi * radius**2
        num_sphere = int(rng.binomial(num_points, sphere_area / (box_area + sphere_area)))

        points = np.concatenate(
            [
                sample_box_surface(num_points - num_sphere, half, rng),
                sample_sphere_surface(num_sphere, radius, rng) + sphere_center,
            ]
        )
        lower = np.minimum(-half, sphere_center - radius)
        upper = np.maximum(half, sphere_center + radius)
        points, _ = self.fit_unit_cube(points, lower, upper)
        return points

    def get_config(self) -> Dict[str, Any]:
        return {"min_side": self.min_side, "max_side": self.max_side, "sphere_ratio": self.sphere_ratio}
