from typing import Any, Dict, Tuple

import numpy as np

from egiinet.interfaces.generate_shape import GenerateShape


def sample_sphere_surface(num_points: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples on a sphere of ``radius`` centered at the origin."""
    directions = rng.normal(size=(num_points, 3))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    # a zero-length draw has probability zero, but would otherwise produce NaNs
    norms[norms == 0] = 1.0
    return radius * directions / norms


def sample_box_surface(num_points: int, half_extents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Area-weighted uniform samples on the faces of an origin-centered box."""
    hx, hy, hz = half_extents
    face_areas = np.array([hy * hz, hy * hz, hx * hz, hx * hz, hx * hy, hx * hy])
    faces = rng.choice(6, size=num_points, p=face_areas / face_areas.sum())
    points = rng.uniform(-1.0, 1.0, size=(num_points, 3)) * half_extents
    axis = faces // 2
    sign = np.where(faces % 2 == 0, 1.0, -1.0)
    points[np.arange(num_points), axis] = sign * half_extents[axis]
    return points


class SphereShape(GenerateShape):
    """Points on a sphere inscribed in the unit cube."""

    family = "sphere"

    def __init__(self, radius: float = 0.5):
        """:param radius: Sphere radius; at most 0.5 so the sphere fits the unit cube."""
        if not 0.0 < radius <= 0.5:
            raise ValueError(f"{type(self).__name__} invalid radius ({radius}). Must be in (0.0, 0.5]")

        self.radius = radius

    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        return sample_sphere_surface(num_points, self.radius, rng)

    def get_config(self) -> Dict[str, Any]:
        return {"radius": self.radius}


class BoxShape(GenerateShape):
    """Points on the faces of a box whose side lengths are drawn per sample."""

    family = "box"

    def __init__(self, min_side: float = 0.4, max_side: float = 1.0):
        """:param min_side: Smallest side length drawn before normalization.
        :param max_side: Largest side length drawn before normalization.
        """
        if not 0.0 < min_side <= max_side:
            raise ValueError(
                f"{type(self).__name__} invalid side range ({min_side}, {max_side}). Must satisfy 0 < min <= max"
            )

        self.min_side = min_side
        self.max_side = max_side

    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        half = rng.uniform(self.min_side, self.max_side, size=3) / 2
        points = sample_box_surface(num_points, half, rng)
        points, _ = self.fit_unit_cube(points, -half, half)
        return points

    def get_config(self) -> Dict[str, Any]:
        return {"min_side": self.min_side, "max_side": self.max_side}


class CylinderShape(GenerateShape):
    """Points on a capped cylinder aligned with the z axis."""

    family = "cylinder"

    def __init__(
        self,
        radius_range: Tuple[float, float] = (0.2, 0.5),
        height_range: Tuple[float, float] = (0.4, 1.0),
    ):
        """:param radius_range: Interval the radius is drawn from.
        :param height_range: Interval the height is drawn from.
        """
        for label, (low, high) in (("radius_range", radius_range), ("height_range", height_range)):
            if not 0.0 < low <= high:
                raise ValueError(f"{type(self).__name__} invalid {label} ({low}, {high}). Must satisfy 0 < low <= high")

        self.radius_range = tuple(radius_range)
        self.height_range = tuple(height_range)

    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        radius = rng.uniform(*self.radius_range)
        height = rng.uniform(*self.height_range)

        lateral = 2 * np.pi * radius * height
        cap = np.pi * radius**2
        part = rng.choice(3, size=num_points, p=np.array([lateral, cap, cap]) / (lateral + 2 * cap))

        theta = rng.uniform(0, 2 * np.pi, size=num_points)
        # sqrt keeps cap samples uniform in area
        rho = np.where(part == 0, radius, radius * np.sqrt(rng.uniform(size=num_points)))
        z = np.select(
            [part == 0, part == 1],
            [rng.uniform(-height / 2, height / 2, size=num_points), np.full(num_points, height / 2)],
            default=-height / 2,
        )
        points = np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=1)

        bound = np.array([radius, radius, height / 2])
        points, _ = self.fit_unit_cube(points, -bound, bound)
        return points

    def get_config(self) -> Dict[str, Any]:
        return {"radius_range": list(self.radius_range), "height_range": list(self.height_range)}


class TorusShape(GenerateShape):
    """Points on a ring torus lying in the xy plane."""

    family = "torus"

    def __init__(
        self,
        major_range: Tuple[float, float] = (0.25, 0.35),
        minor_range: Tuple[float, float] = (0.08, 0.15),
    ):
        """:param major_range: Interval the distance from the center to the tube center is drawn from.
        :param minor_range: Interval the tube radius is drawn from.
        """
        if not 0.0 < minor_range[0] <= minor_range[1] < major_range[0] <= major_range[1]:
            raise ValueError(
                f"{type(self).__name__} invalid radii ({major_range}, {minor_range}). "
                "Must satisfy 0 < minor < major"
            )

        self.major_range = tuple(major_range)
        self.minor_range = tuple(minor_range)

    def generate(self, num_points: int, rng: np.random.Generator) -> np.ndarray:
        major = rng.uniform(*self.major_range)
        minor = rng.uniform(*self.minor_range)

        # Rejection sampling on the tube angle makes the samples uniform in surface area.
        tube = np.empty(0)
        while tube.shape[0] < num_points:
            candidates = rng.uniform(0, 2 * np.pi, size=2 * num_points)
            keep = rng.uniform(size=candidates.shape[0]) < (major + minor * np.cos(candidates)) / (major + minor)
            tube = np.concatenate([tube, candidates[keep]])
        tube = tube[:num_points]
        ring = rng.uniform(0, 2 * np.pi, size=num_points)

        dist = major + minor * np.cos(tube)
        points = np.stack([dist * np.cos(ring), dist * np.sin(ring), minor * np.sin(tube)], axis=1)

        bound = np.array([major + minor, major + minor, minor])
        points, _ = self.fit_unit_cube(points, -bound, bound)
        return points

    def get_config(self) -> Dict[str, Any]:
        return {"major_range": list(self.major_range), "minor_range": list(self.minor_range)}
