from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from egiinet.utils.io import read_image, read_point_cloud, write_image, write_point_cloud


class TestPointCloudIO:
    def test_round_trip(self, tmp_path: Path) -> None:
        pts = np.random.default_rng(0).uniform(-0.5, 0.5, size=(50, 3))
        path = tmp_path / "nested" / "cloud.txt"
        write_point_cloud(path, pts)
        loaded = read_point_cloud(path)
        assert loaded.shape == (50, 3)
        assert np.allclose(loaded, pts, atol=1e-8)

    def test_single_point(self, tmp_path: Path) -> None:
        path = tmp_path / "one.txt"
        write_point_cloud(path, np.array([[0.1, 0.2, 0.3]]))
        assert read_point_cloud(path).shape == (1, 3)

    def test_missing(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError, match=r"missing.txt"):
            read_point_cloud(tmp_path / "missing.txt")

    def test_rejects_non_finite(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.txt"
        path.write_text("0 0 0\nnan 1 1\n")
        with pytest.raises(ValueError, match=r"non-finite"):
            read_point_cloud(path)

    def test_rejects_malformed(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.txt"
        path.write_text("0 0\n1 1\n")
        with pytest.raises(ValueError, match=r"invalid shape"):
            read_point_cloud(path)

    def test_write_rejects_non_finite(self, tmp_path: Path) -> None:
        with pytest.raises(ValueError, match=r"non-finite"):
            write_point_cloud(tmp_path / "x.txt", np.array([[np.inf, 0.0, 0.0]]))


class TestImageIO:
    def test_round_trip(self, tmp_path: Path) -> None:
        pixels = np.random.default_rng(1).integers(0, 256, size=(8, 12, 3)) / 255.0
        path = tmp_path / "view.png"
        write_image(path, pixels)
        loaded = read_image(path)
        assert loaded.dtype == np.float32
        assert loaded.shape == (8, 12, 3)
        assert np.allclose(loaded, pixels, atol=1e-6)

    def test_grayscale_replicated(self, tmp_path: Path) -> None:
        path = tmp_path / "gray.png"
        Image.fromarray(np.full((4, 4), 128, dtype=np.uint8)).save(path)
        loaded = read_image(path)
        assert loaded.shape == (4, 4, 3)
        assert np.allclose(loaded, 128 / 255.0)

    def test_clipped(self, tmp_path: Path) -> None:
        path = tmp_path / "clip.png"
        write_image(path, np.full((2, 2, 1), 1.5))
        assert np.all(read_image(path) == 1.0)

    def test_bad_shape(self, tmp_path: Path) -> None:
        with pytest.raises(ValueError, match=r"Invalid image shape"):
            write_image(tmp_path / "x.png", np.zeros((2, 2, 2)))

    def test_missing(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError, match=r"nope.png"):
            read_image(tmp_path / "nope.png")
