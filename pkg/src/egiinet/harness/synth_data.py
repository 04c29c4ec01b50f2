"""Procedural stand-in for a view-guided completion benchmark.

Every sample is a complete shape surface, a partial scan of it occluded from one
viewpoint, and an image of the complete shape rendered from a second viewpoint at least
30 degrees of azimuth away. A dataset is a pure function of its configuration and seed.

On disk a split is a JSON-lines manifest next to a directory of per-sample files::

    <out>/train.jsonl
    <out>/train/train_00000_complete.txt
    <out>/train/train_00000_partial.txt
    <out>/train/train_00000_view.png
"""

import json
import logging
import zlib
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import torch
from torch.utils.data import Dataset
from tqdm import tqdm

from egiinet.harness.config import RunConfig
from egiinet.impls.occlude_point_cloud.half_space_occluder import HalfSpaceOccluder
from egiinet.impls.occluder_factory.linspace_step import LinSpaceOccluderFactory
from egiinet.impls.render_view.orthographic_splat import OrthographicSplatRenderer
from egiinet.interfaces.generate_shape import GenerateShape
from egiinet.interfaces.occlude_point_cloud import OccludePointCloud
from egiinet.utils.geometry import as_point_cloud
from egiinet.utils.io import read_image, read_point_cloud, write_image, write_point_cloud

LOG = logging.getLogger(__name__)

MIN_VIEW_OFFSET = np.pi / 6
MAX_VIEW_OFFSET = np.pi / 2
VIEW_ELEVATION_RANGE = (np.pi / 12, np.pi / 4)

PathLike = Union[str, Path]


@dataclass
class SampleRecord:
    complete: np.ndarray
    partial: np.ndarray
    view: np.ndarray
    occlusion_azimuth: float
    occlusion_elevation: float
    view_azimuth: float
    view_elevation: float
    family: str
    seed: int


def shape_generators() -> Dict[str, GenerateShape]:
    """Default-configured generator of every discoverable shape family, keyed by family name."""
    return {impl.family: impl() for impl in GenerateShape.get_impls() if impl.family}


def sample_shape(family: str, seed: int, num_points: int = 1024) -> np.ndarray:
    """Sample a complete, unit-cube normalized surface cloud of ``family``.

    :raises ValueError: Unknown family.
    """
    generators = shape_generators()
    if family not in generators:
        raise ValueError(f"sample_shape invalid family ({family}). Must be one of {sorted(generators)}")
    return generators[family](num_points, np.random.default_rng(seed))


def occlude_view(points: np.ndarray, azimuth: float, elevation: float) -> np.ndarray:
    """Partial scan of ``points`` as seen from the given viewpoint."""
    return HalfSpaceOccluder(azimuth=azimuth, elevation=elevation)(points)


def render_view(points: np.ndarray, azimuth: float, elevation: float, height: int, width: int) -> np.ndarray:
    """Guidance image of ``points`` from the given viewpoint."""
    return OrthographicSplatRenderer()(points, azimuth, elevation, height, width)


def resample(points: np.ndarray, num_points: int, rng: np.random.Generator) -> np.ndarray:
    """Clip or pad ``points`` to exactly ``num_points`` rows by drawing existing rows.

    Clipping draws without replacement; padding keeps every row and repeats random ones.
    """
    points = as_point_cloud(points)
    n = points.shape[0]
    if n >= num_points:
        idx = rng.choice(n, size=num_points, replace=False)
    else:
        idx = np.concatenate([np.arange(n), rng.choice(n, size=num_points - n, replace=True)])
    return points[idx]


def make_sample(
    family: str,
    seed: int,
    occluder: OccludePointCloud,
    config: RunConfig,
    complete: Optional[np.ndarray] = None,
) -> SampleRecord:
    """Build one sample of ``family`` scanned by ``occluder``.

    ``seed`` drives every random draw, including the shape unless ``complete`` is given.
    The rendered viewpoint is rotated between 30 and 90 degrees of azimuth away from the
    occlusion viewpoint.
    """
    rng = np.random.default_rng(seed)
    if complete is None:
        complete = sample_shape(family, int(rng.integers(2**31)), config.complete_points)

    partial = resample(occluder(complete), config.partial_points, rng)

    offset = rng.uniform(MIN_VIEW_OFFSET, MAX_VIEW_OFFSET) * rng.choice([-1.0, 1.0])
    view_azimuth = float(np.mod(occluder.azimuth + offset, 2 * np.pi))
    view_elevation = float(rng.uniform(*VIEW_ELEVATION_RANGE))
    view = render_view(complete, view_azimuth, view_elevation, config.image_size, config.image_size)

    return SampleRecord(
        complete=complete,
        partial=partial,
        view=view,
        occlusion_azimuth=float(occluder.azimuth),
        occlusion_elevation=float(occluder.elevation),
        view_azimuth=view_azimuth,
        view_elevation=view_elevation,
        family=family,
        seed=seed,
    )


def _split_seed(seed: int, split: str, index: int) -> int:
    return int(np.random.SeedSequence([seed, zlib.crc32(split.encode()), index]).generate_state(1)[0])


def build_dataset(
    out_dir: PathLike,
    split: str,
    n_samples: int,
    families: Sequence[str],
    config: RunConfig,
    verbose: bool = False,
) -> Path:
    """Generate ``n_samples`` samples and write them with their manifest.

    Shapes are assigned to ``families`` round-robin. Each shape yields
    ``config.views_per_shape`` samples scanned from evenly spaced azimuths, offset by a
    random per-shape phase.

    :return: Path of the written manifest.
    """
    if n_samples < 0:
        raise ValueError(f"build_dataset invalid n_samples ({n_samples}). Must be >= 0")
    if not families:
        raise ValueError("build_dataset requires at least one family")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sample_dir = out_dir / split
    manifest_path = out_dir / f"{split}.jsonl"

    records: List[Dict[str, Any]] = list()
    views = config.views_per_shape
    num_shapes = -(-n_samples // views)
    with tqdm(total=n_samples, desc=split) if verbose else nullcontext() as progress_bar:  # type: ignore
        for shape_idx in range(num_shapes):
            family = families[shape_idx % len(families)]
            shape_seed = _split_seed(config.seed, split, shape_idx)
            phase = float(np.random.default_rng(shape_seed).uniform(0, 2 * np.pi))
            complete = sample_shape(family, shape_seed, config.complete_points)
            factory = LinSpaceOccluderFactory(
                occluder=HalfSpaceOccluder, theta_key="azimuth", start=phase, stop=phase + 2 * np.pi, step=views
            )
            for view_idx, occluder in enumerate(factory):
                if len(records) == n_samples:
                    break
                sample = make_sample(family, shape_seed + view_idx, occluder, config, complete=complete)
                sample_id = f"{split}_{len(records):05d}"
                records.append(_write_sample(sample, sample_id, sample_dir, out_dir))
                if progress_bar:
                    progress_bar.update(1)

    write_manifest(manifest_path, records)
    LOG.info("Wrote %d %s samples to %s", len(records), split, manifest_path)
    return manifest_path


def _write_sample(sample: SampleRecord, sample_id: str, sample_dir: Path, root: Path) -> Dict[str, Any]:
    paths = {
        "complete": sample_dir / f"{sample_id}_complete.txt",
        "partial": sample_dir / f"{sample_id}_partial.txt",
        "view": sample_dir / f"{sample_id}_view.png",
    }
    write_point_cloud(paths["complete"], sample.complete)
    write_point_cloud(paths["partial"], sample.partial)
    write_image(paths["view"], sample.view)
    return {
        "sample_id": sample_id,
        "family": sample.family,
        "seed": sample.seed,
        "complete": paths["complete"].relative_to(root).as_posix(),
        "partial": paths["partial"].relative_to(root).as_posix(),
        "view": paths["view"].relative_to(root).as_posix(),
        "occlusion_azimuth": sample.occlusion_azimuth,
        "occlusion_elevation": sample.occlusion_elevation,
        "view_azimuth": sample.view_azimuth,
        "view_elevation": sample.view_elevation,
    }


def generate_data(config: RunConfig, out_dir: Optional[PathLike] = None, verbose: bool = False) -> Dict[str, Path]:
    """Write the train and val splits, plus an ``unseen`` split when evaluation families differ.

    :return: Manifest path of every written split.
    """
    out_dir = Path(config.data_dir if out_dir is None else out_dir)
    manifests = {
        "train": build_dataset(out_dir, "train", config.train_samples, config.train_families, config, verbose),
        "val": build_dataset(out_dir, "val", config.val_samples, config.train_families, config, verbose),
    }
    if set(config.eval_families) != set(config.train_families):
        manifests["unseen"] = build_dataset(
            out_dir, "unseen", config.val_samples, config.eval_families, config, verbose
        )
    return manifests


def write_manifest(path: PathLike, records: Sequence[Dict[str, Any]]) -> None:
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")


def read_manifest(path: PathLike) -> List[Dict[str, Any]]:
    """Load manifest records with their file entries resolved against the manifest's directory.

    :raises FileNotFoundError: The manifest does not exist.
    :raises ValueError: A line is not a JSON record with the required keys.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Manifest not found: {path}")
    records = list()
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{line_no} is not valid JSON ({e})")
            missing = {"sample_id", "family", "complete", "partial", "view"} - set(record)
            if missing:
                raise ValueError(f"{path}:{line_no} is missing keys {sorted(missing)}")
            for key in ("complete", "partial", "view"):
                record[key] = path.parent / record[key]
            records.append(record)
    return records


def load_sample_arrays(record: Dict[str, Any]) -> Dict[str, np.ndarray]:
    """Read the complete cloud, partial cloud and view of one manifest record.

    :raises FileNotFoundError: A referenced file is missing; the message names it.
    """
    return {
        "complete": read_point_cloud(record["complete"]),
        "partial": read_point_cloud(record["partial"]),
        "view": read_image(record["view"]),
    }


class CompletionDataset(Dataset):
    """Torch view of a manifest; files are read lazily per item."""

    def __init__(self, manifest_path: PathLike):
        self.manifest_path = Path(manifest_path)
        self.records = read_manifest(self.manifest_path)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, idx: int) -> Dict[str, Any]:
        if idx < 0 or idx >= len(self):
            raise IndexError
        record = self.records[idx]
        arrays = load_sample_arrays(record)
        return {
            "partial": torch.from_numpy(arrays["partial"]).float(),
            "complete": torch.from_numpy(arrays["complete"]).float(),
            "view": torch.from_numpy(arrays["view"]).permute(2, 0, 1).contiguous().float(),
            "sample_id": record["sample_id"],
            "family": record["family"],
        }
