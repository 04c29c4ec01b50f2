from pathlib import Path
from typing import Sequence

import numpy as np

from egiinet.harness.synth_data import write_manifest
from egiinet.utils.io import write_image, write_point_cloud


def write_toy_manifest(
    root: Path,
    n: int,
    families: Sequence[str] = ("sphere", "box"),
    complete_points: int = 64,
    partial_points: int = 32,
    image_size: int = 16,
    partial_is_complete: bool = False,
    seed: int = 0,
) -> Path:
    """Write ``n`` random samples and their manifest under ``root``.

    With ``partial_is_complete`` every partial cloud is a copy of its complete cloud, so an
    identity completer reproduces the ground truth exactly.

    :return: Path of the written manifest.
    """
    rng = np.random.default_rng(seed)
    records = list()
    for i in range(n):
        sample_id = f"toy_{i:05d}"
        complete = rng.uniform(-0.5, 0.5, size=(complete_points, 3))
        partial = complete if partial_is_complete else complete[:partial_points]
        write_point_cloud(root / "toy" / f"{sample_id}_complete.txt", complete)
        write_point_cloud(root / "toy" / f"{sample_id}_partial.txt", partial)
        write_image(root / "toy" / f"{sample_id}_view.png", rng.uniform(size=(image_size, image_size, 3)))
        records.append(
            {
                "sample_id": sample_id,
                "family": families[i % len(families)],
                "seed": i,
                "complete": f"toy/{sample_id}_complete.txt",
                "partial": f"toy/{sample_id}_partial.txt",
                "view": f"toy/{sample_id}_view.png",
            }
        )
    manifest_path = root / "toy.jsonl"
    write_manifest(manifest_path, records)
    return manifest_path


def identity_completer(partials: Sequence[np.ndarray], views: Sequence[np.ndarray]) -> Sequence[np.ndarray]:
    return [np.copy(p) for p in partials]
