"""Completion quality on a manifest, reported per family and on average."""

import csv
import logging
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import torch

from egiinet.harness.checkpoint import Checkpoint, load_checkpoint
from egiinet.impls.gen_completion_response.manifest_generator import ManifestResponseGenerator
from egiinet.impls.score_completions.chamfer_scorer import ChamferScorer
from egiinet.impls.score_completions.fscore_scorer import FScoreScorer
from egiinet.interfaces.gen_completion_response import Completer
from egiinet.models.egiinet import EGIInet

LOG = logging.getLogger(__name__)

CSV_FIELDS = ("variant", "family", "cd_l2_x1000", "fscore")

PathLike = Union[str, Path]


class ModelCompleter:
    """Adapts a completion model to the black-box completer signature used by response generators."""

    def __init__(self, model: EGIInet):
        self.model = model

    @torch.no_grad()
    def __call__(self, partials: Sequence[np.ndarray], views: Sequence[np.ndarray]) -> List[np.ndarray]:
        """Complete a batch in eval mode; the model's previous mode is restored afterwards."""
        was_training = self.model.training
        self.model.eval()
        try:
            device = next(self.model.parameters()).device
            points = torch.as_tensor(np.stack(partials), dtype=torch.float32, device=device)
            images = torch.as_tensor(np.stack(views), dtype=torch.float32, device=device).permute(0, 3, 1, 2)
            cloud = self.model(points, images).cloud
        finally:
            self.model.train(was_training)
        return [c.astype(np.float64) for c in cloud.cpu().numpy()]


def summarize(sample_rows: Sequence[Dict[str, Any]], variant: str) -> List[Dict[str, Any]]:
    """Mean metrics per family (sorted by name) followed by an ``average`` row over all samples."""
    by_family: Dict[str, List[Dict[str, Any]]] = defaultdict(list)
    for row in sample_rows:
        by_family[row["family"]].append(row)

    def mean_row(family: str, rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
        return {
            "variant": variant,
            "family": family,
            "cd_l2_x1000": float(np.mean([r["cd_l2_x1000"] for r in rows])),
            "fscore": float(np.mean([r["fscore"] for r in rows])),
        }

    table = [mean_row(family, by_family[family]) for family in sorted(by_family)]
    if sample_rows:
        table.append(mean_row("average", sample_rows))
    return table


def evaluate_completer(
    completer: Completer,
    manifest_path: PathLike,
    variant: str = "full",
    fscore_threshold: float = 0.001,
    batch_size: int = 8,
    verbose: bool = False,
) -> List[Dict[str, Any]]:
    """Score ``completer`` on every sample of ``manifest_path`` and summarize the results."""
    generator = ManifestResponseGenerator(manifest_path)
    scorers = [ChamferScorer(kind="l2", scale=1000.0), FScoreScorer(threshold=fscore_threshold)]
    sample_rows = generator.generate(completer, scorers, batch_size=batch_size, verbose=verbose)
    return summarize(sample_rows, variant)


def evaluate(
    checkpoint: Union[Checkpoint, PathLike],
    manifest_path: PathLike,
    out_csv: Optional[PathLike] = None,
    batch_size: int = 8,
    verbose: bool = False,
) -> List[Dict[str, Any]]:
    """Evaluate a checkpoint (object or directory) on a manifest, optionally writing the metrics CSV."""
    if not isinstance(checkpoint, Checkpoint):
        checkpoint = load_checkpoint(checkpoint)
    table = evaluate_completer(
        ModelCompleter(checkpoint.model),
        manifest_path,
        variant=checkpoint.model.variant,
        fscore_threshold=checkpoint.config.fscore_threshold,
        batch_size=batch_size,
        verbose=verbose,
    )
    for row in table:
        LOG.info(
            "%s %s: cd_l2_x1000=%.4f fscore=%.4f", row["variant"], row["family"], row["cd_l2_x1000"], row["fscore"]
        )
    if out_csv is not None:
        write_metrics_csv(out_csv, table)
    return table


def write_metrics_csv(path: PathLike, rows: Sequence[Dict[str, Any]], fields: Sequence[str] = CSV_FIELDS) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fields), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def read_metrics_csv(path: PathLike) -> List[Dict[str, Any]]:
    """Read a metrics CSV back; numeric columns come back as exact floats."""
    rows = list()
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            parsed: Dict[str, Any] = dict()
            for key, value in row.items():
                try:
                    parsed[key] = float(value)
                except ValueError:
                    parsed[key] = value
            rows.append(parsed)
    return rows
