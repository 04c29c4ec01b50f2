"""Training loop and ablation sweep."""

import logging
import math
from contextlib import nullcontext
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import torch
from torch.utils.data import DataLoader
from tqdm import tqdm

from egiinet.harness.checkpoint import Checkpoint, capture_rng_state, save_checkpoint
from egiinet.harness.config import RunConfig, seed_everything
from egiinet.harness.evaluate import ModelCompleter, evaluate_completer, write_metrics_csv
from egiinet.harness.synth_data import CompletionDataset
from egiinet.models.egiinet import VARIANTS, EGIInet, build_model, count_parameters
from egiinet.models.interaction import LossBundle

LOG = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TrainingDivergedError(RuntimeError):
    """A loss component became non-finite during training."""

    def __init__(self, component: str, step: int, value: float):
        super().__init__(f"Training diverged at step {step}: {component} is {value}")
        self.component = component
        self.step = step
        self.value = value


def check_finite(bundle: LossBundle, step: int) -> None:
    """:raises TrainingDivergedError: Naming the first non-finite component of ``bundle``."""
    for component, value in bundle.as_floats().items():
        if not math.isfinite(value):
            raise TrainingDivergedError(component, step, value)


def train_step(model: EGIInet, optimizer: torch.optim.Optimizer, batch: Dict[str, Any], step: int) -> LossBundle:
    """One optimizer update on ``batch``."""
    model.train()
    output = model(batch["partial"], batch["view"], target=batch["complete"])
    bundle = output.bundle
    check_finite(bundle, step)
    optimizer.zero_grad()
    bundle.l_total.backward()
    optimizer.step()
    return bundle


def validation_cd_l2(model: EGIInet, manifest_path: PathLike, config: RunConfig) -> Optional[float]:
    """Average chamfer_l2 (unscaled) over a validation manifest, or ``None`` when it holds no samples."""
    table = evaluate_completer(
        ModelCompleter(model),
        manifest_path,
        variant=model.variant,
        fscore_threshold=config.fscore_threshold,
        batch_size=config.batch_size,
    )
    if not table:
        return None
    return table[-1]["cd_l2_x1000"] / 1000.0


def train(
    config: RunConfig,
    out_dir: Optional[PathLike] = None,
    train_manifest: Optional[PathLike] = None,
    val_manifest: Optional[PathLike] = None,
    verbose: bool = False,
) -> Checkpoint:
    """Minimize ``l_total`` over the training manifest.

    :param config: Run configuration; its seed fixes initialization and batch order.
    :param out_dir: Checkpoint directory written after training, if given.
    :param train_manifest: Defaults to ``<data_dir>/train.jsonl``.
    :param val_manifest: Defaults to ``<data_dir>/val.jsonl``; skipped when missing.
    :param verbose: Show a progress bar over epochs.

    :raises FileNotFoundError: The training manifest does not exist.
    :raises TrainingDivergedError: A loss component became non-finite.
    """
    data_dir = Path(config.data_dir)
    train_manifest = Path(train_manifest) if train_manifest is not None else data_dir / "train.jsonl"
    val_manifest = Path(val_manifest) if val_manifest is not None else data_dir / "val.jsonl"
    if not train_manifest.is_file():
        raise FileNotFoundError(f"Training manifest not found: {train_manifest}")
    has_val = val_manifest.is_file()

    seed_everything(config.seed)
    model = build_model(**config.model_kwargs())
    LOG.info("Training %s model with %d parameters", config.variant, count_parameters(model))

    dataset = CompletionDataset(train_manifest)
    if len(dataset) == 0:
        raise ValueError(f"Training manifest {train_manifest} holds no samples")
    loader = DataLoader(
        dataset,
        batch_size=config.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(config.seed),
    )
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=config.epochs * len(loader))

    train_log: List[Dict[str, Any]] = list()
    step = 0
    with tqdm(total=config.epochs, desc="epochs") if verbose else nullcontext() as progress_bar:  # type: ignore
        for epoch in range(config.epochs):
            sums: Dict[str, float] = dict()
            for batch in loader:
                bundle = train_step(model, optimizer, batch, step)
                scheduler.step()
                step += 1
                for key, value in bundle.as_floats().items():
                    sums[key] = sums.get(key, 0.0) + value

            row: Dict[str, Any] = {"epoch": epoch, "step": step}
            row.update({key: value / len(loader) for key, value in sums.items()})
            if has_val:
                row["val_cd_l2"] = validation_cd_l2(model, val_manifest, config)
            train_log.append(row)
            LOG.info(
                "epoch %d: %s",
                epoch,
                " ".join(f"{k}={v:.6g}" for k, v in row.items() if k not in ("epoch", "step") and v is not None),
            )
            if progress_bar:
                progress_bar.update(1)

    checkpoint = Checkpoint(
        model=model,
        config=config,
        step=step,
        optimizer_state=optimizer.state_dict(),
        rng_state=capture_rng_state(),
        train_log=train_log,
    )
    if out_dir is not None:
        save_checkpoint(checkpoint, out_dir)
    return checkpoint


def run_ablation(
    config: RunConfig,
    out_dir: PathLike,
    variants: Sequence[str] = VARIANTS,
    seeds: Sequence[int] = (0, 1, 2),
    verbose: bool = False,
) -> List[Dict[str, Any]]:
    """Train every (variant, seed) pair and compare validation chamfer_l2.

    Writes ``ablation.csv`` (one row per run) and ``ablation_summary.csv`` (median per
    variant) into ``out_dir``; checkpoints go to ``out_dir/<variant>_seed<seed>``.

    :return: The per-variant summary rows.
    """
    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        raise ValueError(f"run_ablation invalid variants ({unknown}). Must be among {VARIANTS}")
    out_dir = Path(out_dir)
    val_manifest = Path(config.data_dir) / "val.jsonl"

    runs: List[Dict[str, Any]] = list()
    for variant in variants:
        for seed in seeds:
            run_config = config.replace(variant=variant, seed=seed)
            checkpoint = train(run_config, out_dir / f"{variant}_seed{seed}", verbose=verbose)
            cd_l2 = validation_cd_l2(checkpoint.model, val_manifest, run_config)
            if cd_l2 is None:
                raise ValueError(f"Validation manifest {val_manifest} holds no samples")
            runs.append({"variant": variant, "seed": seed, "cd_l2_x1000": 1000.0 * cd_l2})
            LOG.info("ablation %s seed %d: cd_l2_x1000=%.4f", variant, seed, 1000.0 * cd_l2)

    summary = [
        {
            "variant": variant,
            "cd_l2_x1000": float(np.median([r["cd_l2_x1000"] for r in runs if r["variant"] == variant])),
        }
        for variant in variants
    ]
    write_metrics_csv(out_dir / "ablation.csv", runs, ("variant", "seed", "cd_l2_x1000"))
    write_metrics_csv(out_dir / "ablation_summary.csv", summary, ("variant", "cd_l2_x1000"))
    return summary

