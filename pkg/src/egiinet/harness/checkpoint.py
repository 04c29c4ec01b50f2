"""Checkpoint directories.

Layout::

    manifest.txt      plain ``key: value`` lines
    config.json       the RunConfig
    model.pt          model state dict
    optimizer.pt      optimizer state dict (absent for untrained models)
    rng.pt            python, numpy and torch generator states
    train_log.jsonl   per-epoch metrics, written by training
"""

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import torch

from egiinet.harness.config import RunConfig
from egiinet.models.egiinet import EGIInet, build_model, count_parameters

LOG = logging.getLogger(__name__)

FORMAT_VERSION = 1

MANIFEST_FILE = "manifest.txt"
CONFIG_FILE = "config.json"
MODEL_FILE = "model.pt"
OPTIMIZER_FILE = "optimizer.pt"
RNG_FILE = "rng.pt"
TRAIN_LOG_FILE = "train_log.jsonl"

PathLike = Union[str, Path]


@dataclass
class Checkpoint:
    model: EGIInet
    config: RunConfig
    step: int = 0
    optimizer_state: Optional[Dict[str, Any]] = None
    rng_state: Optional[Dict[str, Any]] = None
    train_log: List[Dict[str, Any]] = field(default_factory=list)


def capture_rng_state() -> Dict[str, Any]:
    return {"python": random.getstate(), "numpy": np.random.get_state(), "torch": torch.get_rng_state()}


def restore_rng_state(state: Dict[str, Any]) -> None:
    random.setstate(state["python"])
    np.random.set_state(state["numpy"])
    torch.set_rng_state(state["torch"])


def save_checkpoint(checkpoint: Checkpoint, out_dir: PathLike) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest = {
        "format_version": FORMAT_VERSION,
        "variant": checkpoint.model.variant,
        "step": checkpoint.step,
        "parameters": count_parameters(checkpoint.model),
        "seed": checkpoint.config.seed,
    }
    with open(out_dir / MANIFEST_FILE, "w") as f:
        f.writelines(f"{key}: {value}\n" for key, value in manifest.items())
    with open(out_dir / CONFIG_FILE, "w") as f:
        json.dump(checkpoint.config.get_config(), f, indent=2, sort_keys=True)

    torch.save(checkpoint.model.state_dict(), out_dir / MODEL_FILE)
    if checkpoint.optimizer_state is not None:
        torch.save(checkpoint.optimizer_state, out_dir / OPTIMIZER_FILE)
    torch.save(checkpoint.rng_state if checkpoint.rng_state is not None else capture_rng_state(), out_dir / RNG_FILE)
    if checkpoint.train_log:
        with open(out_dir / TRAIN_LOG_FILE, "w") as f:
            for row in checkpoint.train_log:
                f.write(json.dumps(row, sort_keys=True) + "\n")

    LOG.info("Saved checkpoint (step %d) to %s", checkpoint.step, out_dir)
    return out_dir


def read_checkpoint_manifest(ckpt_dir: PathLike) -> Dict[str, str]:
    path = Path(ckpt_dir) / MANIFEST_FILE
    if not path.is_file():
        raise FileNotFoundError(f"Checkpoint manifest not found: {path}")
    entries = dict()
    with open(path) as f:
        for line in f:
            if ":" in line:
                key, value = line.split(":", 1)
                entries[key.strip()] = value.strip()
    return entries


def load_checkpoint(ckpt_dir: PathLike, map_location: str = "cpu") -> Checkpoint:
    """Rebuild the model and configuration stored in ``ckpt_dir``.

    RNG states are returned but not restored; call :func:`restore_rng_state` to resume.

    :raises FileNotFoundError: A required file is missing.
    :raises ValueError: Unsupported format version.
    """
    ckpt_dir = Path(ckpt_dir)
    manifest = read_checkpoint_manifest(ckpt_dir)
    if int(manifest.get("format_version", -1)) != FORMAT_VERSION:
        raise ValueError(
            f"Checkpoint {ckpt_dir} invalid format_version ({manifest.get('format_version')}). Must be {FORMAT_VERSION}"
        )
    for name in (CONFIG_FILE, MODEL_FILE):
        if not (ckpt_dir / name).is_file():
            raise FileNotFoundError(f"Checkpoint file not found: {ckpt_dir / name}")

    with open(ckpt_dir / CONFIG_FILE) as f:
        config = RunConfig.from_config(json.load(f))
    model = build_model(**config.model_kwargs())
    model.load_state_dict(torch.load(ckpt_dir / MODEL_FILE, map_location=map_location))
    model.eval()

    optimizer_state = None
    if (ckpt_dir / OPTIMIZER_FILE).is_file():
        optimizer_state = torch.load(ckpt_dir / OPTIMIZER_FILE, map_location=map_location)
    rng_state = None
    if (ckpt_dir / RNG_FILE).is_file():
        rng_state = torch.load(ckpt_dir / RNG_FILE, weights_only=False)
    train_log = list()
    if (ckpt_dir / TRAIN_LOG_FILE).is_file():
        with open(ckpt_dir / TRAIN_LOG_FILE) as f:
            train_log = [json.loads(line) for line in f if line.strip()]

    return Checkpoint(
        model=model,
        config=config,
        step=int(manifest.get("step", 0)),
        optimizer_state=optimizer_state,
        rng_state=rng_state,
        train_log=train_log,
    )
