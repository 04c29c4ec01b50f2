"""Run configuration shared by every harness command.

A run is described by one flat JSON object whose keys are the constructor arguments of
:class:`RunConfig`. The seed is resolved as: config file, then the ``EGIINET_SEED``
environment variable, then an explicit override (the ``--seed`` flag).
"""

import json
import logging
import os
import random
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np
import torch
from smqtk_core import Configurable

from egiinet.models.egiinet import VARIANTS

LOG = logging.getLogger(__name__)

SEED_ENV_VAR = "EGIINET_SEED"

FAMILIES = ("sphere", "box", "cylinder", "torus", "composite")


class RunConfig(Configurable):
    """Model, data, optimizer and bookkeeping settings of one run."""

    def __init__(
        self,
        # model
        dim: int = 128,
        num_tokens: int = 64,
        image_size: int = 64,
        patch_size: int = 8,
        point_stages: Sequence[int] = (128, 64),
        radii: Sequence[float] = (0.2, 0.4),
        max_k: int = 16,
        sfe_depth: int = 4,
        sft_depth: int = 2,
        decoder_depth: int = 2,
        heads: int = 4,
        num_points: int = 1024,
        dropout: float = 0.0,
        variant: str = "full",
        alpha: float = 0.01,
        # data
        data_dir: str = "data",
        complete_points: int = 1024,
        partial_points: int = 512,
        train_samples: int = 256,
        val_samples: int = 64,
        views_per_shape: int = 1,
        train_families: Sequence[str] = FAMILIES,
        eval_families: Sequence[str] = FAMILIES,
        # optimization
        learning_rate: float = 1e-4,
        epochs: int = 30,
        batch_size: int = 8,
        fscore_threshold: float = 0.001,
        seed: int = 0,
    ):
        self.dim = dim
        self.num_tokens = num_tokens
        self.image_size = image_size
        self.patch_size = patch_size
        self.point_stages = tuple(point_stages)
        self.radii = tuple(radii)
        self.max_k = max_k
        self.sfe_depth = sfe_depth
        self.sft_depth = sft_depth
        self.decoder_depth = decoder_depth
        self.heads = heads
        self.num_points = num_points
        self.dropout = dropout
        self.variant = variant
        self.alpha = alpha
        self.data_dir = data_dir
        self.complete_points = complete_points
        self.partial_points = partial_points
        self.train_samples = train_samples
        self.val_samples = val_samples
        self.views_per_shape = views_per_shape
        self.train_families = tuple(train_families)
        self.eval_families = tuple(eval_families)
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.fscore_threshold = fscore_threshold
        self.seed = seed

        self._validate()

    def _validate(self) -> None:
        name = type(self).__name__
        if self.variant not in VARIANTS:
            raise ValueError(f"{name} invalid variant ({self.variant}). Must be one of {VARIANTS}")
        if not self.alpha > 0:
            raise ValueError(f"{name} invalid alpha ({self.alpha}). Must be > 0")
        if not self.learning_rate > 0:
            raise ValueError(f"{name} invalid learning_rate ({self.learning_rate}). Must be > 0")
        if not self.fscore_threshold > 0:
            raise ValueError(f"{name} invalid fscore_threshold ({self.fscore_threshold}). Must be > 0")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"{name} invalid dropout ({self.dropout}). Must be in [0.0, 1.0)")
        for key in (
            "dim",
            "num_tokens",
            "image_size",
            "patch_size",
            "max_k",
            "heads",
            "num_points",
            "complete_points",
            "partial_points",
            "views_per_shape",
            "epochs",
            "batch_size",
        ):
            if getattr(self, key) < 1:
                raise ValueError(f"{name} invalid {key} ({getattr(self, key)}). Must be >= 1")
        for key in ("sfe_depth", "sft_depth", "decoder_depth", "train_samples", "val_samples"):
            if getattr(self, key) < 0:
                raise ValueError(f"{name} invalid {key} ({getattr(self, key)}). Must be >= 0")
        if self.partial_points < self.num_tokens:
            raise ValueError(
                f"{name} invalid partial_points ({self.partial_points}). Must be >= num_tokens ({self.num_tokens})"
            )
        for key in ("train_families", "eval_families"):
            families = getattr(self, key)
            unknown = [f for f in families if f not in FAMILIES]
            if not families or unknown:
                raise ValueError(f"{name} invalid {key} ({list(families)}). Must be a non-empty subset of {FAMILIES}")

    def model_kwargs(self) -> Dict[str, Any]:
        """Keyword arguments of :class:`egiinet.models.egiinet.EGIInet` for this run."""
        return dict(
            dim=self.dim,
            num_tokens=self.num_tokens,
            image_size=(self.image_size, self.image_size),
            patch_size=self.patch_size,
            point_stages=self.point_stages,
            radii=self.radii,
            max_k=self.max_k,
            sfe_depth=self.sfe_depth,
            sft_depth=self.sft_depth,
            decoder_depth=self.decoder_depth,
            heads=self.heads,
            num_points=self.num_points,
            dropout=self.dropout,
            alpha=self.alpha,
            variant=self.variant,
        )

    def replace(self, **changes: Any) -> "RunConfig":
        """Copy of this configuration with ``changes`` applied."""
        cfg = self.get_config()
        cfg.update(changes)
        return type(self).from_config(cfg)

    def get_config(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "num_tokens": self.num_tokens,
            "image_size": self.image_size,
            "patch_size": self.patch_size,
            "point_stages": list(self.point_stages),
            "radii": list(self.radii),
            "max_k": self.max_k,
            "sfe_depth": self.sfe_depth,
            "sft_depth": self.sft_depth,
            "decoder_depth": self.decoder_depth,
            "heads": self.heads,
            "num_points": self.num_points,
            "dropout": self.dropout,
            "variant": self.variant,
            "alpha": self.alpha,
            "data_dir": self.data_dir,
            "complete_points": self.complete_points,
            "partial_points": self.partial_points,
            "train_samples": self.train_samples,
            "val_samples": self.val_samples,
            "views_per_shape": self.views_per_shape,
            "train_families": list(self.train_families),
            "eval_families": list(self.eval_families),
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "fscore_threshold": self.fscore_threshold,
            "seed": self.seed,
        }


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Resolve a run configuration.

    :param path: JSON config file; defaults are used when omitted.
    :param seed: Explicit seed override, applied last.
    :param environ: Environment to read ``EGIINET_SEED`` from; ``os.environ`` by default.

    :raises FileNotFoundError: ``path`` does not exist.
    :raises ValueError: Unknown keys, a malformed seed or an invalid setting.
    """
    environ = os.environ if environ is None else environ
    config: Dict[str, Any] = dict()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path) as f:
            config = json.load(f)
        if not isinstance(config, dict):
            raise ValueError(f"Config file {path} must hold a JSON object")

    unknown = sorted(set(config) - set(RunConfig.get_default_config()))
    if unknown:
        raise ValueError(f"RunConfig unknown keys {unknown}")

    if SEED_ENV_VAR in environ:
        try:
            config["seed"] = int(environ[SEED_ENV_VAR])
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} invalid value ({environ[SEED_ENV_VAR]}). Must be an integer")
    if seed is not None:
        config["seed"] = seed
    return RunConfig.from_config(config)


def seed_everything(seed: int) -> None:
    """Seed the python, numpy and torch global generators."""
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    LOG.debug("Seeded all generators with %d", seed)
