from pathlib import Path
from typing import Any

from egiinet.harness.config import RunConfig, load_run_config
from egiinet.harness.synth_data import generate_data

DATA_DIR = Path(__file__).parents[1] / "data"
TINY_CONFIG = DATA_DIR / "egiinet_tiny_config.json"


def tiny_config(**changes: Any) -> RunConfig:
    """The tiny run configuration, independent of ``EGIINET_SEED`` in the calling environment."""
    config = load_run_config(TINY_CONFIG, environ={})
    return config.replace(**changes) if changes else config


def tiny_dataset(root: Path, **changes: Any) -> RunConfig:
    """Generate the tiny train/val splits under ``root`` and return the matching configuration."""
    config = tiny_config(data_dir=str(root), **changes)
    generate_data(config, root)
    return config
