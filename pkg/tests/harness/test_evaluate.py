import math
from pathlib import Path

import numpy as np
import pytest
import torch

from egiinet.harness.checkpoint import Checkpoint, save_checkpoint
from egiinet.harness.evaluate import (
    CSV_FIELDS,
    ModelCompleter,
    evaluate,
    evaluate_completer,
    read_metrics_csv,
    summarize,
    write_metrics_csv,
)
from egiinet.models.egiinet import build_model

from ..impls.gen_completion_response.test_generator_utils import identity_completer, write_toy_manifest
from .test_harness_utils import tiny_config


def tiny_checkpoint() -> Checkpoint:
    config = tiny_config()
    torch.manual_seed(0)
    return Checkpoint(model=build_model(**config.model_kwargs()), config=config)


class TestEvaluateCompleter:
    def test_ground_truth_is_perfect(self, tmp_path: Path) -> None:
        manifest = write_toy_manifest(tmp_path, 5, partial_is_complete=True)
        table = evaluate_completer(identity_completer, manifest, variant="oracle", batch_size=2)
        assert [row["family"] for row in table] == ["box", "sphere", "average"]
        for row in table:
            assert row["variant"] == "oracle"
            assert row["cd_l2_x1000"] == 0.0
            assert row["fscore"] == 1.0

    def test_partial_scores_worse(self, tmp_path: Path) -> None:
        table = evaluate_completer(identity_completer, write_toy_manifest(tmp_path, 2))
        assert table[-1]["cd_l2_x1000"] > 0.0
        assert table[-1]["fscore"] < 1.0


def test_summarize_average_over_samples() -> None:
    rows = [
        {"family": "box", "cd_l2_x1000": 1.0, "fscore": 0.5},
        {"family": "box", "cd_l2_x1000": 3.0, "fscore": 0.5},
        {"family": "torus", "cd_l2_x1000": 8.0, "fscore": 0.2},
    ]
    table = summarize(rows, "full")
    assert table == [
        {"variant": "full", "family": "box", "cd_l2_x1000": 2.0, "fscore": 0.5},
        {"variant": "full", "family": "torus", "cd_l2_x1000": 8.0, "fscore": 0.2},
        {"variant": "full", "family": "average", "cd_l2_x1000": 4.0, "fscore": pytest.approx(0.4)},
    ]
    assert summarize([], "full") == []


class TestModelEvaluation:
    def test_model_completer(self) -> None:
        completer = ModelCompleter(tiny_checkpoint().model)
        rng = np.random.default_rng(0)
        partials = [rng.uniform(-0.5, 0.5, size=(64, 3)) for _ in range(3)]
        views = [rng.uniform(size=(16, 16, 3)) for _ in range(3)]
        clouds = completer(partials, views)
        assert len(clouds) == 3
        assert all(c.shape == (64, 3) and c.dtype == np.float64 for c in clouds)

    @pytest.mark.parametrize("training", [True, False])
    def test_model_completer_keeps_mode(self, training: bool) -> None:
        model = tiny_checkpoint().model
        model.train(training)
        rng = np.random.default_rng(1)
        ModelCompleter(model)([rng.uniform(-0.5, 0.5, size=(64, 3))], [rng.uniform(size=(16, 16, 3))])
        assert model.training is training
        assert all(m.training is training for m in model.modules())

    def test_evaluate_checkpoint_dir(self, tmp_path: Path) -> None:
        manifest = write_toy_manifest(tmp_path, 3, complete_points=80, partial_points=64)
        save_checkpoint(tiny_checkpoint(), tmp_path / "ckpt")
        table = evaluate(tmp_path / "ckpt", manifest, out_csv=tmp_path / "out" / "metrics.csv")
        assert table[-1]["family"] == "average"
        assert all(math.isfinite(row["cd_l2_x1000"]) and 0.0 <= row["fscore"] <= 1.0 for row in table)
        assert read_metrics_csv(tmp_path / "out" / "metrics.csv") == table


def test_metrics_csv_exact(tmp_path: Path) -> None:
    rows = [{"variant": "full", "family": "box", "cd_l2_x1000": 1 / 3, "fscore": 0.1 + 0.2}]
    write_metrics_csv(tmp_path / "m.csv", rows)
    assert (tmp_path / "m.csv").read_text().splitlines()[0] == ",".join(CSV_FIELDS)
    assert read_metrics_csv(tmp_path / "m.csv") == rows
