from typing import Any, Dict, Sequence

import numpy as np

from egiinet.interfaces.score_completions import ScoreCompletions
from egiinet.utils.geometry import chamfer_l1, chamfer_l2


class ChamferScorer(ScoreCompletions):
    """An implementation of the ``ScoreCompletions`` interface reporting Chamfer distance.

    ``kind="l2"`` averages squared nearest-neighbour distances, ``kind="l1"`` averages the
    distances themselves. Scores are multiplied by ``scale``; the default of 1000 matches the
    usual "CD x 10^3" reporting convention.
    """

    KINDS = ("l1", "l2")

    def __init__(self, kind: str = "l2", scale: float = 1000.0):
        if kind not in self.KINDS:
            raise ValueError(f"{type(self).__name__} invalid kind ({kind}). Must be one of {self.KINDS}")
        if not scale > 0:
            raise ValueError(f"{type(self).__name__} invalid scale ({scale}). Must be > 0.0")

        self.kind = kind
        self.scale = scale

    @property
    def name(self) -> str:
        if self.scale == 1.0:
            return f"cd_{self.kind}"
        return f"cd_{self.kind}_x{self.scale:g}"

    def score(
        self,
        actual: Sequence[np.ndarray],
        predicted: Sequence[np.ndarray],
    ) -> Sequence[float]:
        """Return the scaled Chamfer distance of each (actual, predicted) pair."""
        self._check_inputs(actual, predicted)
        metric = chamfer_l2 if self.kind == "l2" else chamfer_l1
        return [self.scale * metric(pred, gt) for gt, pred in zip(actual, predicted)]

    def get_config(self) -> Dict[str, Any]:
        return {"kind": self.kind, "scale": self.scale}
